#ifndef RCTBENCH_CONFIG_HPP
#define RCTBENCH_CONFIG_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rctbench/confounding.hpp"
#include "rctbench/csv.hpp"
#include "rctbench/dgp.hpp"
#include "rctbench/estimators.hpp"
#include "rctbench/learners.hpp"
#include "rctbench/text.hpp"

namespace rctbench {

using ordered_json = nlohmann::ordered_json;

// Bad configuration (distinct from runtime faults so the CLI can map it to
// its own exit code).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

inline ConfoundingFunction confounding_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("confounding spec must be an object with a 'kind'");
  }
  std::string kind = j.at("kind").get<std::string>();
  bool allow_trivial = j.value("allow_trivial", false);
  try {
    if (kind == "piecewise") {
      return ConfoundingFunction::piecewise(
          j.value("covariate", std::string("C")),
          j.at("zeta0").get<double>(), j.at("zeta1").get<double>(),
          allow_trivial);
    }
    if (kind == "logistic") {
      std::vector<LogisticTerm> terms;
      for (const auto& t : j.at("terms")) {
        LogisticTerm lt;
        for (const auto& v : t.at("vars")) {
          lt.covariates.push_back(v.get<std::string>());
        }
        lt.coef = t.at("coef").get<double>();
        terms.push_back(std::move(lt));
      }
      return ConfoundingFunction::logistic(j.value("intercept", 0.0),
                                           std::move(terms), allow_trivial);
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("bad confounding spec: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("bad confounding spec: ") + e.what());
  }
  throw ConfigError("confounding kind must be 'piecewise' or 'logistic', got "
                    "'" + kind + "'");
}

inline ordered_json confounding_to_json(const ConfoundingFunction& f) {
  ordered_json j;
  if (f.kind == ConfoundingFunction::Kind::PiecewiseBinary) {
    j["kind"] = "piecewise";
    j["covariate"] = f.covariate;
    j["zeta0"] = f.zeta0;
    j["zeta1"] = f.zeta1;
  } else {
    j["kind"] = "logistic";
    j["intercept"] = f.intercept;
    ordered_json terms = ordered_json::array();
    for (const auto& t : f.terms) {
      terms.push_back({{"vars", t.covariates}, {"coef", t.coef}});
    }
    j["terms"] = std::move(terms);
  }
  if (f.marked_trivial) j["allow_trivial"] = true;
  return j;
}

inline AdjustmentTerm adjustment_term_from_json(const ordered_json& j) {
  AdjustmentTerm t;
  t.with_treatment = j.value("with_treatment", false);
  for (const auto& v : j.at("vars")) {
    t.covariates.push_back(v.get<std::string>());
  }
  return t;
}

inline BaseLearnerSpec base_learner_from_json(const ordered_json& j) {
  BaseLearnerSpec s;
  std::string family = j.value("family", std::string("logistic_elastic_net"));
  if (family == "logistic_elastic_net") {
    s.family = BaseLearnerSpec::Family::LogisticElasticNet;
  } else if (family == "gbdt") {
    s.family = BaseLearnerSpec::Family::GradientBoostedTrees;
  } else {
    throw ConfigError("base_learner family must be 'logistic_elastic_net' or "
                      "'gbdt'");
  }
  s.l1_ratio = j.value("l1_ratio", s.l1_ratio);
  if (j.contains("regularization_grid")) {
    s.regularization_grid =
        j.at("regularization_grid").get<std::vector<double>>();
  }
  s.balanced_class_weights =
      j.value("balanced_class_weights", s.balanced_class_weights);
  s.tolerance = j.value("tolerance", s.tolerance);
  s.max_iterations = j.value("max_iterations", s.max_iterations);
  s.inner_cv_folds = j.value("inner_cv_folds", s.inner_cv_folds);
  s.n_trees = j.value("n_trees", s.n_trees);
  s.max_depth = j.value("max_depth", s.max_depth);
  s.learning_rate = j.value("learning_rate", s.learning_rate);
  return s;
}

inline ordered_json base_learner_to_json(const BaseLearnerSpec& s) {
  ordered_json j;
  if (s.family == BaseLearnerSpec::Family::LogisticElasticNet) {
    j["family"] = "logistic_elastic_net";
    j["l1_ratio"] = s.l1_ratio;
    j["regularization_grid"] = s.regularization_grid;
    j["balanced_class_weights"] = s.balanced_class_weights;
    j["tolerance"] = s.tolerance;
    j["max_iterations"] = s.max_iterations;
    j["inner_cv_folds"] = s.inner_cv_folds;
  } else {
    j["family"] = "gbdt";
    j["n_trees"] = s.n_trees;
    j["max_depth"] = s.max_depth;
    j["learning_rate"] = s.learning_rate;
  }
  return j;
}

struct DiagnosticConfig {
  std::vector<ConfoundingFunction> f_grid;
  int n_seeds = 100;
};

struct BenchmarkConfig {
  // Data source: either DGP settings or one CSV (with a schema file).
  std::vector<DgpId> dgp_settings;
  std::string csv_path;
  std::string schema_path;
  std::size_t n = 100000;  // rows per DGP draw

  // "dgp" resolves each setting's own confounding function.
  std::optional<ConfoundingFunction> confounding;  // nullopt = dgp default
  std::vector<std::string> samplers;  // rejection | gentzel | none
  std::vector<std::string> estimators;
  std::optional<std::vector<AdjustmentTerm>> adjustment_terms;  // nullopt = oracle
  std::string adjustment_covariate = "C";
  BaseLearnerSpec base_learner;
  int k_folds = 5;

  int n_seeds = 1;
  int n_boot = 1000;
  double ci_level = 0.95;
  std::vector<std::string> bootstrap_estimators = {"dim", "backdoor_exact",
                                                   "backdoor_param"};
  std::uint64_t master_seed = 20230811;
  std::string output_dir = "out";
  int n_workers = 0;  // 0 = hardware concurrency; never affects results

  std::optional<std::pair<std::string, std::string>> subpopulation;
  VocabularyParams vocabulary;
  std::optional<DiagnosticConfig> diagnostic;

  bool uses_csv() const { return !csv_path.empty(); }

  std::string data_label(std::size_t index) const {
    if (uses_csv()) return "csv";
    return dgp_id_name(dgp_settings[index]);
  }
  std::size_t n_data_sources() const {
    return uses_csv() ? 1 : dgp_settings.size();
  }
};

inline const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> v = {
      "dim", "backdoor_exact", "backdoor_param", "q", "iptw", "aiptw", "dml"};
  return v;
}

inline BenchmarkConfig config_from_json(const ordered_json& j) {
  BenchmarkConfig cfg;
  try {
    if (!j.contains("data") || !j.at("data").is_object()) {
      throw ConfigError("config needs a 'data' object");
    }
    const auto& data = j.at("data");
    if (data.contains("dgp")) {
      if (data.at("dgp").is_array()) {
        for (const auto& s : data.at("dgp")) {
          cfg.dgp_settings.push_back(parse_dgp_id(s.get<std::string>()));
        }
      } else {
        cfg.dgp_settings.push_back(
            parse_dgp_id(data.at("dgp").get<std::string>()));
      }
      if (cfg.dgp_settings.empty()) {
        throw ConfigError("data.dgp must name at least one setting");
      }
    } else if (data.contains("csv")) {
      cfg.csv_path = data.at("csv").get<std::string>();
      if (!data.contains("schema")) {
        throw ConfigError("data.csv requires data.schema");
      }
      cfg.schema_path = data.at("schema").get<std::string>();
    } else {
      throw ConfigError("data must specify 'dgp' or 'csv'");
    }
    cfg.n = j.value("n", cfg.n);

    if (j.contains("confounding") && j.at("confounding") != "dgp") {
      cfg.confounding = confounding_from_json(j.at("confounding"));
    }

    if (j.contains("sampler")) {
      if (j.at("sampler").is_array()) {
        cfg.samplers = j.at("sampler").get<std::vector<std::string>>();
      } else {
        cfg.samplers = {j.at("sampler").get<std::string>()};
      }
    } else {
      cfg.samplers = {"rejection"};
    }
    for (const auto& s : cfg.samplers) {
      if (s != "rejection" && s != "gentzel" && s != "none") {
        throw ConfigError("unknown sampler '" + s +
                          "' (expected rejection|gentzel|none)");
      }
    }

    cfg.estimators =
        j.value("estimators", std::vector<std::string>{"backdoor_param"});
    for (const auto& e : cfg.estimators) {
      bool known = false;
      for (const auto& k : known_estimators()) known = known || k == e;
      if (!known) throw ConfigError("unknown estimator '" + e + "'");
    }

    if (j.contains("adjustment_terms") &&
        j.at("adjustment_terms") != "oracle") {
      std::vector<AdjustmentTerm> terms;
      for (const auto& t : j.at("adjustment_terms")) {
        terms.push_back(adjustment_term_from_json(t));
      }
      cfg.adjustment_terms = std::move(terms);
    }
    cfg.adjustment_covariate =
        j.value("adjustment_covariate", cfg.adjustment_covariate);

    if (j.contains("base_learner")) {
      cfg.base_learner = base_learner_from_json(j.at("base_learner"));
    }
    cfg.k_folds = j.value("k_folds", cfg.k_folds);
    cfg.n_seeds = j.value("n_seeds", cfg.n_seeds);
    cfg.n_boot = j.value("n_boot", cfg.n_boot);
    cfg.ci_level = j.value("ci_level", cfg.ci_level);
    cfg.bootstrap_estimators =
        j.value("bootstrap_estimators", cfg.bootstrap_estimators);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.n_workers = j.value("n_workers", cfg.n_workers);

    if (j.contains("subpopulation")) {
      const auto& sp = j.at("subpopulation");
      if (!sp.is_array() || sp.size() != 2) {
        throw ConfigError("subpopulation must be a pair of category names");
      }
      cfg.subpopulation = {sp[0].get<std::string>(),
                           sp[1].get<std::string>()};
    }
    if (j.contains("vocabulary")) {
      const auto& v = j.at("vocabulary");
      cfg.vocabulary.max_terms =
          v.value("max_terms", cfg.vocabulary.max_terms);
      cfg.vocabulary.min_doc_count =
          v.value("min_doc_count", cfg.vocabulary.min_doc_count);
      cfg.vocabulary.max_doc_fraction =
          v.value("max_doc_fraction", cfg.vocabulary.max_doc_fraction);
    }
    if (j.contains("diagnostic")) {
      DiagnosticConfig dc;
      for (const auto& f : j.at("diagnostic").at("f_grid")) {
        dc.f_grid.push_back(confounding_from_json(f));
      }
      dc.n_seeds = j.at("diagnostic").value("n_seeds", dc.n_seeds);
      cfg.diagnostic = std::move(dc);
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  if (cfg.n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  return cfg;
}

inline BenchmarkConfig load_config(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const ordered_json::exception& e) {
    throw ConfigError("cannot parse config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

// Fully resolved copy, suitable for config.lock.json; reloading it
// reproduces the run byte for byte.
inline ordered_json config_to_json(const BenchmarkConfig& cfg) {
  ordered_json j;
  ordered_json data;
  if (cfg.uses_csv()) {
    data["csv"] = cfg.csv_path;
    data["schema"] = cfg.schema_path;
  } else {
    ordered_json settings = ordered_json::array();
    for (DgpId id : cfg.dgp_settings) settings.push_back(dgp_id_name(id));
    data["dgp"] = std::move(settings);
  }
  j["data"] = std::move(data);
  j["n"] = cfg.n;
  if (cfg.confounding) {
    j["confounding"] = confounding_to_json(*cfg.confounding);
  } else {
    j["confounding"] = "dgp";
  }
  j["sampler"] = cfg.samplers;
  j["estimators"] = cfg.estimators;
  if (cfg.adjustment_terms) {
    ordered_json terms = ordered_json::array();
    for (const auto& t : *cfg.adjustment_terms) {
      terms.push_back({{"vars", t.covariates},
                       {"with_treatment", t.with_treatment}});
    }
    j["adjustment_terms"] = std::move(terms);
  } else {
    j["adjustment_terms"] = "oracle";
  }
  j["adjustment_covariate"] = cfg.adjustment_covariate;
  j["base_learner"] = base_learner_to_json(cfg.base_learner);
  j["k_folds"] = cfg.k_folds;
  j["n_seeds"] = cfg.n_seeds;
  j["n_boot"] = cfg.n_boot;
  j["ci_level"] = cfg.ci_level;
  j["bootstrap_estimators"] = cfg.bootstrap_estimators;
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  j["n_workers"] = cfg.n_workers;
  if (cfg.subpopulation) {
    j["subpopulation"] = {cfg.subpopulation->first, cfg.subpopulation->second};
  }
  j["vocabulary"] = {{"max_terms", cfg.vocabulary.max_terms},
                     {"min_doc_count", cfg.vocabulary.min_doc_count},
                     {"max_doc_fraction", cfg.vocabulary.max_doc_fraction}};
  if (cfg.diagnostic) {
    ordered_json grid = ordered_json::array();
    for (const auto& f : cfg.diagnostic->f_grid) {
      grid.push_back(confounding_to_json(f));
    }
    j["diagnostic"] = {{"f_grid", std::move(grid)},
                       {"n_seeds", cfg.diagnostic->n_seeds}};
  }
  return j;
}

inline CsvSchema schema_from_json(const ordered_json& j) {
  CsvSchema s;
  try {
    s.treatment = j.value("treatment", s.treatment);
    s.outcome = j.value("outcome", s.outcome);
    if (j.contains("covariates")) {
      s.covariates = j.at("covariates").get<std::vector<std::string>>();
    }
    if (j.contains("text")) s.text_column = j.at("text").get<std::string>();
    if (j.contains("category")) {
      s.category_column = j.at("category").get<std::string>();
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError(std::string("bad schema: ") + e.what());
  }
  return s;
}

inline CsvSchema load_schema(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const ordered_json::exception& e) {
    throw ConfigError("cannot parse schema " + path + ": " + e.what());
  }
  return schema_from_json(j);
}

}  // namespace rctbench

#endif  // RCTBENCH_CONFIG_HPP
