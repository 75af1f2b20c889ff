// bench: config-driven experiment runner.
//   bench run --config FILE [--seeds N] [--out DIR]
//   bench diagnose --config FILE [--out DIR]
//   bench ingest --csv FILE --schema FILE
// Exit codes: 0 success, 2 configuration error, 3 too many seed failures.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "rctbench/bench.hpp"

namespace {

void print_cells(const rctbench::BenchmarkResult& result) {
  std::printf("%-10s %-10s %-15s %6s %6s %12s %12s %9s\n", "data", "sampler",
              "estimator", "ok", "fail", "abs_bias", "rel_bias", "coverage");
  for (const auto& c : result.cells) {
    std::printf("%-10s %-10s %-15s %6zu %6zu %7.4f(%.4f) %7.4f(%.4f)",
                c.data_label.c_str(), c.sampler.c_str(), c.estimator.c_str(),
                c.n_seeds_ok, c.n_seeds_failed, c.mean_abs_bias,
                c.std_abs_bias, c.mean_rel_abs_bias, c.std_rel_abs_bias);
    if (c.ci_coverage) {
      std::printf(" %9.3f", *c.ci_coverage);
    } else {
      std::printf(" %9s", "-");
    }
    std::printf("\n");
  }
}

int run_command(const std::string& config_path, int seeds_override,
                const std::string& out_override) {
  auto cfg = rctbench::load_config(config_path);
  if (seeds_override > 0) cfg.n_seeds = seeds_override;
  if (!out_override.empty()) cfg.output_dir = out_override;
  auto result = rctbench::run_benchmark(cfg);
  rctbench::emit_reports(result, cfg, cfg.output_dir);
  print_cells(result);
  std::printf("reports written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int diagnose_command(const std::string& config_path,
                     const std::string& out_override) {
  auto cfg = rctbench::load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  auto results = rctbench::run_diagnose(cfg, cfg.output_dir);
  std::printf("%-6s %-48s %8s %8s\n", "f", "description", "below", "failed");
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::printf("%-6zu %-48s %8.3f %8zu\n", i,
                results[i].f.describe().c_str(), results[i].fraction_below,
                results[i].n_failed);
  }
  std::printf("diagnostics written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int ingest_command(const std::string& csv_path,
                   const std::string& schema_path) {
  auto schema = rctbench::load_schema(schema_path);
  auto ing = rctbench::ingest_csv(csv_path, schema);
  auto stats = rctbench::summary(ing.data);
  std::printf("rows: %zu\n", ing.data.n_rows);
  std::printf("covariates:");
  for (const auto& name : ing.data.covariate_names) {
    std::printf(" %s", name.c_str());
  }
  std::printf("\ntreated fraction: %.6f\n", stats.treated_fraction);
  if (stats.mean_outcome_treated && stats.mean_outcome_control) {
    std::printf("mean outcome by arm: T=1 %.6f, T=0 %.6f (difference %.6f)\n",
                *stats.mean_outcome_treated, *stats.mean_outcome_control,
                *stats.mean_outcome_treated - *stats.mean_outcome_control);
  }
  if (!ing.documents.empty()) {
    std::printf("text column present (%zu documents)\n",
                ing.documents.size());
  }
  if (!ing.categories.empty()) {
    std::printf("category column present\n");
  }
  std::printf("validation: ok\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RCT subsampling benchmark runner"};
  app.require_subcommand(1);

  std::string config_path, out_override, csv_path, schema_path;
  int seeds_override = 0;

  auto* run = app.add_subcommand("run", "run a benchmark config");
  run->add_option("--config", config_path, "config json")->required();
  run->add_option("--seeds", seeds_override, "override n_seeds");
  run->add_option("--out", out_override, "override output directory");

  auto* diag = app.add_subcommand("diagnose", "confounding-function sweep");
  diag->add_option("--config", config_path, "config json")->required();
  diag->add_option("--out", out_override, "override output directory");

  auto* ingest = app.add_subcommand("ingest", "validate and summarize a csv");
  ingest->add_option("--csv", csv_path, "data csv")->required();
  ingest->add_option("--schema", schema_path, "schema json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      return run_command(config_path, seeds_override, out_override);
    }
    if (diag->parsed()) return diagnose_command(config_path, out_override);
    return ingest_command(csv_path, schema_path);
  } catch (const rctbench::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const rctbench::SeedFailureError& e) {
    std::fprintf(stderr, "seed failures: %s\n", e.what());
    return 3;
  } catch (const rctbench::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
}
