#ifndef RCTBENCH_CSV_HPP
#define RCTBENCH_CSV_HPP

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rctbench/dataset.hpp"

namespace rctbench {

// Shortest representation that round-trips the exact double ("%.17g" with
// trailing-zero trimming via %g).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == name) return static_cast<int>(j);
    }
    return -1;
  }
};

// RFC-4180 style: quoted fields may contain commas, newlines and doubled
// quotes. Accepts both \n and \r\n line endings.
inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;
  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
    any_field = false;
  };
  auto end_record = [&]() {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size()) {
        throw Error("csv row " + std::to_string(table.rows.size() + 1) +
                    " has " + std::to_string(record.size()) +
                    " fields, header has " +
                    std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(record));
    }
    record = {};
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_field = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        any_field = true;
    }
  }
  if (in_quotes) throw Error("csv ends inside a quoted field");
  if (!field.empty() || any_field || !record.empty()) end_record();
  if (table.header.empty()) throw Error("csv has no header row");
  return table;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CsvTable read_csv(const std::string& path) {
  return parse_csv(read_file(path));
}

inline std::string csv_quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

// Atomic write: content lands under the final name only when complete.
inline void write_file_atomic(const std::string& path,
                              std::string_view content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp);
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("rename failed for " + path + ": " + std::strerror(errno));
  }
}

// Dataset interchange format: one column per covariate, T, Y, and (when
// proxies are present) `_proxies{vocab_size}` holding space-separated column
// ids. Reals are written so they parse back to the identical double.
inline std::string dataset_to_csv(const TabularDataset& d) {
  std::string out;
  for (const auto& name : d.covariate_names) {
    out += csv_quote(name);
    out += ',';
  }
  out += "T,Y";
  if (d.proxies) {
    out += ",_proxies{" + std::to_string(d.proxies->n_cols) + "}";
  }
  out += '\n';
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    for (std::size_t j = 0; j < d.covariates.size(); ++j) {
      out += format_double(d.covariates[j][i]);
      out += ',';
    }
    out += d.treatment[i] == 1 ? '1' : '0';
    out += ',';
    out += format_double(d.outcome[i]);
    if (d.proxies) {
      out += ',';
      std::string ids;
      for (std::uint32_t c : d.proxies->rows[i]) {
        if (!ids.empty()) ids += ' ';
        ids += std::to_string(c);
      }
      out += csv_quote(ids);
    }
    out += '\n';
  }
  return out;
}

inline void write_dataset_csv(const TabularDataset& d,
                              const std::string& path) {
  write_file_atomic(path, dataset_to_csv(d));
}

namespace detail {

inline double parse_cell_number(const std::string& cell,
                                const std::string& column, std::size_t row) {
  if (cell.empty()) {
    throw Error("column " + column + ", row " + std::to_string(row + 1) +
                ": empty cell");
  }
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw Error("column " + column + ", row " + std::to_string(row + 1) +
                ": cannot parse '" + cell + "' as a number");
  }
  return v;
}

}  // namespace detail

// Column mapping for external CSVs.
struct CsvSchema {
  std::string treatment = "T";
  std::string outcome = "Y";
  std::vector<std::string> covariates;
  std::optional<std::string> text_column;
  std::optional<std::string> category_column;
};

// Dataset plus the string columns the schema names; documents and categories
// stay row-aligned with the dataset.
struct IngestedDataset {
  TabularDataset data;
  std::vector<std::string> documents;
  std::vector<std::string> categories;
  std::map<std::string, int> category_mapping;  // set by subpopulation_filter
};

inline IngestedDataset ingest_table(const CsvTable& table,
                                    const CsvSchema& schema) {
  auto need = [&](const std::string& name) {
    int j = table.column_index(name);
    if (j < 0) throw Error("required column missing from csv: " + name);
    return static_cast<std::size_t>(j);
  };
  std::size_t tj = need(schema.treatment);
  std::size_t yj = need(schema.outcome);

  IngestedDataset out;
  TabularDataset& d = out.data;
  d.n_rows = table.rows.size();
  d.covariate_names = schema.covariates;
  for (const auto& name : schema.covariates) {
    std::size_t cj = need(name);
    std::vector<double> col(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      col[i] = detail::parse_cell_number(table.rows[i][cj], name, i);
    }
    d.covariates.push_back(std::move(col));
  }
  d.treatment.resize(d.n_rows);
  d.outcome.resize(d.n_rows);
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    double t = detail::parse_cell_number(table.rows[i][tj], schema.treatment, i);
    if (t != 0.0 && t != 1.0) {
      throw Error("column " + schema.treatment + ", row " +
                  std::to_string(i + 1) + ": treatment must be 0 or 1, got " +
                  table.rows[i][tj]);
    }
    d.treatment[i] = t == 1.0 ? 1 : 0;
    d.outcome[i] =
        detail::parse_cell_number(table.rows[i][yj], schema.outcome, i);
  }
  if (schema.text_column) {
    std::size_t xj = need(*schema.text_column);
    out.documents.resize(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      out.documents[i] = table.rows[i][xj];
    }
  }
  if (schema.category_column) {
    std::size_t cj = need(*schema.category_column);
    out.categories.resize(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      out.categories[i] = table.rows[i][cj];
    }
  }
  require_valid(d);
  return out;
}

inline IngestedDataset ingest_csv(const std::string& path,
                                  const CsvSchema& schema) {
  return ingest_table(read_csv(path), schema);
}

// Restricts to rows whose category is one of the two given values and adds a
// binary covariate "C": 0 for the first category, 1 for the second.
inline IngestedDataset subpopulation_filter(
    const IngestedDataset& in, const std::string& category0,
    const std::string& category1) {
  if (in.categories.size() != in.data.n_rows) {
    throw Error("subpopulation_filter: dataset has no category column");
  }
  if (in.data.has_covariate("C")) {
    throw Error("subpopulation_filter: dataset already has a covariate 'C'");
  }
  std::vector<std::size_t> idx;
  std::vector<double> c;
  for (std::size_t i = 0; i < in.data.n_rows; ++i) {
    if (in.categories[i] == category0) {
      idx.push_back(i);
      c.push_back(0.0);
    } else if (in.categories[i] == category1) {
      idx.push_back(i);
      c.push_back(1.0);
    }
  }
  std::size_t n0 = 0;
  for (double v : c) n0 += (v == 0.0);
  if (n0 == 0 || n0 == c.size()) {
    throw Error("subpopulation_filter: category '" +
                (n0 == 0 ? category0 : category1) + "' selects no rows");
  }
  IngestedDataset out;
  out.data = select_rows(in.data, std::span<const std::size_t>(idx));
  out.data.covariate_names.insert(out.data.covariate_names.begin(), "C");
  out.data.covariates.insert(out.data.covariates.begin(), std::move(c));
  if (!in.documents.empty()) {
    for (std::size_t i : idx) out.documents.push_back(in.documents[i]);
  }
  for (std::size_t i : idx) out.categories.push_back(in.categories[i]);
  out.category_mapping = {{category0, 0}, {category1, 1}};
  return out;
}

// Reads the interchange format written by write_dataset_csv.
inline TabularDataset read_dataset_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  TabularDataset d;
  d.n_rows = table.rows.size();
  int tj = table.column_index("T");
  int yj = table.column_index("Y");
  if (tj < 0 || yj < 0) throw Error("dataset csv must have T and Y columns");
  int proxy_j = -1;
  std::size_t proxy_cols = 0;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    const std::string& h = table.header[j];
    if (h.rfind("_proxies{", 0) == 0 && h.back() == '}') {
      proxy_j = static_cast<int>(j);
      proxy_cols = std::strtoull(h.c_str() + 9, nullptr, 10);
    } else if (static_cast<int>(j) != tj && static_cast<int>(j) != yj) {
      d.covariate_names.push_back(h);
      std::vector<double> col(d.n_rows);
      for (std::size_t i = 0; i < d.n_rows; ++i) {
        col[i] = detail::parse_cell_number(table.rows[i][j], h, i);
      }
      d.covariates.push_back(std::move(col));
    }
  }
  d.treatment.resize(d.n_rows);
  d.outcome.resize(d.n_rows);
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    double t = detail::parse_cell_number(table.rows[i][tj], "T", i);
    if (t != 0.0 && t != 1.0) {
      throw Error("row " + std::to_string(i + 1) + ": T must be 0 or 1");
    }
    d.treatment[i] = t == 1.0 ? 1 : 0;
    d.outcome[i] = detail::parse_cell_number(table.rows[i][yj], "Y", i);
  }
  if (proxy_j >= 0) {
    SparseBinaryMatrix m;
    m.n_rows = d.n_rows;
    m.n_cols = proxy_cols;
    m.rows.resize(d.n_rows);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
      const std::string& cell = table.rows[i][proxy_j];
      std::size_t pos = 0;
      while (pos < cell.size()) {
        while (pos < cell.size() && cell[pos] == ' ') ++pos;
        if (pos >= cell.size()) break;
        char* end = nullptr;
        unsigned long v = std::strtoul(cell.c_str() + pos, &end, 10);
        if (end == cell.c_str() + pos) {
          throw Error("row " + std::to_string(i + 1) +
                      ": bad proxy index list");
        }
        m.rows[i].push_back(static_cast<std::uint32_t>(v));
        pos = static_cast<std::size_t>(end - cell.c_str());
      }
    }
    d.proxies = std::move(m);
  }
  require_valid(d);
  return d;
}

}  // namespace rctbench

#endif  // RCTBENCH_CSV_HPP
