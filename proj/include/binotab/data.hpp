#pragma once

// Tabular data pipeline: CSV ingestion against a declared column schema,
// categorical encoding (consecutive codes in first-appearance order),
// zero imputation of missing cells, mean / 2*std normalization with
// training statistics, deterministic train/validation splits and the
// class-balanced batch sampler.

#include "binotab/csv.hpp"
#include "binotab/ini.hpp"
#include "binotab/label.hpp"
#include "binotab/matrix.hpp"
#include "binotab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace binotab {

enum class ColumnKind { numeric, categorical, label };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::string positive_label_token;  // label columns only
};

struct Schema {
  std::vector<ColumnSpec> columns;
  std::vector<std::string> missing_tokens;  // besides the empty string

  const ColumnSpec& label_column() const {
    const ColumnSpec* found = nullptr;
    for (const auto& c : columns) {
      if (c.kind == ColumnKind::label) {
        if (found) throw std::runtime_error("schema: more than one label column");
        found = &c;
      }
    }
    if (!found) throw std::runtime_error("schema: no label column");
    return *found;
  }

  // Feature columns in schema order; this order defines the feature matrix.
  std::vector<const ColumnSpec*> feature_columns() const {
    std::vector<const ColumnSpec*> out;
    for (const auto& c : columns) {
      if (c.kind != ColumnKind::label) out.push_back(&c);
    }
    return out;
  }

  bool is_missing_token(const std::string& token) const {
    if (token.empty()) return true;
    return std::find(missing_tokens.begin(), missing_tokens.end(), token) !=
           missing_tokens.end();
  }
};

// Schema file: [columns] name = numeric|categorical|label, [label] positive =
// token, optional top-level missing = space-separated tokens.
inline Schema parse_schema(const IniFile& ini) {
  Schema schema;
  const auto* columns = ini.find("columns");
  if (!columns) throw std::runtime_error("schema: missing [columns] section");
  for (const auto& [name, kind] : columns->entries) {
    ColumnSpec spec;
    spec.name = name;
    if (kind == "numeric") spec.kind = ColumnKind::numeric;
    else if (kind == "categorical") spec.kind = ColumnKind::categorical;
    else if (kind == "label") spec.kind = ColumnKind::label;
    else throw std::runtime_error("schema: unknown column kind '" + kind + "' for " + name);
    schema.columns.push_back(std::move(spec));
  }
  for (auto& c : schema.columns) {
    if (c.kind == ColumnKind::label) {
      c.positive_label_token = ini.get("label", "positive");
    }
  }
  const std::string missing = ini.get_or("", "missing", ini.get_or("options", "missing", ""));
  std::istringstream ms(missing);
  std::string tok;
  while (ms >> tok) schema.missing_tokens.push_back(tok);
  schema.label_column();  // validates exactly one
  return schema;
}

inline Schema load_schema(const std::string& path) {
  return parse_schema(IniFile::parse_file(path));
}

// token -> consecutive code per categorical column, keyed by column name.
struct CategoryMaps {
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> maps;

  std::size_t encode(const std::string& column, const std::string& token) {
    auto& map = maps[column];
    const auto it = map.find(token);
    if (it != map.end()) return it->second;
    const std::size_t code = map.size();
    map.emplace(token, code);
    return code;
  }
};

struct TabularDataset {
  Matrix features;  // rows x feature_count; missing cells are NaN until imputed
  std::vector<BinaryLabel> labels;
  Schema schema;
  CategoryMaps category_maps;
  bool normalized = false;

  std::size_t rows() const { return labels.size(); }
  std::size_t feature_count() const { return features.cols(); }
};

namespace detail {

inline bool parse_numeric_cell(const std::string& token, double& out) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (!trim(token.substr(used)).empty()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// Label comparison ignores a single trailing '.' (UCI test files carry one).
inline std::string canonical_label_token(const std::string& token) {
  if (!token.empty() && token.back() == '.') return token.substr(0, token.size() - 1);
  return token;
}

}  // namespace detail

// Encodes a parsed CSV against the schema, extending `maps` with categories
// in first-appearance order. Header columns are matched by name.
inline TabularDataset encode_table(const CsvTable& table, const Schema& schema,
                                   CategoryMaps& maps, const std::string& origin) {
  // Header <-> schema match, order-insensitive, both directions.
  std::vector<std::size_t> column_of_schema(schema.columns.size());
  std::vector<bool> header_used(table.header.size(), false);
  for (std::size_t s = 0; s < schema.columns.size(); ++s) {
    bool found = false;
    for (std::size_t h = 0; h < table.header.size(); ++h) {
      if (table.header[h] == schema.columns[s].name) {
        column_of_schema[s] = h;
        header_used[h] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error(origin + ": column '" + schema.columns[s].name +
                               "' declared in the schema is missing from the header");
    }
  }
  for (std::size_t h = 0; h < table.header.size(); ++h) {
    if (!header_used[h]) {
      throw std::runtime_error(origin + ": unknown column '" + table.header[h] + "'");
    }
  }

  if (table.rows.empty()) throw std::runtime_error(origin + ": no data rows");

  const auto features = schema.feature_columns();
  TabularDataset data;
  data.schema = schema;
  data.features = Matrix(table.rows.size(), features.size());
  data.labels.reserve(table.rows.size());

  const ColumnSpec& label_spec = schema.label_column();
  const std::string positive = detail::canonical_label_token(label_spec.positive_label_token);
  std::size_t label_col = 0;
  std::vector<std::size_t> column_of_feature;
  for (std::size_t s = 0; s < schema.columns.size(); ++s) {
    if (schema.columns[s].kind == ColumnKind::label) label_col = column_of_schema[s];
    else column_of_feature.push_back(column_of_schema[s]);
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t f = 0; f < features.size(); ++f) {
      const ColumnSpec& spec = *features[f];
      const std::string& token = row[column_of_feature[f]];
      if (schema.is_missing_token(token)) {
        data.features(r, f) = nan;
        continue;
      }
      if (spec.kind == ColumnKind::numeric) {
        double value = 0.0;
        if (detail::parse_numeric_cell(token, value)) {
          data.features(r, f) = value;
        } else {
          data.features(r, f) = nan;  // unparseable == missing
        }
      } else {
        data.features(r, f) = static_cast<double>(maps.encode(spec.name, token));
      }
    }
    const std::string& label_token = row[label_col];
    if (schema.is_missing_token(label_token)) {
      throw std::runtime_error(origin + ": row " + std::to_string(r + 1) +
                               ": missing label");
    }
    data.labels.push_back(detail::canonical_label_token(label_token) == positive
                              ? BinaryLabel::positive()
                              : BinaryLabel::negative());
  }
  data.category_maps = maps;
  return data;
}

inline TabularDataset load_csv(const std::string& path, const Schema& schema,
                               CategoryMaps& maps) {
  return encode_table(read_csv(path), schema, maps, path);
}

inline TabularDataset load_csv(const std::string& path, const Schema& schema) {
  CategoryMaps maps;
  return encode_table(read_csv(path), schema, maps, path);
}

struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> divisor;  // 2 * population std, or 1.0 for constant features
};

namespace detail {

inline void impute_zero(TabularDataset& data) {
  double* p = data.features.data();
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    if (std::isnan(p[i])) p[i] = 0.0;
  }
}

inline void apply_stats(TabularDataset& data, const NormalizationStats& stats) {
  if (data.feature_count() != stats.mean.size()) {
    throw std::invalid_argument("normalize: dataset has " +
                                std::to_string(data.feature_count()) +
                                " features, stats have " + std::to_string(stats.mean.size()));
  }
  for (std::size_t f = 0; f < stats.mean.size(); ++f) {
    for (std::size_t r = 0; r < data.rows(); ++r) {
      data.features(r, f) = (data.features(r, f) - stats.mean[f]) / stats.divisor[f];
    }
  }
  data.normalized = true;
}

}  // namespace detail

// Missing cells become raw 0.0 first (zeros participate in the statistics),
// then every dataset is transformed as x -> (x - mean) / (2 * std) with
// mean/std taken from `train` alone. Population (1/N) std.
inline NormalizationStats impute_and_normalize(TabularDataset& train,
                                               const std::vector<TabularDataset*>& others) {
  if (train.rows() == 0) throw std::invalid_argument("impute_and_normalize: empty training set");
  detail::impute_zero(train);
  for (TabularDataset* d : others) detail::impute_zero(*d);

  const std::size_t n = train.rows();
  const std::size_t fcount = train.feature_count();
  NormalizationStats stats;
  stats.mean.resize(fcount);
  stats.divisor.resize(fcount);
  for (std::size_t f = 0; f < fcount; ++f) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += train.features(r, f);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = train.features(r, f) - mean;
      sq += d * d;
    }
    const double std_dev = std::sqrt(sq / static_cast<double>(n));
    stats.mean[f] = mean;
    stats.divisor[f] = std_dev < 1e-12 ? 1.0 : 2.0 * std_dev;
  }
  detail::apply_stats(train, stats);
  for (TabularDataset* d : others) detail::apply_stats(*d, stats);
  return stats;
}

// Imputation without normalization (raw-data runs).
inline void impute_only(TabularDataset& train, const std::vector<TabularDataset*>& others) {
  detail::impute_zero(train);
  for (TabularDataset* d : others) detail::impute_zero(*d);
  train.normalized = true;
  for (TabularDataset* d : others) d->normalized = true;
}

struct SplitSpec {
  double validation_fraction = 0.20;
  std::uint64_t seed = 0;
};

namespace detail {

inline TabularDataset take_rows(const TabularDataset& data, const std::vector<std::size_t>& rows) {
  TabularDataset out;
  out.schema = data.schema;
  out.category_maps = data.category_maps;
  out.normalized = data.normalized;
  out.features = Matrix(rows.size(), data.feature_count());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < data.feature_count(); ++f) {
      out.features(i, f) = data.features(rows[i], f);
    }
    out.labels.push_back(data.labels[rows[i]]);
  }
  return out;
}

}  // namespace detail

// Random disjoint partition: floor(fraction * N) validation rows, the rest
// training, deterministic per seed.
inline std::pair<TabularDataset, TabularDataset> split_train_val(const TabularDataset& data,
                                                                 const SplitSpec& spec) {
  if (spec.validation_fraction <= 0.0 || spec.validation_fraction >= 1.0) {
    throw std::invalid_argument("split_train_val: fraction must be in (0,1)");
  }
  const std::size_t n = data.rows();
  if (n < 5) throw std::invalid_argument("split_train_val: need at least 5 rows");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  shuffle(order, rng);
  const auto val_size =
      static_cast<std::size_t>(std::floor(spec.validation_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train_rows(order.begin(), order.end() - static_cast<long>(val_size));
  std::vector<std::size_t> val_rows(order.end() - static_cast<long>(val_size), order.end());
  return {detail::take_rows(data, train_rows), detail::take_rows(data, val_rows)};
}

// Batches with the two classes equally represented, sampled with
// replacement. Construction fails on single-class data.
class BalancedBatchSampler {
 public:
  struct Batch {
    Matrix features;
    std::vector<BinaryLabel> labels;
  };

  BalancedBatchSampler(const TabularDataset& data, std::size_t batch_size, Rng rng)
      : data_(&data), rng_(rng) {
    if (batch_size < 2) throw std::invalid_argument("BalancedBatchSampler: batch_size must be >= 2");
    half_ = batch_size / 2;  // odd sizes round down
    for (std::size_t i = 0; i < data.rows(); ++i) {
      (data.labels[i].is_positive() ? positives_ : negatives_).push_back(i);
    }
    if (positives_.empty() || negatives_.empty()) {
      throw std::invalid_argument("BalancedBatchSampler: both classes must be present");
    }
  }

  std::size_t batch_size() const { return 2 * half_; }

  Batch next() {
    Batch batch;
    batch.features = Matrix(2 * half_, data_->feature_count());
    batch.labels.reserve(2 * half_);
    for (std::size_t i = 0; i < 2 * half_; ++i) {
      const auto& pool = i < half_ ? positives_ : negatives_;
      const std::size_t row = pool[uniform_u64(rng_, pool.size())];
      for (std::size_t f = 0; f < data_->feature_count(); ++f) {
        batch.features(i, f) = data_->features(row, f);
      }
      batch.labels.push_back(data_->labels[row]);
    }
    return batch;
  }

 private:
  const TabularDataset* data_;
  Rng rng_;
  std::size_t half_ = 0;
  std::vector<std::size_t> positives_;
  std::vector<std::size_t> negatives_;
};

// --- dataset manifests ------------------------------------------------

struct DatasetManifest {
  std::string train_path;
  std::string test_path;
  std::string schema_path;
};

// Relative paths resolve against `base_dir` first, then $BINOTAB_DATA_DIR.
inline std::string resolve_path(const std::string& path, const std::string& base_dir) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  const fs::path local = fs::path(base_dir) / p;
  if (fs::exists(local)) return local.string();
  if (const char* root = std::getenv("BINOTAB_DATA_DIR")) {
    const fs::path fallback = fs::path(root) / p;
    if (fs::exists(fallback)) return fallback.string();
    throw std::runtime_error("cannot find '" + path + "' (tried " + local.string() +
                             " and " + fallback.string() + ")");
  }
  throw std::runtime_error("cannot find '" + path + "' (tried " + local.string() +
                           "; BINOTAB_DATA_DIR not set)");
}

inline DatasetManifest load_manifest(const std::string& manifest_path) {
  const IniFile ini = IniFile::parse_file(manifest_path);
  const std::string base = std::filesystem::path(manifest_path).parent_path().string();
  DatasetManifest m;
  m.train_path = resolve_path(ini.get("data", "train"), base);
  m.test_path = resolve_path(ini.get("data", "test"), base);
  m.schema_path = resolve_path(ini.get("data", "schema"), base);
  return m;
}

struct LoadedData {
  TabularDataset train;
  TabularDataset test;
};

// Train is encoded first so its categories take the low codes; unseen test
// categories continue the numbering.
inline LoadedData load_dataset(const DatasetManifest& manifest) {
  const Schema schema = load_schema(manifest.schema_path);
  CategoryMaps maps;
  LoadedData out;
  out.train = load_csv(manifest.train_path, schema, maps);
  out.test = load_csv(manifest.test_path, schema, maps);
  out.test.category_maps = maps;
  return out;
}

}  // namespace binotab
