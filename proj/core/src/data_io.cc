// Copyright 2026 The PATE-GAN Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pategan/data_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "pategan/errors.h"

namespace pategan {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitCommas(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(Trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(Trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double ParseCell(const std::string& cell, size_t line_no, size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw DataError("non-numeric cell '" + cell + "' at line " +
                    std::to_string(line_no) + ", column " +
                    std::to_string(col));
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite cell at line " + std::to_string(line_no) +
                    ", column " + std::to_string(col));
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool IsBinaryValue(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

void Metadata::Validate() const {
  if (columns.size() < 2) {
    throw ConfigError("metadata needs at least 2 columns");
  }
  if (label_index >= columns.size()) {
    throw ConfigError("label_index out of range");
  }
  if (columns[label_index].kind != ColumnKind::kBinary) {
    throw ConfigError("label column '" + columns[label_index].name +
                      "' must be binary");
  }
  std::set<std::string> names;
  for (const ColumnSpec& c : columns) {
    if (!names.insert(c.name).second) {
      throw ConfigError("duplicate column name '" + c.name + "'");
    }
    if (!std::isfinite(c.lower) || !std::isfinite(c.upper)) {
      throw ConfigError("non-finite bounds for column '" + c.name + "'");
    }
    if (bounds_provenance == BoundsProvenance::kPublic) {
      if (c.kind == ColumnKind::kBinary && (c.lower != 0.0 || c.upper != 1.0)) {
        throw ConfigError("binary column '" + c.name +
                          "' must have bounds [0, 1]");
      }
      if (c.kind == ColumnKind::kNumerical && !(c.lower < c.upper)) {
        throw ConfigError("column '" + c.name + "' needs lower < upper");
      }
    } else {
      if (!(c.lower <= c.upper)) {
        throw ConfigError("column '" + c.name + "' needs lower <= upper");
      }
      if (c.kind == ColumnKind::kBinary && (c.lower < 0.0 || c.upper > 1.0)) {
        throw ConfigError("binary column '" + c.name +
                          "' bounds must lie in [0, 1]");
      }
    }
  }
}

nlohmann::json Metadata::ToJson() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const ColumnSpec& c : columns) {
    cols.push_back({{"name", c.name},
                    {"kind", c.kind == ColumnKind::kBinary ? "binary"
                                                           : "numerical"},
                    {"lower", c.lower},
                    {"upper", c.upper}});
  }
  return {{"columns", cols},
          {"label_index", label_index},
          {"bounds_provenance", bounds_provenance == BoundsProvenance::kPublic
                                    ? "public"
                                    : "empirical"}};
}

Metadata Metadata::FromJson(const nlohmann::json& j) {
  Metadata meta;
  try {
    for (const auto& c : j.at("columns")) {
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      const std::string kind = c.at("kind").get<std::string>();
      if (kind == "binary") {
        spec.kind = ColumnKind::kBinary;
        spec.lower = c.value("lower", 0.0);
        spec.upper = c.value("upper", 1.0);
      } else if (kind == "numerical") {
        spec.kind = ColumnKind::kNumerical;
        spec.lower = c.at("lower").get<double>();
        spec.upper = c.at("upper").get<double>();
      } else {
        throw ConfigError("unknown column kind '" + kind + "'");
      }
      meta.columns.push_back(std::move(spec));
    }
    meta.label_index = j.at("label_index").get<size_t>();
    const std::string prov = j.value("bounds_provenance", "public");
    if (prov == "public") {
      meta.bounds_provenance = BoundsProvenance::kPublic;
    } else if (prov == "empirical") {
      meta.bounds_provenance = BoundsProvenance::kEmpirical;
    } else {
      throw ConfigError("unknown bounds_provenance '" + prov + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed metadata: ") + e.what());
  }
  meta.Validate();
  return meta;
}

Metadata Metadata::LoadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metadata file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("metadata file '" + path + "' is not JSON: " + e.what());
  }
  return FromJson(j);
}

Dataset::Dataset(Matrix rows, std::shared_ptr<const Metadata> meta)
    : rows_(std::move(rows)), meta_(std::move(meta)) {
  if (!meta_) throw ConfigError("dataset needs metadata");
  if (rows_.rows() < 1) throw DataError("dataset must have at least one row");
  if (static_cast<size_t>(rows_.cols()) != meta_->num_columns()) {
    throw DataError("row width " + std::to_string(rows_.cols()) +
                    " does not match metadata column count " +
                    std::to_string(meta_->num_columns()));
  }
}

Dataset Dataset::Select(std::span<const size_t> indices) const {
  Matrix out(indices.size(), rows_.cols());
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= num_rows()) throw DataError("row index out of range");
    out.row(i) = rows_.row(indices[i]);
  }
  return Dataset(std::move(out), meta_);
}

Dataset Dataset::WithRows(Matrix rows) const {
  return Dataset(std::move(rows), meta_);
}

Dataset Dataset::WithMeta(std::shared_ptr<const Metadata> meta) const {
  return Dataset(rows_, std::move(meta));
}

Matrix Dataset::Features() const {
  const size_t d = num_cols();
  const size_t label = meta_->label_index;
  Matrix x(rows_.rows(), d - 1);
  for (size_t c = 0, out = 0; c < d; ++c) {
    if (c == label) continue;
    x.col(out++) = rows_.col(c);
  }
  return x;
}

Vector Dataset::Labels() const { return rows_.col(meta_->label_index); }

Dataset ParseCsv(std::istream& in, std::shared_ptr<const Metadata> meta) {
  if (!meta) throw ConfigError("ParseCsv needs metadata");
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header row");
  const std::vector<std::string> header = SplitCommas(line);
  const size_t d = meta->num_columns();
  bool header_ok = header.size() == d;
  for (size_t c = 0; header_ok && c < d; ++c) {
    header_ok = header[c] == meta->columns[c].name;
  }
  if (!header_ok) {
    std::string expected;
    for (size_t c = 0; c < d; ++c) {
      expected += (c ? "," : "") + meta->columns[c].name;
    }
    throw DataError("header mismatch: expected '" + expected + "', got '" +
                    Trim(line) + "'");
  }

  std::vector<double> values;
  size_t n = 0;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitCommas(line);
    if (cells.size() != d) {
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(d));
    }
    for (size_t c = 0; c < d; ++c) {
      const double v = ParseCell(cells[c], line_no, c);
      const ColumnSpec& spec = meta->columns[c];
      if (spec.kind == ColumnKind::kBinary && !IsBinaryValue(v)) {
        throw DataError("binary domain violation in column '" + spec.name +
                        "' at line " + std::to_string(line_no));
      }
      if (meta->bounds_provenance == BoundsProvenance::kPublic &&
          (v < spec.lower || v > spec.upper)) {
        throw DataError("value outside declared bounds in column '" +
                        spec.name + "' at line " + std::to_string(line_no));
      }
      values.push_back(v);
    }
    ++n;
  }
  if (n == 0) throw DataError("CSV has no data rows");
  Matrix rows(n, d);
  std::copy(values.begin(), values.end(), rows.data());
  return Dataset(std::move(rows), std::move(meta));
}

Dataset LoadCsv(const std::string& path, std::shared_ptr<const Metadata> meta) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return ParseCsv(in, std::move(meta));
}

void WriteCsv(const Dataset& ds, std::ostream& out) {
  const Metadata& meta = ds.meta();
  for (size_t c = 0; c < meta.num_columns(); ++c) {
    out << (c ? "," : "") << meta.columns[c].name;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < ds.rows().rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.rows().cols(); ++c) {
      out << (c ? "," : "") << FormatDouble(ds.rows()(r, c));
    }
    out << '\n';
  }
}

Dataset ScaleMinMax(const Dataset& ds, ScaleDirection direction) {
  const Metadata& meta = ds.meta();
  const bool empirical = meta.bounds_provenance == BoundsProvenance::kEmpirical;
  Matrix out = ds.rows();
  for (size_t c = 0; c < meta.num_columns(); ++c) {
    const ColumnSpec& spec = meta.columns[c];
    const double width = spec.upper - spec.lower;
    if (!(width > 0.0) && !empirical) {
      throw DataError("zero-width bounds for column '" + spec.name + "'");
    }
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      double& v = out(r, c);
      if (direction == ScaleDirection::kForward) {
        if (v < spec.lower || v > spec.upper) {
          throw DataError("value " + FormatDouble(v) + " outside bounds of '" +
                          spec.name + "'");
        }
        v = width > 0.0 ? (v - spec.lower) / width : 0.0;
      } else {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw DataError("inverse scaling expects values in [0, 1]");
        }
        v = width > 0.0 ? spec.lower + v * width : spec.lower;
      }
    }
  }
  return ds.WithRows(std::move(out));
}

EmpiricalFit FitEmpiricalBounds(const Dataset& ds) {
  auto meta = ds.meta();
  meta.bounds_provenance = BoundsProvenance::kEmpirical;
  for (size_t c = 0; c < meta.num_columns(); ++c) {
    meta.columns[c].lower = ds.rows().col(c).minCoeff();
    meta.columns[c].upper = ds.rows().col(c).maxCoeff();
  }
  meta.Validate();
  nlohmann::json warning = {
      {"warning", "non_private_bounds"},
      {"detail",
       "column bounds were computed from the data without differential "
       "privacy and reveal its extremes"},
      {"columns", meta.num_columns()}};
  return {std::move(meta), warning.dump()};
}

Dataset ClampToBounds(const Dataset& ds) {
  Matrix out = ds.rows();
  const Metadata& meta = ds.meta();
  for (size_t c = 0; c < meta.num_columns(); ++c) {
    out.col(c) = out.col(c).cwiseMax(meta.columns[c].lower)
                     .cwiseMin(meta.columns[c].upper);
  }
  return ds.WithRows(std::move(out));
}

std::pair<Dataset, Dataset> SplitTrainTest(const Dataset& ds,
                                           double train_fraction,
                                           uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  const size_t n = ds.num_rows();
  const auto n_train = static_cast<size_t>(std::floor(train_fraction * n));
  if (n_train == 0 || n_train == n) {
    throw ConfigError("train_fraction " + FormatDouble(train_fraction) +
                      " leaves one side of the split empty for N=" +
                      std::to_string(n));
  }
  Rng rng(seed);
  const std::vector<size_t> perm = rng.Permutation(n);
  std::span<const size_t> all(perm);
  return {ds.Select(all.subspan(0, n_train)), ds.Select(all.subspan(n_train))};
}

TeacherPartition::TeacherPartition(PartitionMode mode,
                                   std::vector<std::vector<size_t>> views,
                                   size_t num_records)
    : mode_(mode), views_(std::move(views)), num_records_(num_records) {}

std::span<const size_t> TeacherPartition::View(size_t teacher) const {
  if (teacher >= views_.size()) throw ConfigError("teacher index out of range");
  return views_[teacher];
}

std::vector<size_t> TeacherPartition::SampleBatch(size_t teacher, size_t n,
                                                  Rng& rng) const {
  const std::span<const size_t> view = View(teacher);
  std::vector<size_t> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = view[rng.UniformInt(view.size())];
  return out;
}

TeacherPartition PartitionTeachers(const Dataset& ds, size_t k,
                                   PartitionMode mode, uint64_t seed) {
  const size_t n = ds.num_rows();
  if (k < 1) throw ConfigError("need at least one teacher");
  if (k > n) {
    throw ConfigError("more teachers (" + std::to_string(k) + ") than records (" +
                      std::to_string(n) + ")");
  }
  if (mode == PartitionMode::kResampleAll) {
    std::vector<size_t> all(n);
    std::iota(all.begin(), all.end(), size_t{0});
    return TeacherPartition(mode, std::vector<std::vector<size_t>>(k, all), n);
  }
  Rng rng(seed);
  const std::vector<size_t> perm = rng.Permutation(n);
  std::vector<std::vector<size_t>> blocks(k);
  const size_t base = n / k;
  const size_t extra = n % k;
  size_t pos = 0;
  for (size_t i = 0; i < k; ++i) {
    const size_t size = base + (i < extra ? 1 : 0);
    blocks[i].assign(perm.begin() + pos, perm.begin() + pos + size);
    pos += size;
  }
  if (mode == PartitionMode::kAllLast) {
    std::vector<std::vector<size_t>> views(k, blocks.back());
    return TeacherPartition(mode, std::move(views), n);
  }
  return TeacherPartition(mode, std::move(blocks), n);
}

WorstCase BuildWorstCase(size_t n_repeat) {
  if (n_repeat < 1) throw ConfigError("n_repeat must be at least 1");
  auto meta = std::make_shared<Metadata>();
  for (const char* name : {"x0", "x1", "y"}) {
    meta->columns.push_back({name, ColumnKind::kBinary, 0.0, 1.0});
  }
  meta->label_index = 2;
  meta->bounds_provenance = BoundsProvenance::kPublic;
  meta->Validate();
  RowVector target = RowVector::Ones(3);
  return {Dataset(Matrix::Zero(n_repeat, 3), std::move(meta)),
          std::move(target)};
}

Dataset AppendRecord(const Dataset& data, const RowVector& record) {
  if (static_cast<size_t>(record.size()) != data.num_cols()) {
    throw DataError("record width does not match dataset");
  }
  Matrix rows(data.num_rows() + 1, data.num_cols());
  rows.topRows(data.num_rows()) = data.rows();
  rows.row(data.num_rows()) = record;
  return data.WithRows(std::move(rows));
}

Dataset RemoveRecord(const Dataset& data, const RowVector& record) {
  for (size_t i = 0; i < data.num_rows(); ++i) {
    if (data.rows().row(i) == record) {
      std::vector<size_t> keep;
      keep.reserve(data.num_rows() - 1);
      for (size_t j = 0; j < data.num_rows(); ++j) {
        if (j != i) keep.push_back(j);
      }
      if (keep.empty()) throw DataError("removing the record empties the dataset");
      return data.Select(keep);
    }
  }
  throw DataError("target record is not in the dataset");
}

std::vector<size_t> FarthestFromMean(const Dataset& ds, size_t n) {
  if (n > ds.num_rows()) {
    throw ConfigError("asked for " + std::to_string(n) + " candidates from " +
                      std::to_string(ds.num_rows()) + " records");
  }
  const RowVector mean = ds.rows().colwise().mean();
  std::vector<double> dist(ds.num_rows());
  for (size_t i = 0; i < ds.num_rows(); ++i) {
    dist[i] = (ds.rows().row(i) - mean).squaredNorm();
  }
  std::vector<size_t> idx(ds.num_rows());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return dist[a] > dist[b]; });
  idx.resize(n);
  return idx;
}

const char* ToString(PartitionMode mode) {
  switch (mode) {
    case PartitionMode::kDisjoint:
      return "disjoint";
    case PartitionMode::kAllLast:
      return "all_last";
    case PartitionMode::kResampleAll:
      return "resample_all";
  }
  return "?";
}

PartitionMode PartitionModeFromString(const std::string& name) {
  if (name == "disjoint") return PartitionMode::kDisjoint;
  if (name == "all_last") return PartitionMode::kAllLast;
  if (name == "resample_all") return PartitionMode::kResampleAll;
  throw ConfigError("unknown partition mode '" + name + "'");
}

}  // namespace pategan
