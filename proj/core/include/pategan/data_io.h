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

// Tabular data handling: metadata, CSV ingestion, min-max scaling, splits,
// teacher partitions and the worst-case audit dataset.

#ifndef PATEGAN_DATA_IO_H_
#define PATEGAN_DATA_IO_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pategan/matrix.h"
#include "pategan/rng.h"

namespace pategan {

enum class ColumnKind { kNumerical, kBinary };
enum class BoundsProvenance { kPublic, kEmpirical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumerical;
  double lower = 0.0;
  double upper = 1.0;
};

// Column layout of a dataset. Bounds with kPublic provenance are part of the
// data contract; kEmpirical bounds were read off the data itself and are not
// differentially private (a constant column then has lower == upper).
struct Metadata {
  std::vector<ColumnSpec> columns;
  size_t label_index = 0;
  BoundsProvenance bounds_provenance = BoundsProvenance::kPublic;

  size_t num_columns() const { return columns.size(); }

  // Throws ConfigError when an invariant is violated.
  void Validate() const;

  nlohmann::json ToJson() const;
  static Metadata FromJson(const nlohmann::json& j);
  static Metadata LoadJson(const std::string& path);
};

// N x d block of records bound to its metadata. Immutable after construction.
class Dataset {
 public:
  Dataset(Matrix rows, std::shared_ptr<const Metadata> meta);

  const Matrix& rows() const { return rows_; }
  const Metadata& meta() const { return *meta_; }
  const std::shared_ptr<const Metadata>& meta_ptr() const { return meta_; }
  size_t num_rows() const { return static_cast<size_t>(rows_.rows()); }
  size_t num_cols() const { return static_cast<size_t>(rows_.cols()); }

  // Rows at the given indices, in order (duplicates allowed).
  Dataset Select(std::span<const size_t> indices) const;
  // Same metadata, new rows.
  Dataset WithRows(Matrix rows) const;
  // Same rows, new metadata (widths must agree).
  Dataset WithMeta(std::shared_ptr<const Metadata> meta) const;

  // Every column except the label.
  Matrix Features() const;
  Vector Labels() const;

 private:
  Matrix rows_;
  std::shared_ptr<const Metadata> meta_;
};

// Comma-separated, header row required, '.' decimal separator, no quoting.
Dataset LoadCsv(const std::string& path, std::shared_ptr<const Metadata> meta);
Dataset ParseCsv(std::istream& in, std::shared_ptr<const Metadata> meta);
// Writes header + rows using shortest round-trip number formatting.
void WriteCsv(const Dataset& ds, std::ostream& out);

enum class ScaleDirection { kForward, kInverse };

// Forward maps x -> (x - lower) / (upper - lower) per column; kInverse is the
// exact inverse. Binary columns with bounds [0, 1] are unchanged. A
// zero-width column is only legal under empirical bounds, where forward maps
// to 0 and inverse maps everything back to the constant.
Dataset ScaleMinMax(const Dataset& ds, ScaleDirection direction);

struct EmpiricalFit {
  Metadata meta;
  // Machine-readable (JSON) warning: these bounds leak the data extremes.
  std::string warning;
};

// Per-column min/max of the data itself, kind and names copied from the
// dataset's metadata. Not differentially private.
EmpiricalFit FitEmpiricalBounds(const Dataset& ds);

// Clamps every value into its column bounds (used for held-out data scaled
// with bounds fitted elsewhere).
Dataset ClampToBounds(const Dataset& ds);

// Shuffled disjoint split; the first floor(train_fraction * N) shuffled rows
// form the training side.
std::pair<Dataset, Dataset> SplitTrainTest(const Dataset& ds,
                                           double train_fraction,
                                           uint64_t seed);

enum class PartitionMode { kDisjoint, kAllLast, kResampleAll };

// Which records each of the k teachers may read.
class TeacherPartition {
 public:
  TeacherPartition(PartitionMode mode, std::vector<std::vector<size_t>> views,
                   size_t num_records);

  PartitionMode mode() const { return mode_; }
  size_t num_teachers() const { return views_.size(); }
  size_t num_records() const { return num_records_; }

  // Record indices visible to teacher i. Under kResampleAll that is every
  // record.
  std::span<const size_t> View(size_t teacher) const;

  // Draws n record indices uniformly with replacement from View(teacher).
  std::vector<size_t> SampleBatch(size_t teacher, size_t n, Rng& rng) const;

 private:
  PartitionMode mode_;
  std::vector<std::vector<size_t>> views_;
  size_t num_records_;
};

// kDisjoint: shuffle, then cut into k blocks where the first (N mod k) blocks
// get one extra record. kAllLast: every teacher gets the final block of that
// split. kResampleAll: every teacher samples the full dataset.
TeacherPartition PartitionTeachers(const Dataset& ds, size_t k,
                                   PartitionMode mode, uint64_t seed);

struct WorstCase {
  Dataset data;     // n_repeat copies of (0, 0, 0)
  RowVector target; // (1, 1, 1)
};

// Three binary columns; the last one doubles as the label.
WorstCase BuildWorstCase(size_t n_repeat);

// `data` with `target` appended as the last row.
Dataset AppendRecord(const Dataset& data, const RowVector& record);
// `data` without the first row equal to `record`. Throws DataError if absent.
Dataset RemoveRecord(const Dataset& data, const RowVector& record);

// Indices of the n records farthest (Euclidean, on the rows as given) from
// the column means, farthest first; ties keep the lower index first.
std::vector<size_t> FarthestFromMean(const Dataset& ds, size_t n);

const char* ToString(PartitionMode mode);
PartitionMode PartitionModeFromString(const std::string& name);

}  // namespace pategan

#endif  // PATEGAN_DATA_IO_H_
