#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfm/matrix.hpp"
#include "tfm/tensor.hpp"

namespace tfm::io {

enum class Format { LongCsv, DenseBinary };

Format parse_format(const std::string& name);

/// A series read from disk, with the observation mask of a long-format
/// ingestion. Cells absent from the file are zero-filled (the estimators
/// consume the zero-filled values; the mask is retained for callers).
struct LoadedSeries {
  TensorSeries series;
  std::vector<std::vector<std::uint8_t>> observed;  // [t][flat cell], 1 = present
  bool has_missing = false;
  std::vector<std::string> warnings;
};

LoadedSeries load_series(const std::string& path, Format format);

/// Long format: a header line "# tfm-long K=<K> dims=<d1,..,dK> T=<T>"
/// followed by "t,i_1,..,i_K,value" rows (1-based indices). Cells with an
/// all-false mask entry are omitted.
void save_series_long_csv(const std::string& path, const TensorSeries& x,
                          const std::vector<std::vector<std::uint8_t>>* observed = nullptr);

/// Dense binary: magic "TFTS", u32 version, u32 K, u64 dims[K], u64 T, then
/// T*d little-endian float64 slices in canonical flat order.
void save_series_dense(const std::string& path, const TensorSeries& x);

/// Plain numeric CSV, one matrix row per line.
Matrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const std::string& path, const Matrix& m);

/// Delimited table with a fixed column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void write_table(const std::string& path, const Table& table);
Table read_table(const std::string& path);

std::string format_double(double v);

}  // namespace tfm::io
