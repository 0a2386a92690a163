#include "tfm/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tfm/error.hpp"

namespace tfm::io {
namespace {

constexpr char kMagic[4] = {'T', 'F', 'T', 'S'};
constexpr std::uint32_t kBinaryVersion = 1;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  std::size_t e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != trimmed(s).size() && pos != s.size()) {
      throw std::invalid_argument("trailing text");
    }
    return v;
  } catch (const std::exception&) {
    throw IngestionError("row " + std::to_string(row) + ": cannot parse number '" + s + "'");
  }
}

std::size_t parse_index(const std::string& s, std::size_t row) {
  try {
    const long long v = std::stoll(trimmed(s));
    if (v < 0) throw std::invalid_argument("negative");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw IngestionError("row " + std::to_string(row) + ": cannot parse index '" + s + "'");
  }
}

struct LongHeader {
  std::size_t K = 0;
  std::vector<std::size_t> dims;
  std::size_t T = 0;
};

LongHeader parse_long_header(const std::string& line) {
  LongHeader h;
  std::istringstream ss(line);
  std::string tok;
  ss >> tok;  // '#'
  if (tok != "#") throw IngestionError("long-csv header must start with '# tfm-long'");
  ss >> tok;
  if (tok != "tfm-long") throw IngestionError("long-csv header must start with '# tfm-long'");
  bool saw_k = false, saw_dims = false, saw_t = false;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw IngestionError("malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "K") {
      h.K = parse_index(val, 1);
      saw_k = true;
    } else if (key == "dims") {
      for (const std::string& d : split(val, ',')) h.dims.push_back(parse_index(d, 1));
      saw_dims = true;
    } else if (key == "T") {
      h.T = parse_index(val, 1);
      saw_t = true;
    } else {
      throw IngestionError("unknown header key '" + key + "'");
    }
  }
  if (!saw_k || !saw_dims || !saw_t) {
    throw IngestionError("long-csv header must declare K, dims and T");
  }
  if (h.K == 0 || h.dims.size() != h.K) {
    throw IngestionError("long-csv header: dims list does not match K");
  }
  if (h.T == 0) throw IngestionError("long-csv header: T must be >= 1");
  for (std::size_t d : h.dims) {
    if (d == 0) throw IngestionError("long-csv header: dims must be positive");
  }
  return h;
}

LoadedSeries load_long_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("'" + path + "' is empty");
  const LongHeader header = parse_long_header(line);

  const std::size_t d = product(header.dims);
  LoadedSeries out;
  out.series = TensorSeries(header.dims, header.T);
  out.observed.assign(header.T, std::vector<std::uint8_t>(d, 0));

  std::vector<std::size_t> strides(header.K, 1);
  for (std::size_t m = 1; m < header.K; ++m)
    strides[m] = strides[m - 1] * header.dims[m - 1];

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string body = trimmed(line);
    if (body.empty() || body[0] == '#') continue;
    if (row == 2 && body.rfind("t,", 0) == 0) continue;  // optional column header
    const auto fields = split(body, ',');
    if (fields.size() != header.K + 2) {
      throw IngestionError("row " + std::to_string(row) + ": expected " +
                           std::to_string(header.K + 2) + " fields, got " +
                           std::to_string(fields.size()));
    }
    const std::size_t t = parse_index(fields[0], row);
    if (t < 1 || t > header.T) {
      throw IngestionError("row " + std::to_string(row) + ": t=" + fields[0] +
                           " outside 1.." + std::to_string(header.T));
    }
    std::size_t flat = 0;
    for (std::size_t m = 0; m < header.K; ++m) {
      const std::size_t idx = parse_index(fields[1 + m], row);
      if (idx < 1 || idx > header.dims[m]) {
        throw IngestionError("row " + std::to_string(row) + ": i_" +
                             std::to_string(m + 1) + "=" + fields[1 + m] +
                             " outside 1.." + std::to_string(header.dims[m]));
      }
      flat += (idx - 1) * strides[m];
    }
    const double value = parse_double(fields[header.K + 1], row);
    if (out.observed[t - 1][flat]) {
      out.warnings.push_back("row " + std::to_string(row) +
                             ": duplicate cell, last value wins");
    }
    out.observed[t - 1][flat] = 1;
    out.series.slice(t - 1).data()[flat] = value;
  }

  for (const auto& slice : out.observed) {
    for (std::uint8_t obs : slice) {
      if (!obs) {
        out.has_missing = true;
        break;
      }
    }
    if (out.has_missing) break;
  }
  return out;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IngestionError("'" + path + "': truncated dense-binary file");
  }
  return v;
}

LoadedSeries load_dense(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw IngestionError("'" + path + "' is not a TFTS dense-binary file");
  }
  const auto version = read_raw<std::uint32_t>(in, path);
  if (version != kBinaryVersion) {
    throw IngestionError("'" + path + "': unsupported TFTS version " +
                         std::to_string(version));
  }
  const auto k = read_raw<std::uint32_t>(in, path);
  if (k == 0 || k > 64) throw IngestionError("'" + path + "': bad tensor order");
  std::vector<std::size_t> dims(k);
  for (auto& d : dims) {
    d = static_cast<std::size_t>(read_raw<std::uint64_t>(in, path));
    if (d == 0) throw IngestionError("'" + path + "': zero dimension");
  }
  const auto T = static_cast<std::size_t>(read_raw<std::uint64_t>(in, path));
  if (T == 0) throw IngestionError("'" + path + "': zero-length series");

  LoadedSeries out;
  out.series = TensorSeries(dims, T);
  const std::size_t d = product(dims);
  for (std::size_t t = 0; t < T; ++t) {
    if (!in.read(reinterpret_cast<char*>(out.series.slice(t).data()),
                 static_cast<std::streamsize>(d * sizeof(double)))) {
      throw IngestionError("'" + path + "': truncated payload at slice " +
                           std::to_string(t + 1));
    }
  }
  return out;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "long-csv") return Format::LongCsv;
  if (name == "dense-binary") return Format::DenseBinary;
  throw UsageError("unknown series format '" + name + "' (long-csv | dense-binary)");
}

LoadedSeries load_series(const std::string& path, Format format) {
  switch (format) {
    case Format::LongCsv: return load_long_csv(path);
    case Format::DenseBinary: return load_dense(path);
  }
  throw UsageError("unreachable format");
}

void save_series_long_csv(const std::string& path, const TensorSeries& x,
                          const std::vector<std::vector<std::uint8_t>>* observed) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  const std::size_t K = x.order();
  out << "# tfm-long K=" << K << " dims=";
  for (std::size_t m = 0; m < K; ++m) out << (m ? "," : "") << x.shape()[m];
  out << " T=" << x.length() << "\n";
  out << "t";
  for (std::size_t m = 1; m <= K; ++m) out << ",i" << m;
  out << ",value\n";

  std::vector<std::size_t> idx(K, 0);
  const std::size_t d = product(x.shape());
  for (std::size_t t = 0; t < x.length(); ++t) {
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t flat = 0; flat < d; ++flat) {
      if (!observed || (*observed)[t][flat]) {
        out << (t + 1);
        for (std::size_t m = 0; m < K; ++m) out << ',' << (idx[m] + 1);
        out << ',' << format_double(x.slice(t).data()[flat]) << "\n";
      }
      for (std::size_t m = 0; m < K; ++m) {
        if (++idx[m] < x.shape()[m]) break;
        idx[m] = 0;
      }
    }
  }
}

void save_series_dense(const std::string& path, const TensorSeries& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  out.write(kMagic, 4);
  write_raw(out, kBinaryVersion);
  write_raw(out, static_cast<std::uint32_t>(x.order()));
  for (std::size_t d : x.shape()) write_raw(out, static_cast<std::uint64_t>(d));
  write_raw(out, static_cast<std::uint64_t>(x.length()));
  for (std::size_t t = 0; t < x.length(); ++t) {
    out.write(reinterpret_cast<const char*>(x.slice(t).data()),
              static_cast<std::streamsize>(x.slice(t).size() * sizeof(double)));
  }
  if (!out) throw IngestionError("failed while writing '" + path + "'");
}

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string body = trimmed(line);
    if (body.empty() || body[0] == '#') continue;
    std::vector<double> vals;
    for (const std::string& f : split(body, ',')) vals.push_back(parse_double(f, row));
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw IngestionError("row " + std::to_string(row) + ": ragged matrix row");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw IngestionError("'" + path + "' holds no matrix rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << (j ? "," : "") << format_double(m(i, j));
    }
    out << "\n";
  }
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    out << (j ? "," : "") << table.columns[j];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw DataError("table row width does not match header");
    }
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << "\n";
  }
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("'" + path + "' is empty");
  table.columns = split(trimmed(line), ',');
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const std::string body = trimmed(line);
    if (body.empty()) continue;
    auto fields = split(body, ',');
    if (fields.size() != table.columns.size()) {
      throw IngestionError("row " + std::to_string(row) + ": expected " +
                           std::to_string(table.columns.size()) + " fields");
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

}  // namespace tfm::io
