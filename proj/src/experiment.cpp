#include "tfm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

#include "tfm/diagnostics.hpp"
#include "tfm/error.hpp"
#include "tfm/rng.hpp"

namespace tfm::mc {
namespace {

// Desk-scale guardrail; the largest grid corners of the reference study are
// expensive enough to demand an explicit opt-in.
constexpr std::size_t kMaxCellDim = 1u << 14;
constexpr std::size_t kMaxCellT = 1u << 15;

est::Method parse_base_method(const std::string& name) {
  if (name == "TOPUP") return est::Method::TOPUP;
  if (name == "TIPUP") return est::Method::TIPUP;
  if (name == "iTOPUP") return est::Method::ITOPUP;
  if (name == "iTIPUP") return est::Method::ITIPUP;
  if (name == "UP") return est::Method::UP;
  throw UsageError("unknown method '" + name + "'");
}

struct Cell {
  std::size_t index;  // 1-based
  std::vector<std::size_t> dims;
  std::size_t T;
  double lambda;
};

std::vector<Cell> enumerate_cells(const ExperimentGrid& grid) {
  std::vector<Cell> cells;
  std::size_t index = 1;
  for (const auto& dims : grid.dim_values) {
    for (double lambda : grid.lambda_values) {
      for (std::size_t T : grid.T_values) {
        cells.push_back({index++, dims, T, lambda});
      }
    }
  }
  return cells;
}

void run_tasks(std::size_t count, std::size_t threads,
               const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        task(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

MethodSpec parse_method_label(const std::string& label, std::size_t default_h0) {
  MethodSpec spec;
  spec.label = label;
  std::string base = label;
  std::size_t digits = 0;
  while (digits < base.size() && std::isdigit(static_cast<unsigned char>(base[base.size() - 1 - digits]))) {
    ++digits;
  }
  spec.h0 = default_h0;
  if (digits > 0) {
    spec.h0 = static_cast<std::size_t>(std::stoull(base.substr(base.size() - digits)));
    base = base.substr(0, base.size() - digits);
    if (spec.h0 == 0) throw UsageError("method '" + label + "': h0 suffix must be >= 1");
  }
  spec.method = parse_base_method(base);
  return spec;
}

void validate(const ExperimentGrid& grid) {
  if (grid.T_values.empty() || grid.dim_values.empty() || grid.lambda_values.empty()) {
    throw UsageError("experiment grid needs T, dims and lambda values");
  }
  if (grid.methods.empty()) throw UsageError("experiment grid needs at least one method");
  if (grid.replicates < 1) throw UsageError("replicates must be >= 1");
  if (grid.ranks.empty()) throw UsageError("experiment grid needs ranks");
  for (std::size_t T : grid.T_values) {
    if (T < 2) throw UsageError("grid T values must be >= 2");
  }
  for (double lam : grid.lambda_values) {
    if (lam < 0.0) throw UsageError("grid lambda values must be >= 0");
  }
  for (const auto& dims : grid.dim_values) {
    if (dims.size() != grid.ranks.size()) {
      throw UsageError("grid dims and ranks must have the same order");
    }
  }
  if (!grid.force) {
    for (const auto& dims : grid.dim_values) {
      if (product(dims) > kMaxCellDim) {
        throw UsageError("grid cell exceeds d=2^14; rerun with --force to allow");
      }
    }
    for (std::size_t T : grid.T_values) {
      if (T > kMaxCellT) {
        throw UsageError("grid cell exceeds T=2^15; rerun with --force to allow");
      }
    }
  }
}

std::vector<RunRecord> run_experiment(const ExperimentGrid& grid, std::size_t threads) {
  validate(grid);
  const std::vector<Cell> cells = enumerate_cells(grid);
  const std::size_t M = grid.methods.size();
  const std::size_t R = grid.replicates;

  std::vector<RunRecord> records(cells.size() * M);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t m = 0; m < M; ++m) {
      RunRecord& rec = records[c * M + m];
      rec.cell_index = cells[c].index;
      rec.dims = cells[c].dims;
      rec.T = cells[c].T;
      rec.lambda = cells[c].lambda;
      rec.method_label = grid.methods[m].label;
      rec.method = grid.methods[m].method;
      rec.h0 = grid.methods[m].h0;
      rec.replicates.resize(R);
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  run_tasks(cells.size() * R, threads, [&](std::size_t task) {
    const std::size_t c = task / R;
    const std::size_t rep = task % R;
    const Cell& cell = cells[c];

    dgp::DgpSpec spec;
    spec.dims = cell.dims;
    spec.ranks = grid.ranks;
    spec.lambda = cell.lambda;
    spec.ar_coeffs = grid.ar_coeffs;
    spec.noise_offdiag = grid.noise_offdiag;
    spec.noise_scale = grid.noise_scale;
    spec.T = cell.T;
    spec.loading_mode = grid.loading_mode;
    spec.seed = rng::substream(grid.seed, cell.index, rep + 1);

    dgp::GeneratedSeries gen;
    std::string gen_error;
    try {
      gen = dgp::gen_series(spec);
    } catch (const Error& e) {
      gen_error = e.what();
    }

    for (std::size_t m = 0; m < M; ++m) {
      ReplicateLoss& slot = records[c * M + m].replicates[rep];
      slot.replicate = rep + 1;
      if (!gen_error.empty()) {
        slot.failed = true;
        slot.error = gen_error;
        continue;
      }
      try {
        est::ModelSpec model;
        model.ranks = grid.ranks;
        model.h0 = grid.methods[m].h0;
        model.method = grid.methods[m].method;
        model.max_iter = grid.max_iter;
        model.iter_tol = grid.iter_tol;
        const est::FactorEstimate fit = est::estimate(gen.x, model);
        slot.mode_loss.resize(cell.dims.size());
        for (std::size_t k = 0; k < cell.dims.size(); ++k) {
          slot.mode_loss[k] =
              diag::loss_projection(fit.projections[k], gen.truth.projections[k]);
        }
      } catch (const Error& e) {
        slot.failed = true;
        slot.error = e.what();
      }
    }
  });
  const auto t1 = std::chrono::steady_clock::now();
  const double wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
          .count();

  for (RunRecord& rec : records) {
    const std::size_t K = rec.dims.size();
    rec.mean_loss.assign(K, 0.0);
    rec.median_loss.assign(K, 0.0);
    rec.wall_ms = wall_ms;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> ok;
      ok.reserve(rec.replicates.size());
      for (const ReplicateLoss& r : rec.replicates) {
        if (!r.failed) ok.push_back(r.mode_loss[k]);
      }
      if (k == 0) rec.failures = rec.replicates.size() - ok.size();
      if (!ok.empty()) {
        double sum = 0.0;
        for (double v : ok) sum += v;
        rec.mean_loss[k] = sum / static_cast<double>(ok.size());
        rec.median_loss[k] = median(ok);
      }
    }
  }
  return records;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentGrid grid_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("'" + path + "': " + e.what());
  }

  ExperimentGrid grid;
  try {
    grid.T_values = j.at("T").get<std::vector<std::size_t>>();
    for (const auto& dims : j.at("dims")) {
      if (dims.is_number()) {
        // A scalar entry means a square K=2 cell.
        const auto d = dims.get<std::size_t>();
        grid.dim_values.push_back({d, d});
      } else {
        grid.dim_values.push_back(dims.get<std::vector<std::size_t>>());
      }
    }
    grid.lambda_values = j.at("lambda").get<std::vector<double>>();
    grid.ranks = j.at("ranks").get<std::vector<std::size_t>>();
    grid.ar_coeffs = j.at("ar").get<std::vector<double>>();
    grid.replicates = j.at("replicates").get<std::size_t>();
    grid.seed = j.at("seed").get<std::uint64_t>();

    const std::size_t default_h0 = j.value("h0", std::size_t{1});
    for (const auto& name : j.at("methods")) {
      grid.methods.push_back(parse_method_label(name.get<std::string>(), default_h0));
    }
    grid.noise_offdiag = j.value("noise_offdiag", 0.2);
    grid.noise_scale = j.value("noise_scale", 1.0);
    grid.max_iter = j.value("max_iter", std::size_t{50});
    grid.iter_tol = j.value("iter_tol", 1e-6);
    grid.force = j.value("force", false);
    const std::string mode = j.value("loading_mode", std::string("gaussian_normalized"));
    if (mode == "gaussian_normalized") {
      grid.loading_mode = dgp::LoadingMode::GaussianNormalized;
    } else if (mode == "orthonormal") {
      grid.loading_mode = dgp::LoadingMode::Orthonormal;
    } else {
      throw UsageError("unknown loading_mode '" + mode + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("'" + path + "': " + e.what());
  }
  return grid;
}

std::string grid_to_json(const ExperimentGrid& grid) {
  nlohmann::json j;
  j["T"] = grid.T_values;
  j["dims"] = grid.dim_values;
  j["lambda"] = grid.lambda_values;
  j["ranks"] = grid.ranks;
  j["ar"] = grid.ar_coeffs;
  j["replicates"] = grid.replicates;
  j["seed"] = grid.seed;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : grid.methods) methods.push_back(m.label);
  j["methods"] = methods;
  j["noise_offdiag"] = grid.noise_offdiag;
  j["noise_scale"] = grid.noise_scale;
  j["max_iter"] = grid.max_iter;
  j["iter_tol"] = grid.iter_tol;
  j["force"] = grid.force;
  j["loading_mode"] = grid.loading_mode == dgp::LoadingMode::GaussianNormalized
                          ? "gaussian_normalized"
                          : "orthonormal";
  return j.dump(2);
}

io::Table replicate_table(const std::vector<RunRecord>& records) {
  io::Table table;
  const std::size_t K = records.empty() ? 0 : records.front().dims.size();
  table.columns = {"method", "h0"};
  for (std::size_t k = 1; k <= K; ++k) table.columns.push_back("d" + std::to_string(k));
  for (const char* c : {"lambda", "T", "replicate", "mode", "loss", "failed"}) {
    table.columns.push_back(c);
  }
  for (const RunRecord& rec : records) {
    for (const ReplicateLoss& rep : rec.replicates) {
      for (std::size_t k = 1; k <= K; ++k) {
        std::vector<std::string> row;
        row.push_back(rec.method_label);
        row.push_back(std::to_string(rec.h0));
        for (std::size_t d : rec.dims) row.push_back(std::to_string(d));
        row.push_back(io::format_double(rec.lambda));
        row.push_back(std::to_string(rec.T));
        row.push_back(std::to_string(rep.replicate));
        row.push_back(std::to_string(k));
        row.push_back(rep.failed ? "" : io::format_double(rep.mode_loss[k - 1]));
        row.push_back(rep.failed ? "1" : "0");
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

io::Table cell_table(const std::vector<RunRecord>& records) {
  io::Table table;
  const std::size_t K = records.empty() ? 0 : records.front().dims.size();
  table.columns = {"method", "h0"};
  for (std::size_t k = 1; k <= K; ++k) table.columns.push_back("d" + std::to_string(k));
  for (const char* c : {"lambda", "T", "mode", "n_ok", "mean_loss", "median_loss"}) {
    table.columns.push_back(c);
  }
  for (const RunRecord& rec : records) {
    for (std::size_t k = 1; k <= K; ++k) {
      std::vector<std::string> row;
      row.push_back(rec.method_label);
      row.push_back(std::to_string(rec.h0));
      for (std::size_t d : rec.dims) row.push_back(std::to_string(d));
      row.push_back(io::format_double(rec.lambda));
      row.push_back(std::to_string(rec.T));
      row.push_back(std::to_string(k));
      row.push_back(std::to_string(rec.replicates.size() - rec.failures));
      row.push_back(io::format_double(rec.mean_loss[k - 1]));
      row.push_back(io::format_double(rec.median_loss[k - 1]));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace tfm::mc
