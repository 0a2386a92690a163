#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfm/dgp.hpp"
#include "tfm/estimators.hpp"
#include "tfm/io.hpp"

namespace tfm::mc {

/// One estimation method within a grid run. Labels follow the TOPUP1 /
/// TIPUP2 convention: a digit suffix overrides the lag window.
struct MethodSpec {
  est::Method method = est::Method::TIPUP;
  std::size_t h0 = 1;
  std::string label;
};

MethodSpec parse_method_label(const std::string& label, std::size_t default_h0);

struct ExperimentGrid {
  std::vector<std::size_t> T_values;
  std::vector<std::vector<std::size_t>> dim_values;
  std::vector<double> lambda_values;
  std::vector<MethodSpec> methods;

  std::vector<std::size_t> ranks;
  std::vector<double> ar_coeffs;
  double noise_offdiag = 0.2;
  double noise_scale = 1.0;
  dgp::LoadingMode loading_mode = dgp::LoadingMode::GaussianNormalized;

  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::size_t max_iter = 50;
  double iter_tol = 1e-6;
  bool force = false;  // lift the desk-scale guardrail
};

void validate(const ExperimentGrid& grid);

struct ReplicateLoss {
  std::size_t replicate = 0;            // 1-based
  std::vector<double> mode_loss;        // per mode, projection distance
  bool failed = false;
  std::string error;
};

struct RunRecord {
  std::size_t cell_index = 0;  // 1-based, canonical cell order
  std::vector<std::size_t> dims;
  std::size_t T = 0;
  double lambda = 0.0;
  std::string method_label;
  est::Method method = est::Method::TIPUP;
  std::size_t h0 = 1;
  std::vector<ReplicateLoss> replicates;
  std::vector<double> mean_loss;    // per mode, over successful replicates
  std::vector<double> median_loss;  // per mode
  std::size_t failures = 0;
  double wall_ms = 0.0;             // informational; excluded from tables
};

/// Runs every (cell, replicate) of the grid, estimating each method on the
/// same generated data. Replicates fan out to `threads` workers (0 =
/// hardware concurrency); outputs are identical for any worker count.
std::vector<RunRecord> run_experiment(const ExperimentGrid& grid,
                                      std::size_t threads = 0);

ExperimentGrid grid_from_json_file(const std::string& path);
std::string grid_to_json(const ExperimentGrid& grid);

/// Per-replicate loss table: method,h0,d1..dK,lambda,T,replicate,mode,loss.
io::Table replicate_table(const std::vector<RunRecord>& records);

/// Aggregated cell table: method,h0,d1..dK,lambda,T,mode,n_ok,mean_loss,
/// median_loss.
io::Table cell_table(const std::vector<RunRecord>& records);

double median(std::vector<double> values);

}  // namespace tfm::mc
