#include "tfm/ratefit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "tfm/diagnostics.hpp"
#include "tfm/error.hpp"
#include "tfm/rng.hpp"
#include "tfm/spectral.hpp"

namespace tfm::ratefit {
namespace {

constexpr double kGradTol = 1e-9;
constexpr std::size_t kMaxIter = 500;
constexpr std::size_t kNumStarts = 10;

// Internal parameter vector: (a1, c2, c3, c4, c5, a6, c7, c8, c9, c10) with
// c1 = 2^a1 and c6 = 2^a6.
using Params = std::array<double, 10>;

struct Design {
  // per record: (1, log2 d1, log2 d2, log2 lambda, log2 T) and log2 L
  std::vector<std::array<double, 5>> x;
  std::vector<double> log_loss;
};

Design build_design(const std::vector<RateRecord>& records) {
  Design d;
  d.x.reserve(records.size());
  d.log_loss.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RateRecord& r = records[i];
    if (!(r.mean_loss > 0.0)) {
      throw DataError("ratefit: record " + std::to_string(i + 1) +
                      " has non-positive loss");
    }
    if (!(r.d1 > 0.0) || !(r.d2 > 0.0) || !(r.lambda > 0.0) || !(r.T > 0.0)) {
      throw DataError("ratefit: record " + std::to_string(i + 1) +
                      " has non-positive configuration values");
    }
    d.x.push_back({1.0, std::log2(r.d1), std::log2(r.d2), std::log2(r.lambda),
                   std::log2(r.T)});
    d.log_loss.push_back(std::log2(r.mean_loss));
  }
  return d;
}

void check_preconditions(const std::vector<RateRecord>& records) {
  if (records.size() < 20) {
    throw DataError("ratefit: needs at least 20 records, got " +
                    std::to_string(records.size()));
  }
  std::set<double> ts, lams;
  for (const RateRecord& r : records) {
    ts.insert(r.T);
    lams.insert(r.lambda);
  }
  if (ts.size() < 3 || lams.size() < 3) {
    throw DataError("ratefit: needs >= 3 distinct values of T and of lambda");
  }
}

// Residuals, SSE and (optionally) the Jacobian at theta.
double evaluate(const Design& d, const Params& theta, std::vector<double>* residuals,
                std::vector<std::array<double, 10>>* jacobian) {
  const std::size_t n = d.x.size();
  double sse = 0.0;
  if (residuals) residuals->resize(n);
  if (jacobian) jacobian->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& xi = d.x[i];
    double u = theta[0], v = theta[5];
    for (std::size_t p = 1; p < 5; ++p) {
      u += theta[p] * xi[p];
      v += theta[5 + p] * xi[p];
    }
    const double m = std::max(u, v);
    const double eu = std::exp2(u - m);
    const double ev = std::exp2(v - m);
    const double log2sum = m + std::log2(eu + ev);
    const double res = d.log_loss[i] - log2sum;
    sse += res * res;
    if (residuals) (*residuals)[i] = res;
    if (jacobian) {
      const double wu = eu / (eu + ev);
      const double wv = 1.0 - wu;
      auto& ji = (*jacobian)[i];
      for (std::size_t p = 0; p < 5; ++p) {
        ji[p] = -wu * xi[p];
        ji[5 + p] = -wv * xi[p];
      }
    }
  }
  return sse;
}

struct StartOutcome {
  Params theta;
  double sse = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

StartOutcome run_gauss_newton(const Design& d, Params theta) {
  StartOutcome out;
  std::vector<double> res;
  std::vector<std::array<double, 10>> jac;
  double sse = evaluate(d, theta, &res, &jac);
  double mu = -1.0;

  for (std::size_t iter = 1; iter <= kMaxIter; ++iter) {
    out.iterations = iter;
    // Normal equations.
    Matrix jtj(10, 10);
    std::vector<double> g(10, 0.0);
    for (std::size_t i = 0; i < res.size(); ++i) {
      for (std::size_t p = 0; p < 10; ++p) {
        g[p] += jac[i][p] * res[i];
        for (std::size_t q = p; q < 10; ++q) jtj(p, q) += jac[i][p] * jac[i][q];
      }
    }
    for (std::size_t p = 0; p < 10; ++p)
      for (std::size_t q = 0; q < p; ++q) jtj(p, q) = jtj(q, p);

    double gmax = 0.0;
    for (double gi : g) gmax = std::max(gmax, std::fabs(gi));
    if (gmax < kGradTol) {
      out.converged = true;
      break;
    }

    if (mu < 0.0) {
      double dmax = 0.0;
      for (std::size_t p = 0; p < 10; ++p) dmax = std::max(dmax, jtj(p, p));
      mu = 1e-3 * std::max(dmax, 1e-12);
    }

    bool accepted = false;
    while (mu < 1e14) {
      Matrix damped = jtj;
      for (std::size_t p = 0; p < 10; ++p) damped(p, p) += mu;
      std::vector<double> rhs(10);
      for (std::size_t p = 0; p < 10; ++p) rhs[p] = -g[p];
      std::vector<double> step;
      try {
        step = spectral::solve_spd(damped, rhs);
      } catch (const NumericError&) {
        mu *= 10.0;
        continue;
      }
      Params trial = theta;
      for (std::size_t p = 0; p < 10; ++p) trial[p] += step[p];
      std::vector<double> trial_res;
      std::vector<std::array<double, 10>> trial_jac;
      const double trial_sse = evaluate(d, trial, &trial_res, &trial_jac);
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        theta = trial;
        sse = trial_sse;
        res = std::move(trial_res);
        jac = std::move(trial_jac);
        mu = std::max(mu * 0.3, 1e-12);
        accepted = true;
        break;
      }
      mu *= 3.0;
    }
    if (!accepted) break;  // damping exhausted; gradient not yet below tol
  }
  out.theta = theta;
  out.sse = sse;
  return out;
}

Params tipup_theory_start() {
  return {0.0, 0.5, 0.0, -1.0, -0.5, 0.0, 0.5, 0.5, -2.0, -0.5};
}

Params topup_theory_start() {
  return {0.0, 0.5, 0.5, -1.0, -0.5, 0.0, 0.5, 1.0, -2.0, -0.5};
}

std::vector<Params> make_starts() {
  std::vector<Params> starts;
  starts.push_back(tipup_theory_start());
  starts.push_back(topup_theory_start());
  starts.push_back({0.0, 0.0, 0.0, -0.5, -0.5, 0.0, 0.0, 0.0, -1.0, -0.5});
  rng::RandomStream stream(0x8a7efe11u);
  while (starts.size() < kNumStarts) {
    Params base = (starts.size() % 2 == 0) ? tipup_theory_start() : topup_theory_start();
    base[0] = stream.uniform(-1.0, 1.0);
    base[5] = stream.uniform(-1.0, 1.0);
    for (std::size_t p : {1, 2, 3, 4, 6, 7, 8, 9}) {
      base[p] += stream.uniform(-0.5, 0.5);
    }
    starts.push_back(base);
  }
  return starts;
}

std::array<double, 10> to_coefficients(const Params& theta) {
  std::array<double, 10> c;
  c[0] = std::exp2(theta[0]);
  c[5] = std::exp2(theta[5]);
  for (std::size_t p = 1; p < 5; ++p) {
    c[p] = theta[p];
    c[5 + p] = theta[5 + p];
  }
  return c;
}

}  // namespace

double rate_model_sse(const std::array<double, 10>& coefficients,
                      const std::vector<RateRecord>& records) {
  Params theta;
  theta[0] = std::log2(coefficients[0]);
  theta[5] = std::log2(coefficients[5]);
  for (std::size_t p = 1; p < 5; ++p) {
    theta[p] = coefficients[p];
    theta[5 + p] = coefficients[5 + p];
  }
  const Design d = build_design(records);
  return evaluate(d, theta, nullptr, nullptr);
}

RateFitResult fit_rate_model(const std::vector<RateRecord>& records) {
  check_preconditions(records);
  const Design d = build_design(records);

  StartOutcome best;
  bool have_best = false;
  for (const Params& start : make_starts()) {
    StartOutcome outcome = run_gauss_newton(d, start);
    // Strict-improvement rule with a relative margin: exact ties along flat
    // directions resolve to the earliest start, which places the
    // theoretical exponents first.
    if (!have_best || outcome.sse < best.sse * (1.0 - 1e-9)) {
      best = outcome;
      have_best = true;
    }
  }

  // Canonical block order: the term decaying slower in lambda comes first.
  if (best.theta[3] < best.theta[8]) {
    for (std::size_t p = 0; p < 5; ++p) std::swap(best.theta[p], best.theta[5 + p]);
  }

  RateFitResult result;
  result.coefficients = to_coefficients(best.theta);
  result.residual_sse = best.sse;
  result.iterations = best.iterations;
  result.converged = best.converged;
  return result;
}

std::vector<SurfaceRow> emit_rate_surface(const std::vector<RateRecord>& records,
                                          est::Method method) {
  std::map<std::pair<double, double>, SurfaceRow> grouped;
  for (const RateRecord& r : records) {
    if (!(r.mean_loss > 0.0)) throw DataError("rate surface: non-positive loss");
    const diag::RatePair rate = diag::predicted_rate(method, r.d1, r.d2, r.lambda, r.T);
    const double x = std::log2(rate.term1);
    const double y = std::log2(rate.term2);
    SurfaceRow& row = grouped[{x, y}];
    row.x = x;
    row.y = y;
    row.z += std::log2(r.mean_loss);
    row.count += 1;
  }
  std::vector<SurfaceRow> rows;
  rows.reserve(grouped.size());
  for (auto& [key, row] : grouped) {
    row.z /= static_cast<double>(row.count);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tfm::ratefit
