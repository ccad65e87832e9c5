#include "navseg/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "navseg/errors.hpp"

namespace navseg {

void SvmConfig::validate() const {
  if (!(c > 0.0)) throw ContractViolation("SVM penalty C must be positive");
  if (!(rbf_gamma > 0.0)) throw ContractViolation("RBF gamma must be positive");
  if (!(tolerance > 0.0)) throw ContractViolation("SVM tolerance must be positive");
  if (max_passes == 0) throw ContractViolation("max_passes must be positive");
}

double rbf_kernel(const FeatureVector& u, const FeatureVector& v, double gamma) {
  double d2 = 0;
  for (std::size_t k = 0; k < u.size(); ++k) d2 += (u[k] - v[k]) * (u[k] - v[k]);
  return std::exp(-gamma * d2);
}

FeatureScaler identity_scaler() {
  FeatureScaler s;
  s.min = {0.0, 0.0, 0.0};
  s.max = {1.0, 1.0, 1.0};
  return s;
}

DualSolution solve_dual(std::span<const TrainingSample> samples, const SvmConfig& cfg) {
  cfg.validate();
  const std::size_t n = samples.size();
  bool has_pos = false, has_neg = false;
  for (const auto& s : samples) (s.nav ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw TrainingError("training data must contain both navigation and non-navigation blocks");

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = samples[i].nav ? 1.0 : -1.0;
  auto q = [&](std::size_t i, std::size_t j) {
    return y[i] * y[j] * rbf_kernel(samples[i].x, samples[j].x, cfg.rbf_gamma);
  };

  const double C = cfg.c;
  constexpr double kTau = 1e-12;
  DualSolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double>& a = sol.alpha;
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  std::vector<double> row_i(n), row_j(n);

  auto in_up = [&](std::size_t t) { return (y[t] > 0 && a[t] < C) || (y[t] < 0 && a[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < C); };

  const std::uint64_t max_iter = static_cast<std::uint64_t>(cfg.max_passes) * std::max<std::size_t>(n, 1);
  while (sol.iterations < max_iter) {
    // Maximal violating pair; strict comparisons keep the lowest index on ties.
    std::size_t i = n, j = n;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    if (i == n || j == n || g_max - g_min < cfg.tolerance) {
      sol.converged = true;
      break;
    }
    ++sol.iterations;

    for (std::size_t t = 0; t < n; ++t) {
      row_i[t] = q(i, t);
      row_j[t] = q(j, t);
    }
    const double old_ai = a[i], old_aj = a[j];
    if (y[i] != y[j]) {
      double quad = row_i[i] + row_j[j] + 2.0 * row_i[j];
      if (quad <= 0) quad = kTau;
      double delta = (-grad[i] - grad[j]) / quad;
      double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = C - diff;
        }
      } else if (a[j] > C) {
        a[j] = C;
        a[i] = C + diff;
      }
    } else {
      double quad = row_i[i] + row_j[j] - 2.0 * row_i[j];
      if (quad <= 0) quad = kTau;
      double delta = (grad[i] - grad[j]) / quad;
      double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > C) {
        if (a[i] > C) {
          a[i] = C;
          a[j] = sum - C;
        }
      } else if (a[j] < 0) {
        a[j] = 0;
        a[i] = sum;
      }
      if (sum > C) {
        if (a[j] > C) {
          a[j] = C;
          a[i] = sum - C;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = sum;
      }
    }
    const double di = a[i] - old_ai, dj = a[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += row_i[t] * di + row_j[t] * dj;
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double yg = y[t] * grad[t];
    if (a[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (a[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
  sol.bias = -rho;
  return sol;
}

double dual_objective(std::span<const TrainingSample> samples, std::span<const double> alpha,
                      const SvmConfig& cfg) {
  double linear = 0, quad = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    linear += alpha[i];
    if (alpha[i] == 0) continue;
    double yi = samples[i].nav ? 1.0 : -1.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (alpha[j] == 0) continue;
      double yj = samples[j].nav ? 1.0 : -1.0;
      quad += alpha[i] * alpha[j] * yi * yj * rbf_kernel(samples[i].x, samples[j].x, cfg.rbf_gamma);
    }
  }
  return linear - 0.5 * quad;
}

SvmModel train(std::span<const TrainingSample> samples, const SvmConfig& cfg, const FeatureScaler& scaler) {
  DualSolution sol = solve_dual(samples, cfg);
  SvmModel model;
  model.config = cfg;
  model.scaler = scaler;
  model.bias = sol.bias;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (sol.alpha[i] <= 0) continue;
    model.support_vectors.push_back(samples[i].x);
    model.dual_coefs.push_back(samples[i].nav ? sol.alpha[i] : -sol.alpha[i]);
  }
  return model;
}

double SvmModel::decision_value(const FeatureVector& normalized) const {
  double sum = 0;
  for (std::size_t i = 0; i < support_vectors.size(); ++i)
    sum += dual_coefs[i] * rbf_kernel(support_vectors[i], normalized, config.rbf_gamma);
  return sum + bias;
}

Prediction predict(const SvmModel& model, const BlockFeatures& f) {
  Prediction p;
  p.decision_value = model.decision_value(apply_scaler(model.scaler, f));
  p.nav = p.decision_value > 0.0;
  return p;
}

}  // namespace navseg
