#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "navseg/features.hpp"

namespace navseg {

using FeatureVector = std::array<double, 3>;

struct SvmConfig {
  double c = 1.0;          // soft-margin penalty
  double rbf_gamma = 0.1;  // K(u, v) = exp(-rbf_gamma * |u - v|^2)
  double tolerance = 1e-3;
  std::uint32_t max_passes = 1000;  // iteration cap = max_passes * sample count

  void validate() const;
  bool operator==(const SvmConfig&) const = default;
};

struct TrainingSample {
  FeatureVector x;  // already normalized
  bool nav = false;
};

/// Raw solution of the soft-margin dual, kept for diagnostics and tests.
struct DualSolution {
  std::vector<double> alpha;  // one per sample, in [0, C]
  double bias = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

struct SvmModel {
  std::vector<FeatureVector> support_vectors;  // normalized feature space
  std::vector<double> dual_coefs;              // alpha_i * y_i
  double bias = 0.0;
  FeatureScaler scaler;
  SvmConfig config;

  /// sum_i dual_coefs[i] * K(sv_i, x) + bias for an already-normalized x.
  double decision_value(const FeatureVector& normalized) const;
};

struct Prediction {
  bool nav = false;
  double decision_value = 0.0;
};

double rbf_kernel(const FeatureVector& u, const FeatureVector& v, double gamma);

/// Scaler that maps every feature to itself.
FeatureScaler identity_scaler();

/// Sequential minimal optimization with maximal-violating-pair working-set
/// selection. Throws TrainingError unless both labels are present.
DualSolution solve_dual(std::span<const TrainingSample> samples, const SvmConfig& cfg);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
double dual_objective(std::span<const TrainingSample> samples, std::span<const double> alpha,
                      const SvmConfig& cfg);

SvmModel train(std::span<const TrainingSample> samples, const SvmConfig& cfg,
               const FeatureScaler& scaler = identity_scaler());

/// Scales f with model.scaler, then applies the decision function; nav iff
/// the value is strictly positive.
Prediction predict(const SvmModel& model, const BlockFeatures& f);

std::string serialize_model(const SvmModel& model);
/// Throws SchemaError naming the offending field path.
SvmModel deserialize_model(std::string_view text);
void save_model(const SvmModel& model, const std::filesystem::path& path);
/// Throws Error if the file cannot be read, SchemaError if it is malformed.
SvmModel load_model(const std::filesystem::path& path);

}  // namespace navseg
