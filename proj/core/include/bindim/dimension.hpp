#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bindim/dataset.hpp"
#include "bindim/distdist.hpp"

namespace bindim {

/// A fitted correlation dimension: the least-squares slope of
/// (log r, log f(r)) over grid_n + 1 equally spaced radii in [r1, r2].
struct DimensionEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  std::size_t grid_n = 0;
  std::vector<std::pair<double, double>> points;
};

struct DimConfig {
  double alpha1 = 0.25;
  double alpha2 = 0.75;
  std::size_t grid_n = 50;
  std::size_t sample_m = 10000;    // rows of D_s; exact pairs when N <= sample_m
  std::size_t ind_samples = 10000; // Monte Carlo draws for the independent model
  std::uint64_t seed = 1;
  double search_tol = 1e-6;        // bisection width on the matched margin s
  std::size_t h_max = std::size_t{1} << 20;

  /// Throws invalid_argument unless 0 < alpha1 < alpha2 < 1 and grid_n >= 1.
  void validate() const;
};

struct NormalizedResult {
  std::size_t h = 0;           // normalized correlation dimension
  double s = 0.0;              // matched common margin
  double cd_data = 0.0;        // cd_A of the data
  double cd_ind = 0.0;         // cd_A of the independent-columns model
  double cd_matched = 0.0;     // cd_A of ind(h, s)
  double prop3_estimate = 0.0; // (cd_data / cd_ind)^2 K
};

/// Ordinary least squares y = slope * x + intercept.
std::pair<double, double> least_squares_line(std::span<const std::pair<double, double>> points);

/// Correlation dimension for absolute radii, 0 < r1 < r2 <= K + 1.
DimensionEstimate cd_r(const DistanceCdf& cdf, double r1, double r2, std::size_t grid_n);

/// Correlation dimension for quantile bounds: r_i = max(f^-1(alpha_i), 1).
DimensionEstimate cd_a(const DistanceCdf& cdf, double alpha1, double alpha2, std::size_t grid_n);

/// Standard normal quantile, accurate to ~1e-15 after one refinement step.
double normal_quantile(double p);

/// ln((1 - a) / a) / (2 |Phi^-1(a)|); about 0.815 at a = 1/4.
double c_alpha(double alpha);

/// Large-K approximation of cd_A{alpha, 1-alpha} for independent columns
/// with margins p: C(alpha) sum q_i / sqrt(sum q_i (1 - q_i)).
double prop1_approx(const MarginProfile& p, double alpha);

/// (cd_data / cd_ind)^2 K, the closed-form estimate of the normalized dimension.
double prop3_estimate(double cd_data, double cd_ind, std::size_t n_cols);

/// cd_A of ind(h, p): h independent columns, each 1 with probability p,
/// computed on the exact binomial distance distribution.
double cd_ind_model(std::size_t h, double p, const DimConfig& cfg);

/// Margin s in (0, 0.5] with cd_ind_model(n_cols, s) = target.
double match_margin(double target, std::size_t n_cols, const DimConfig& cfg);

/// Integer h in [1, h_max] minimising |cd_ind_model(h, s) - target|; ties
/// go to the smaller h.
std::size_t match_columns(double target, double s, const DimConfig& cfg);

/// Both searches, given already estimated dimensions.
NormalizedResult normalize_dimension(double cd_data, double cd_ind, std::size_t n_cols,
                                     const DimConfig& cfg);

/// Distance distribution used for cd(D): exact pairs when N <= sample_m,
/// otherwise D x D_s with |D_s| = sample_m.
DistanceCdf data_cdf(const BinaryDataset& data, const DimConfig& cfg, const ExecOptions& exec = {});

/// Distance distribution of ind(D), by Monte Carlo from the margins of D.
DistanceCdf ind_cdf(const BinaryDataset& data, const DimConfig& cfg, const ExecOptions& exec = {});

NormalizedResult normalized_cd(const BinaryDataset& data, const DimConfig& cfg,
                               const ExecOptions& exec = {});

struct Prop2Point {
  double mu = 0.0;
  double cd = 0.0;
  bool clamped = false;  // c1 * mu < 1, so r1 was raised to 1
};

/// cd_R(c1 mu, c2 mu) for the independent model with margins p, where
/// mu = sum 2 p_i (1 - p_i). Uses the exact binomial law when all margins are
/// equal and Monte Carlo (cfg.ind_samples) otherwise.
Prop2Point prop2_check(const MarginProfile& p, double c1, double c2, const DimConfig& cfg);

}  // namespace bindim
