#include "bindim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "bindim/error.hpp"
#include "bindim/random.hpp"

namespace bindim {

void DimConfig::validate() const {
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < 1.0)) {
    fail(ErrorCode::invalid_argument,
         fmt::format("need 0 < alpha1 < alpha2 < 1, got {} and {}", alpha1, alpha2));
  }
  if (grid_n < 1) fail(ErrorCode::invalid_argument, "grid size must be at least 1");
  if (sample_m < 1 || ind_samples < 1) fail(ErrorCode::invalid_argument, "sample sizes must be positive");
  if (!(search_tol > 0.0)) fail(ErrorCode::invalid_argument, "search tolerance must be positive");
  if (h_max < 1) fail(ErrorCode::invalid_argument, "h_max must be at least 1");
}

std::pair<double, double> least_squares_line(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) fail(ErrorCode::invalid_argument, "line fit needs two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) fail(ErrorCode::degenerate_range, "all abscissae coincide");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

DimensionEstimate cd_r(const DistanceCdf& cdf, double r1, double r2, std::size_t grid_n) {
  if (grid_n < 1) fail(ErrorCode::invalid_argument, "grid size must be at least 1");
  if (!(r1 > 0.0)) fail(ErrorCode::invalid_argument, fmt::format("radius r1 = {} must be positive", r1));
  if (!(r1 < r2)) {
    fail(ErrorCode::degenerate_range, fmt::format("empty radius range [{}, {}]", r1, r2));
  }
  const double upper = static_cast<double>(cdf.max_distance() + 1);
  if (r2 > upper) fail(ErrorCode::invalid_argument, fmt::format("radius r2 = {} beyond {}", r2, upper));
  if (!(f_eval(cdf, r1) > 0.0)) {
    fail(ErrorCode::insufficient_mass, fmt::format("no pairs closer than r1 = {}", r1));
  }

  DimensionEstimate est;
  est.r1 = r1;
  est.r2 = r2;
  est.grid_n = grid_n;
  est.points.reserve(grid_n + 1);
  const double step = (r2 - r1) / static_cast<double>(grid_n);
  for (std::size_t i = 0; i <= grid_n; ++i) {
    const double r = i == grid_n ? r2 : r1 + static_cast<double>(i) * step;
    est.points.emplace_back(std::log(r), std::log(f_eval(cdf, r)));
  }
  std::tie(est.slope, est.intercept) = least_squares_line(est.points);
  return est;
}

DimensionEstimate cd_a(const DistanceCdf& cdf, double alpha1, double alpha2, std::size_t grid_n) {
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < 1.0)) {
    fail(ErrorCode::invalid_argument,
         fmt::format("need 0 < alpha1 < alpha2 < 1, got {} and {}", alpha1, alpha2));
  }
  const double r1 = std::max(f_inverse(cdf, alpha1), 1.0);
  const double r2 = std::max(f_inverse(cdf, alpha2), 1.0);
  if (!(r1 < r2)) {
    fail(ErrorCode::degenerate_range,
         fmt::format("quantile radii collapse to [{}, {}] after truncation at 1", r1, r2));
  }
  return cd_r(cdf, r1, r2, grid_n);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::invalid_argument, "normal quantile needs 0 < p < 1");
  // Acklam's rational approximation followed by one Halley step on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0) || alpha == 0.5) {
    fail(ErrorCode::invalid_argument, fmt::format("C(alpha) undefined at alpha = {}", alpha));
  }
  // Both factors change sign under alpha -> 1 - alpha; taking both absolute keeps C symmetric.
  return std::abs(std::log((1.0 - alpha) / alpha)) / (2.0 * std::abs(normal_quantile(alpha)));
}

double prop1_approx(const MarginProfile& p, double alpha) {
  double mu = 0.0;
  double var = 0.0;
  for (double pi : p.values) {
    const double q = 2.0 * pi * (1.0 - pi);
    mu += q;
    var += q * (1.0 - q);
  }
  if (!(var > 0.0)) fail(ErrorCode::degenerate, "all columns constant: distance is identically 0");
  return c_alpha(alpha) * mu / std::sqrt(var);
}

double prop3_estimate(double cd_data, double cd_ind, std::size_t n_cols) {
  if (!(cd_ind > 0.0)) fail(ErrorCode::invalid_argument, "cd of the independent model must be positive");
  const double ratio = cd_data / cd_ind;
  return ratio * ratio * static_cast<double>(n_cols);
}

double cd_ind_model(std::size_t h, double p, const DimConfig& cfg) {
  return cd_a(binomial_model(h, p), cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
}

namespace {

/// cd_ind_model with the degenerate small-model region mapped to "no value";
/// the searches treat it as lying below every target.
std::optional<double> model_value(std::size_t h, double p, const DimConfig& cfg) {
  try {
    return cd_ind_model(h, p, cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_range || e.code() == ErrorCode::insufficient_mass) {
      return std::nullopt;
    }
    throw;
  }
}

bool below(const std::optional<double>& v, double target) { return !v || *v < target; }

}  // namespace

double match_margin(double target, std::size_t n_cols, const DimConfig& cfg) {
  cfg.validate();
  const auto top = model_value(n_cols, 0.5, cfg);
  if (below(top, target)) {
    fail(ErrorCode::no_root,
         fmt::format("target cd {} exceeds cd of ind({}, 0.5) = {}", target, n_cols,
                     top ? fmt::format("{}", *top) : std::string("undefined")));
  }
  double lo = 0.0;
  double hi = 0.5;
  bool lo_defined = false;
  while (hi - lo > cfg.search_tol) {
    const double mid = 0.5 * (lo + hi);
    const auto v = model_value(n_cols, mid, cfg);
    if (below(v, target)) {
      lo = mid;
      lo_defined = v.has_value();
    } else {
      hi = mid;
    }
  }
  const double at_hi = *model_value(n_cols, hi, cfg);
  // Near s = 0 the model jumps from "degenerate" to a positive floor; a target
  // under that floor has no preimage.
  if (!lo_defined && at_hi - target > 1e-3 * std::max(target, 1.0)) {
    fail(ErrorCode::no_root,
         fmt::format("target cd {} is below the smallest attainable cd {} of ind({}, s)", target,
                     at_hi, n_cols));
  }
  return hi;
}

std::size_t match_columns(double target, double s, const DimConfig& cfg) {
  cfg.validate();
  std::size_t hi = 1;
  std::optional<double> v_hi = model_value(hi, s, cfg);
  while (below(v_hi, target)) {
    if (hi >= cfg.h_max) {
      fail(ErrorCode::saturation,
           fmt::format("cd {} not reached by ind(h, {}) for h <= {}", target, s, cfg.h_max));
    }
    hi = std::min(hi * 2, cfg.h_max);
    v_hi = model_value(hi, s, cfg);
  }
  // Smallest h with value >= target lies in (lo, hi].
  std::size_t lo = hi / 2;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto v = model_value(mid, s, cfg);
    if (below(v, target)) {
      lo = mid;
    } else {
      hi = mid;
      v_hi = v;
    }
  }
  if (hi == 1) return 1;
  const auto v_lo = model_value(hi - 1, s, cfg);
  if (v_lo && std::abs(*v_lo - target) <= std::abs(*v_hi - target)) return hi - 1;
  return hi;
}

NormalizedResult normalize_dimension(double cd_data, double cd_ind, std::size_t n_cols,
                                     const DimConfig& cfg) {
  NormalizedResult out;
  out.cd_data = cd_data;
  out.cd_ind = cd_ind;
  out.s = match_margin(cd_ind, n_cols, cfg);
  out.h = match_columns(cd_data, out.s, cfg);
  out.cd_matched = cd_ind_model(out.h, out.s, cfg);
  out.prop3_estimate = prop3_estimate(cd_data, cd_ind, n_cols);
  return out;
}

DistanceCdf data_cdf(const BinaryDataset& data, const DimConfig& cfg, const ExecOptions& exec) {
  if (data.n_rows() == 0) fail(ErrorCode::empty_dataset, "dataset has no rows");
  if (data.n_rows() <= cfg.sample_m) return exact_cdf(data, exec);
  return sampled_cdf(data, SampleMode::row_vs_sample, cfg.sample_m,
                     derive_seed(cfg.seed, "data-sample"), exec);
}

DistanceCdf ind_cdf(const BinaryDataset& data, const DimConfig& cfg, const ExecOptions& exec) {
  if (data.n_rows() == 0) fail(ErrorCode::empty_dataset, "dataset has no rows");
  return independent_mc_cdf(margins(data), cfg.ind_samples, derive_seed(cfg.seed, "ind-model"), exec);
}

NormalizedResult normalized_cd(const BinaryDataset& data, const DimConfig& cfg,
                               const ExecOptions& exec) {
  cfg.validate();
  const double cd_data = cd_a(data_cdf(data, cfg, exec), cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
  const double cd_ind = cd_a(ind_cdf(data, cfg, exec), cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
  return normalize_dimension(cd_data, cd_ind, data.n_cols(), cfg);
}

Prop2Point prop2_check(const MarginProfile& p, double c1, double c2, const DimConfig& cfg) {
  if (!(c1 > 0.0 && c1 < c2 && c2 <= 1.0)) {
    fail(ErrorCode::invalid_argument, fmt::format("need 0 < c1 < c2 <= 1, got {} and {}", c1, c2));
  }
  if (p.size() == 0) fail(ErrorCode::invalid_argument, "empty margin profile");
  p.validate();
  double mu = 0.0;
  for (double pi : p.values) mu += 2.0 * pi * (1.0 - pi);
  if (!(mu > 0.0)) fail(ErrorCode::degenerate, "all columns constant: mean distance is 0");

  const bool uniform = std::all_of(p.values.begin(), p.values.end(),
                                   [&](double v) { return v == p.values.front(); });
  const DistanceCdf cdf = uniform ? binomial_model(p.size(), p.values.front())
                                  : independent_mc_cdf(p, cfg.ind_samples, derive_seed(cfg.seed, "prop2"));
  Prop2Point out;
  out.mu = mu;
  double r1 = c1 * mu;
  if (r1 < 1.0) {
    r1 = 1.0;
    out.clamped = true;
  }
  out.cd = cd_r(cdf, r1, c2 * mu, cfg.grid_n).slope;
  return out;
}

}  // namespace bindim
