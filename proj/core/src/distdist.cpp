#include "bindim/distdist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bindim/error.hpp"
#include "bindim/random.hpp"
#include "parallel.hpp"

namespace bindim {

std::string_view to_string(CdfBasis basis) {
  switch (basis) {
    case CdfBasis::exact_pairs: return "exact-pairs";
    case CdfBasis::row_vs_sample: return "row-vs-sample";
    case CdfBasis::sample_vs_sample: return "sample-vs-sample";
    case CdfBasis::independent_mc: return "independent-mc";
    case CdfBasis::binomial: return "binomial";
    case CdfBasis::synthetic: return "synthetic";
  }
  return "unknown";
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// --- DistanceCdf -------------------------------------------------------------

DistanceCdf::DistanceCdf(std::vector<double> f, CdfSource source, std::uint64_t pair_count)
    : f_(std::move(f)), source_(source), pair_count_(pair_count) {
  if (f_.size() < 2) fail(ErrorCode::invalid_argument, "distance CDF needs at least 2 entries");
  if (f_.front() != 0.0 || f_.back() != 1.0) {
    fail(ErrorCode::invalid_argument, "distance CDF must start at 0 and end at 1");
  }
  for (std::size_t r = 1; r < f_.size(); ++r) {
    if (!(f_[r] >= f_[r - 1])) fail(ErrorCode::invalid_argument, "distance CDF must be nondecreasing");
  }
}

DistanceCdf DistanceCdf::from_histogram(std::span<const std::uint64_t> counts,
                                        std::size_t max_distance, CdfSource source) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) fail(ErrorCode::empty_dataset, "no pairs to build a distance distribution");
  std::vector<double> f(max_distance + 2, 0.0);
  std::uint64_t running = 0;
  for (std::size_t r = 1; r < f.size(); ++r) {
    if (r - 1 < counts.size()) running += counts[r - 1];
    f[r] = static_cast<double>(running) / static_cast<double>(total);
  }
  return DistanceCdf(std::move(f), source, total);
}

// --- pairwise distances ----------------------------------------------------------

namespace {

class PairDistance {
 public:
  PairDistance(const BinaryDataset& data, DistanceKernel kernel) : data_(data) {
    words_ = (data.n_cols() + 63) / 64;
    if (kernel == DistanceKernel::automatic) {
      const double avg_len =
          data.n_rows() == 0 ? 0.0 : static_cast<double>(data.ones()) / static_cast<double>(data.n_rows());
      const double bytes = static_cast<double>(words_) * 8.0 * static_cast<double>(data.n_rows());
      kernel = (static_cast<double>(words_) <= 2.0 * avg_len + 1.0 && bytes < 1.0e9)
                   ? DistanceKernel::bitset
                   : DistanceKernel::sparse_merge;
    }
    use_bits_ = kernel == DistanceKernel::bitset;
    if (use_bits_) {
      bits_.assign(words_ * data.n_rows(), 0);
      for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (ColumnIndex c : data.row(i)) bits_[i * words_ + c / 64] |= std::uint64_t{1} << (c % 64);
      }
    }
  }

  std::size_t operator()(std::size_t i, std::size_t j) const {
    if (use_bits_) {
      const std::uint64_t* a = bits_.data() + i * words_;
      const std::uint64_t* b = bits_.data() + j * words_;
      std::size_t d = 0;
      for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
      return d;
    }
    auto x = data_.row(i);
    auto y = data_.row(j);
    std::size_t common = 0;
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < x.size() && q < y.size()) {
      if (x[p] < y[q]) {
        ++p;
      } else if (y[q] < x[p]) {
        ++q;
      } else {
        ++common;
        ++p;
        ++q;
      }
    }
    return x.size() + y.size() - 2 * common;
  }

 private:
  const BinaryDataset& data_;
  std::size_t words_ = 0;
  bool use_bits_ = false;
  std::vector<std::uint64_t> bits_;
};

using Histogram = std::vector<std::uint64_t>;

Histogram merge(std::vector<Histogram>& parts) {
  Histogram out = std::move(parts.front());
  for (std::size_t w = 1; w < parts.size(); ++w) {
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += parts[w][r];
  }
  return out;
}

/// Ordered pairs (x, y) with x, y both drawn from `idx`, self-pairs included.
Histogram symmetric_histogram(const BinaryDataset& data, std::span<const std::size_t> idx,
                              const ExecOptions& exec) {
  const PairDistance dist(data, exec.kernel);
  const unsigned workers = std::min<unsigned>(resolve_threads(exec.threads),
                                              static_cast<unsigned>(std::max<std::size_t>(idx.size(), 1)));
  std::vector<Histogram> parts(workers, Histogram(data.n_cols() + 1, 0));
  detail::run_workers(workers, [&](unsigned w) {
    Histogram& h = parts[w];
    for (std::size_t a = w; a < idx.size(); a += workers) {
      h[0] += 1;
      for (std::size_t b = a + 1; b < idx.size(); ++b) h[dist(idx[a], idx[b])] += 2;
    }
  });
  return merge(parts);
}

/// Ordered pairs (x, y) with x from `left` and y from `right`.
Histogram cross_histogram(const BinaryDataset& data, std::span<const std::size_t> left,
                          std::span<const std::size_t> right, const ExecOptions& exec) {
  const PairDistance dist(data, exec.kernel);
  const unsigned workers = std::min<unsigned>(resolve_threads(exec.threads),
                                              static_cast<unsigned>(std::max<std::size_t>(left.size(), 1)));
  std::vector<Histogram> parts(workers, Histogram(data.n_cols() + 1, 0));
  detail::run_workers(workers, [&](unsigned w) {
    Histogram& h = parts[w];
    for (std::size_t a = w; a < left.size(); a += workers) {
      for (std::size_t y : right) h[dist(left[a], y)] += 1;
    }
  });
  return merge(parts);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

DistanceCdf exact_cdf(const BinaryDataset& data, const ExecOptions& exec) {
  if (data.n_rows() == 0) fail(ErrorCode::empty_dataset, "distance distribution of an empty dataset");
  const auto idx = all_rows(data.n_rows());
  const Histogram h = symmetric_histogram(data, idx, exec);
  return DistanceCdf::from_histogram(h, data.n_cols(),
                                     {.kind = CdfBasis::exact_pairs, .n_rows = data.n_rows()});
}

DistanceCdf sampled_cdf(const BinaryDataset& data, SampleMode mode, std::size_t sample_size,
                        std::uint64_t seed, const ExecOptions& exec) {
  if (sample_size < 1 || sample_size > data.n_rows()) {
    fail(ErrorCode::invalid_argument, "sample size " + std::to_string(sample_size) +
                                          " outside [1, " + std::to_string(data.n_rows()) + "]");
  }
  const auto sample = sample_without_replacement(data.n_rows(), sample_size, derive_seed(seed, "cdf-sample"));
  if (mode == SampleMode::sample_vs_sample) {
    const Histogram h = symmetric_histogram(data, sample, exec);
    return DistanceCdf::from_histogram(h, data.n_cols(),
                                       {.kind = CdfBasis::sample_vs_sample, .sample = sample_size});
  }
  const auto rows = all_rows(data.n_rows());
  const Histogram h = cross_histogram(data, rows, sample, exec);
  return DistanceCdf::from_histogram(
      h, data.n_cols(),
      {.kind = CdfBasis::row_vs_sample, .n_rows = data.n_rows(), .sample = sample_size});
}

DistanceCdf independent_mc_cdf(const MarginProfile& p, std::size_t n_samples, std::uint64_t seed,
                               const ExecOptions& exec) {
  if (n_samples < 1) fail(ErrorCode::invalid_argument, "need at least one Monte Carlo sample");
  p.validate();
  std::vector<double> q;
  q.reserve(p.size());
  for (double pi : p.values) {
    const double qi = 2.0 * pi * (1.0 - pi);
    if (qi > 0.0) q.push_back(qi);
  }
  const unsigned workers = std::min<unsigned>(resolve_threads(exec.threads),
                                              static_cast<unsigned>(n_samples));
  std::vector<Histogram> parts(workers, Histogram(p.size() + 1, 0));
  detail::run_workers(workers, [&](unsigned w) {
    for (std::size_t s = w; s < n_samples; s += workers) {
      Rng rng(seed, "ind-mc", s);
      std::size_t z = 0;
      for (double qi : q) z += rng.bernoulli(qi) ? 1 : 0;
      parts[w][z] += 1;
    }
  });
  const Histogram h = merge(parts);
  return DistanceCdf::from_histogram(h, p.size(),
                                     {.kind = CdfBasis::independent_mc, .sample = n_samples});
}

DistanceCdf binomial_model(std::size_t h, double p) {
  if (h < 1) fail(ErrorCode::invalid_argument, "binomial model needs at least one column");
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::invalid_argument, "probability outside [0,1]");
  const double q = 2.0 * p * (1.0 - p);
  const CdfSource source{.kind = CdfBasis::binomial, .h = h, .q = q};
  std::vector<double> f(h + 2, 1.0);
  f[0] = 0.0;
  if (q == 0.0) return DistanceCdf(std::move(f), source);

  const double n = static_cast<double>(h);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double log_n_fact = std::lgamma(n + 1.0);
  // Neumaier-compensated running sum of the pmf.
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t k = 0; k <= h; ++k) {
    const double kk = static_cast<double>(k);
    const double log_pmf = log_n_fact - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) +
                           kk * log_q + (n - kk) * log_1mq;
    const double term = std::exp(log_pmf);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
    f[k + 1] = std::min(1.0, sum + comp);
  }
  f[h + 1] = 1.0;
  for (std::size_t r = 1; r < f.size(); ++r) f[r] = std::max(f[r], f[r - 1]);
  return DistanceCdf(std::move(f), source);
}

double f_eval(const DistanceCdf& cdf, double x) {
  const auto f = cdf.values();
  const double upper = static_cast<double>(f.size() - 1);
  if (!(x >= 0.0 && x <= upper)) {
    fail(ErrorCode::invalid_argument, fmt::format("f evaluated at {} outside [0, {}]", x, upper));
  }
  const auto lo = static_cast<std::size_t>(std::floor(x));
  if (lo + 1 >= f.size()) return f.back();
  const double frac = x - static_cast<double>(lo);
  if (frac == 0.0) return f[lo];
  return f[lo] + frac * (f[lo + 1] - f[lo]);
}

double f_inverse(const DistanceCdf& cdf, double a) {
  if (!(a > 0.0 && a <= 1.0)) {
    fail(ErrorCode::invalid_argument, fmt::format("f inverted at {} outside (0, 1]", a));
  }
  const auto f = cdf.values();
  const auto it = std::lower_bound(f.begin(), f.end(), a);
  const auto j = static_cast<std::size_t>(it - f.begin());
  const double below = f[j - 1];
  const double above = f[j];
  const double x = static_cast<double>(j - 1) + (a - below) / (above - below);
  return std::min(x, static_cast<double>(j));
}

Moments mean_var(const DistanceCdf& cdf) {
  const auto f = cdf.values();
  double mean = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) mean += static_cast<double>(k) * (f[k + 1] - f[k]);
  double var = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const double d = static_cast<double>(k) - mean;
    var += d * d * (f[k + 1] - f[k]);
  }
  return {mean, var};
}

void write_cdf_tsv(std::ostream& out, const DistanceCdf& cdf) {
  const auto& s = cdf.source();
  fmt::print(out, "# basis={} K={} rows={} sample={} h={} q={} pairs={}\n", to_string(s.kind),
             cdf.max_distance(), s.n_rows, s.sample, s.h, s.q, cdf.pair_count());
  fmt::print(out, "r\tf\n");
  const auto f = cdf.values();
  for (std::size_t r = 0; r < f.size(); ++r) fmt::print(out, "{}\t{}\n", r, f[r]);
}

}  // namespace bindim
