#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bindim/dataset.hpp"

namespace bindim {

enum class CdfBasis { exact_pairs, row_vs_sample, sample_vs_sample, independent_mc, binomial, synthetic };

std::string_view to_string(CdfBasis basis);

/// Where a DistanceCdf came from. Only the fields relevant to `kind` are set.
struct CdfSource {
  CdfBasis kind = CdfBasis::synthetic;
  std::size_t n_rows = 0;     // exact_pairs, row_vs_sample
  std::size_t sample = 0;     // row_vs_sample, sample_vs_sample, independent_mc
  std::size_t h = 0;          // binomial
  double q = 0.0;             // binomial
};

/// Distribution of the L1 distance Z between two random rows, stored as
/// f[r] = P(Z < r) for r = 0 .. K+1 and extended to reals by linear
/// interpolation.
class DistanceCdf {
 public:
  /// `f` must have at least two entries, start at 0, end at 1 and be
  /// nondecreasing; violations throw invalid_argument.
  DistanceCdf(std::vector<double> f, CdfSource source = {}, std::uint64_t pair_count = 0);

  /// Builds f from an integer histogram of distances (index = distance).
  static DistanceCdf from_histogram(std::span<const std::uint64_t> counts, std::size_t max_distance,
                                    CdfSource source);

  /// K: the largest possible distance. f has K + 2 entries.
  std::size_t max_distance() const { return f_.size() - 2; }
  std::span<const double> values() const { return f_; }
  double at(std::size_t r) const { return f_[r]; }
  const CdfSource& source() const { return source_; }
  std::uint64_t pair_count() const { return pair_count_; }

 private:
  std::vector<double> f_;
  CdfSource source_;
  std::uint64_t pair_count_;
};

enum class DistanceKernel {
  automatic,     // pick whichever of the two is cheaper for the data
  sparse_merge,  // merge of the sorted index lists, cost ~ |x| + |y|
  bitset,        // popcount over packed rows, cost ~ K / 64
};

struct ExecOptions {
  unsigned threads = 1;  // 0: one per hardware thread
  DistanceKernel kernel = DistanceKernel::automatic;
};

/// All N^2 ordered pairs, self-pairs included.
DistanceCdf exact_cdf(const BinaryDataset& data, const ExecOptions& exec = {});

enum class SampleMode { row_vs_sample, sample_vs_sample };

/// Estimates f from a uniform `sample_size`-row subset D_s drawn without
/// replacement: either D x D_s or D_s x D_s pairs.
DistanceCdf sampled_cdf(const BinaryDataset& data, SampleMode mode, std::size_t sample_size,
                        std::uint64_t seed, const ExecOptions& exec = {});

/// Empirical CDF of `n_samples` draws of sum_i Bernoulli(2 p_i (1 - p_i)),
/// i.e. the distance distribution of the independent-columns model.
DistanceCdf independent_mc_cdf(const MarginProfile& p, std::size_t n_samples, std::uint64_t seed,
                               const ExecOptions& exec = {});

/// Exact CDF of Binomial(h, q) with q = 2 p (1 - p).
DistanceCdf binomial_model(std::size_t h, double p);

/// Linear interpolation of f at x in [0, K+1].
double f_eval(const DistanceCdf& cdf, double x);

/// Smallest x in [0, K+1] with f_eval(x) >= a, for 0 < a <= 1.
double f_inverse(const DistanceCdf& cdf, double a);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

Moments mean_var(const DistanceCdf& cdf);

/// Two-column TSV (r, f(r)) preceded by a '#' header describing the source.
void write_cdf_tsv(std::ostream& out, const DistanceCdf& cdf);

/// Worker count actually used for `requested` (0 = hardware concurrency).
unsigned resolve_threads(unsigned requested);

}  // namespace bindim
