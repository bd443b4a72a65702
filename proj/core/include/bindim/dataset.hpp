#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace bindim {

using ColumnIndex = std::uint32_t;

/// Sparse 0/1 matrix stored row-wise: each row is the strictly increasing
/// list of columns holding a 1. Immutable once built, so it can be shared
/// freely between threads.
class BinaryDataset {
 public:
  BinaryDataset() = default;

  /// Validates every row (indices in range, strictly increasing).
  BinaryDataset(std::size_t n_cols, const std::vector<std::vector<ColumnIndex>>& rows);

  std::size_t n_rows() const { return offsets_.size() - 1; }
  std::size_t n_cols() const { return n_cols_; }
  /// Total number of 1s.
  std::size_t ones() const { return indices_.size(); }
  double density() const;

  std::span<const ColumnIndex> row(std::size_t i) const {
    return {indices_.data() + offsets_[i], indices_.data() + offsets_[i + 1]};
  }

  std::vector<std::vector<ColumnIndex>> to_rows() const;

  friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

  /// Incremental construction with the same validation as the constructor.
  class Builder {
   public:
    explicit Builder(std::size_t n_cols) : n_cols_(n_cols) {}
    void reserve(std::size_t rows, std::size_t ones);
    /// `row` must be strictly increasing and within [0, n_cols).
    void add_row(std::span<const ColumnIndex> row);
    BinaryDataset build() &&;

   private:
    std::size_t n_cols_;
    std::vector<std::size_t> offsets_{0};
    std::vector<ColumnIndex> indices_;
  };

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<ColumnIndex> indices_;
};

enum class ProfileKind { margin, reversal };

/// Per-column probabilities: margins P(column = 1), or the reversal
/// probabilities of the Markov generator.
struct MarginProfile {
  std::vector<double> values;
  ProfileKind kind = ProfileKind::margin;

  std::size_t size() const { return values.size(); }
  /// Throws invalid_argument unless every value lies in [0, 1].
  void validate() const;
};

enum class FileFormat { fimi, dense01 };

/// Parses "fimi" / "dense01"; throws invalid_argument otherwise.
FileFormat parse_file_format(std::string_view name);

/// fimi: one transaction per line, whitespace-separated item ids; blank lines
/// are empty transactions and repeated ids collapse. dense01: one row of
/// '0'/'1' characters per line, optionally separated by commas or blanks;
/// blank lines are skipped. `min_cols` raises the inferred column count.
BinaryDataset load_dataset(std::istream& in, FileFormat format, std::size_t min_cols = 0);
BinaryDataset load_dataset(const std::filesystem::path& path, FileFormat format,
                           std::size_t min_cols = 0);

/// fimi output uses single spaces and LF; dense01 writes bare 0/1 characters.
void save_dataset(std::ostream& out, const BinaryDataset& data, FileFormat format);

MarginProfile margins(const BinaryDataset& data);

/// Shuffles every column independently (one Fisher-Yates stream per column),
/// which keeps the margins and destroys the dependencies between columns.
BinaryDataset permute_columns(const BinaryDataset& data, std::uint64_t seed);

/// Replaces every column j by `copies` identical columns copies*j ... copies*j+copies-1.
BinaryDataset copy_columns(const BinaryDataset& data, std::size_t copies);

enum class SubsetMode { rows, cols };

/// Uniform sample of `count` rows (in draw order) or columns (original order,
/// renumbered to [0, count)) without replacement.
BinaryDataset random_subset(const BinaryDataset& data, SubsetMode mode, std::size_t count,
                            std::uint64_t seed);

/// Uniform random `count`-subset of [0, n) in the order a Fisher-Yates
/// shuffle would produce it; O(count) time and memory.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::uint64_t seed);

BinaryDataset gen_independent(std::size_t n_cols, std::size_t n_rows, const MarginProfile& p,
                              std::uint64_t seed);

/// Draws x_max ~ U[0,1] once, then each value ~ U[0, x_max].
MarginProfile random_profile(std::size_t n_cols, ProfileKind kind, std::uint64_t seed);

/// Rows follow a two-state chain along the columns: the first column is a
/// fair coin and column i flips the previous value with probability t_i.
BinaryDataset gen_markov(std::size_t n_cols, std::size_t n_rows, const MarginProfile& t,
                         std::uint64_t seed);

/// Sum of 2 t_i (1 - t_i): a rough amount of "decorrelation" in Markov data.
double t_measure(const MarginProfile& t);

}  // namespace bindim
