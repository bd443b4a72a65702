#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bindim/baselines.hpp"
#include "bindim/dataset.hpp"
#include "bindim/dimension.hpp"
#include "bindim/distdist.hpp"

namespace bindim {

// --- tabular output ------------------------------------------------------------

/// One cell of a result table; monostate renders as "NA".
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Scalar results (fitted slopes, correlations...) reported after the rows.
  std::vector<std::pair<std::string, Cell>> summary;
};

/// Header line, one line per row, then the summary as "# key<TAB>value".
void write_tsv(std::ostream& out, const Table& table);
void write_tsv(std::ostream& out, const std::vector<Table>& tables);
/// {"tables": [{"name", "columns", "rows", "summary"}]}, pretty-printed.
std::string tables_to_json(const std::vector<Table>& tables);

std::string to_json(const DimensionEstimate& est, const CdfSource& source);
std::string to_json(const NormalizedResult& res);

// --- dataset report --------------------------------------------------------------

/// One line of the per-dataset summary: basic statistics, cd of the data
/// and of its independent-columns model, and the normalized dimension.
/// Fields that could not be computed stay empty and carry an entry in
/// `errors` keyed by field name.
struct DatasetReport {
  std::string name;
  std::size_t n_cols = 0;
  std::size_t n_rows = 0;
  std::size_t ones = 0;
  double density = 0.0;
  std::optional<double> cd_data;
  std::optional<double> cd_ind;
  std::optional<double> mu_over_sigma;  // of the independent model
  std::optional<double> c_hat;          // cd_ind * sigma / mu
  std::optional<std::size_t> ncd;
  std::optional<double> ncd_over_k;
  std::optional<double> prop3;
  std::map<std::string, std::string> errors;
  double wall_time = 0.0;  // seconds
};

DatasetReport dataset_report(const BinaryDataset& data, const std::string& name,
                             const DimConfig& cfg, const ExecOptions& exec = {});

/// Table with one row per report; wall time is included only on request
/// because it breaks byte-identical reruns.
Table reports_table(const std::vector<DatasetReport>& reports, bool with_timing);

// --- experiments -------------------------------------------------------------------

struct ExperimentSpec {
  std::string name;
  std::size_t replicates = 20;
  std::vector<std::size_t> ks{50, 100, 150, 200};  // column counts (synthetic families)
  std::size_t n_rows = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  DimConfig cfg;
  /// Real data for pca-subsets / cluster-dims; synthetic stand-ins otherwise.
  std::optional<BinaryDataset> input;
  std::size_t subset_rows = 1000;
  std::size_t subset_cols = 50;
  std::size_t clusters = 3;
};

std::vector<std::string> experiment_names();

/// Runs one named experiment; output depends only on the spec (not on the
/// thread count). Unknown names throw invalid_argument.
std::vector<Table> run_experiment(const ExperimentSpec& spec);

// --- small statistics used by the experiments and the acceptance suite -------------

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> values);

/// Synthetic datasets shared by the independent-columns experiments: the
/// r-th replicate with K columns, random margins, `n_rows` rows.
struct IndependentReplicate {
  MarginProfile margins;
  BinaryDataset data;
};
IndependentReplicate independent_replicate(std::size_t n_cols, std::size_t n_rows, std::size_t replicate,
                                           std::uint64_t seed);

struct MarkovReplicate {
  MarginProfile reversal;
  BinaryDataset data;
};
MarkovReplicate markov_replicate(std::size_t n_cols, std::size_t n_rows, std::size_t replicate,
                                 std::uint64_t seed);

}  // namespace bindim
