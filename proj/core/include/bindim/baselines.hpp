#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bindim/dataset.hpp"

namespace bindim {

/// Dense symmetric matrix in row-major order.
struct SymmetricMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double trace() const;
};

struct EigenDecomposition {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations until every off-diagonal entry is below
/// 1e-10 * |trace| (or an absolute 1e-300 floor for a zero matrix).
EigenDecomposition jacobi_eigen(SymmetricMatrix m, std::size_t max_sweeps = 100);

/// Column-centred covariance of the 0/1 matrix with divisor N - 1.
SymmetricMatrix covariance(const BinaryDataset& data);

struct PcaSummary {
  std::vector<double> eigenvalues;  // descending, tiny negatives clamped to 0
  double total_variance = 0.0;

  /// Fraction of the variance carried by the first m components.
  double explained_by(std::size_t m) const;
};

PcaSummary pca_summary(const BinaryDataset& data);

/// Smallest m whose top-m eigenvalues carry at least `frac` of the variance.
std::size_t components_for_variance(const PcaSummary& summary, double frac);

/// Mean |Pearson correlation| over column pairs where both columns vary.
double avg_abs_correlation(const BinaryDataset& data);

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  std::vector<std::vector<double>> centroids;
  double objective = 0.0;                 // sum of squared distances to centroids
  std::vector<double> objective_history;  // one entry per Lloyd iteration
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding, at most `max_iter` rounds.
Clustering kmeans(const BinaryDataset& data, std::size_t k, std::uint64_t seed,
                  std::size_t max_iter = 100);

/// Sum of squared Euclidean distances from rows to their assigned centroids.
double clustering_objective(const BinaryDataset& data, const Clustering& c);

/// Rows of `data` assigned to `cluster`, in original order.
BinaryDataset cluster_rows(const BinaryDataset& data, const Clustering& c, std::size_t cluster);

}  // namespace bindim
