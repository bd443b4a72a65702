#include "bindim/baselines.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "bindim/error.hpp"
#include "bindim/random.hpp"

namespace bindim {

double SymmetricMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

// --- Jacobi ------------------------------------------------------------------

EigenDecomposition jacobi_eigen(SymmetricMatrix m, std::size_t max_sweeps) {
  const std::size_t n = m.n;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  const double tol = std::max(1e-10 * std::abs(m.trace()), 1e-300);
  auto max_off = [&] {
    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) worst = std::max(worst, std::abs(m(p, q)));
    }
    return worst;
  };

  EigenDecomposition out;
  while (out.sweeps < max_sweeps && max_off() >= tol) {
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = m(k, p);
          const double akq = m(k, q);
          m(k, p) = c * akp - s * akq;
          m(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = m(p, k);
          const double aqk = m(q, k);
          m(p, k) = c * apk - s * aqk;
          m(q, k) = s * apk + c * aqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return m(a, a) > m(b, b); });
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (std::size_t idx : order) {
    out.values.push_back(m(idx, idx));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k * n + idx];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// --- co-occurrence -----------------------------------------------------------

namespace {

/// Column counts n_i and pair counts n_ij (i < j) of a 0/1 matrix.
struct CoOccurrence {
  std::size_t k = 0;
  std::vector<std::uint64_t> single;
  std::vector<std::uint64_t> dense;  // k*k when k is small enough
  std::unordered_map<std::uint64_t, std::uint64_t> sparse;

  explicit CoOccurrence(const BinaryDataset& data) : k(data.n_cols()), single(data.n_cols(), 0) {
    const bool use_dense = k <= 4096;
    if (use_dense) dense.assign(k * k, 0);
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
      auto row = data.row(r);
      for (std::size_t a = 0; a < row.size(); ++a) {
        ++single[row[a]];
        for (std::size_t b = a + 1; b < row.size(); ++b) {
          if (use_dense) {
            ++dense[row[a] * k + row[b]];
          } else {
            ++sparse[static_cast<std::uint64_t>(row[a]) * k + row[b]];
          }
        }
      }
    }
  }

  std::uint64_t pair(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (!dense.empty()) return dense[i * k + j];
    auto it = sparse.find(static_cast<std::uint64_t>(i) * k + j);
    return it == sparse.end() ? 0 : it->second;
  }
};

}  // namespace

SymmetricMatrix covariance(const BinaryDataset& data) {
  if (data.n_rows() < 2) fail(ErrorCode::invalid_argument, "covariance needs at least two rows");
  const CoOccurrence co(data);
  const std::size_t k = data.n_cols();
  const double n = static_cast<double>(data.n_rows());
  SymmetricMatrix cov{k, std::vector<double>(k * k, 0.0)};
  for (std::size_t i = 0; i < k; ++i) {
    const double ni = static_cast<double>(co.single[i]);
    cov(i, i) = (ni - ni * ni / n) / (n - 1.0);
    for (std::size_t j = i + 1; j < k; ++j) {
      const double nj = static_cast<double>(co.single[j]);
      const double c = (static_cast<double>(co.pair(i, j)) - ni * nj / n) / (n - 1.0);
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  return cov;
}

// --- PCA -----------------------------------------------------------------------

double PcaSummary::explained_by(std::size_t m) const {
  const std::size_t top = std::min(m, eigenvalues.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < top; ++i) acc += eigenvalues[i];
  return acc / total_variance;
}

PcaSummary pca_summary(const BinaryDataset& data) {
  SymmetricMatrix cov = covariance(data);
  const double trace = cov.trace();
  if (!(trace > 0.0)) fail(ErrorCode::degenerate, "all columns constant: zero total variance");
  EigenDecomposition eig = jacobi_eigen(std::move(cov));
  PcaSummary out;
  out.total_variance = trace;
  out.eigenvalues = std::move(eig.values);
  for (double& l : out.eigenvalues) {
    if (l < 0.0 && l > -1e-10 * std::max(1.0, trace)) l = 0.0;
  }
  return out;
}

std::size_t components_for_variance(const PcaSummary& summary, double frac) {
  if (!(frac > 0.0 && frac <= 1.0)) {
    fail(ErrorCode::invalid_argument, fmt::format("variance fraction {} outside (0, 1]", frac));
  }
  double total = 0.0;
  for (double l : summary.eigenvalues) total += std::max(l, 0.0);
  const double goal = frac * total * (1.0 - 1e-12);
  double acc = 0.0;
  for (std::size_t m = 0; m < summary.eigenvalues.size(); ++m) {
    acc += std::max(summary.eigenvalues[m], 0.0);
    if (acc >= goal) return m + 1;
  }
  return summary.eigenvalues.size();
}

double avg_abs_correlation(const BinaryDataset& data) {
  if (data.n_cols() < 2) fail(ErrorCode::invalid_argument, "correlation needs at least two columns");
  const CoOccurrence co(data);
  const double n = static_cast<double>(data.n_rows());
  std::vector<std::size_t> varying;
  for (std::size_t i = 0; i < data.n_cols(); ++i) {
    if (co.single[i] > 0 && co.single[i] < data.n_rows()) varying.push_back(i);
  }
  if (varying.size() < 2) {
    fail(ErrorCode::undefined_correlation, "fewer than two non-constant columns");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < varying.size(); ++a) {
    const double ni = static_cast<double>(co.single[varying[a]]);
    for (std::size_t b = a + 1; b < varying.size(); ++b) {
      const double nj = static_cast<double>(co.single[varying[b]]);
      const double nij = static_cast<double>(co.pair(varying[a], varying[b]));
      const double num = n * nij - ni * nj;
      const double den = std::sqrt(ni * (n - ni)) * std::sqrt(nj * (n - nj));
      sum += std::min(1.0, std::abs(num) / den);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

// --- k-means ---------------------------------------------------------------------

namespace {

double sq_norm(const std::vector<double>& c) {
  double s = 0.0;
  for (double x : c) s += x * x;
  return s;
}

double sq_distance(std::span<const ColumnIndex> row, const std::vector<double>& centroid,
                   double centroid_sq) {
  double dot = 0.0;
  for (ColumnIndex c : row) dot += centroid[c];
  return std::max(0.0, static_cast<double>(row.size()) - 2.0 * dot + centroid_sq);
}

std::vector<double> as_dense(std::span<const ColumnIndex> row, std::size_t k) {
  std::vector<double> out(k, 0.0);
  for (ColumnIndex c : row) out[c] = 1.0;
  return out;
}

}  // namespace

double clustering_objective(const BinaryDataset& data, const Clustering& c) {
  std::vector<double> norms(c.centroids.size());
  for (std::size_t j = 0; j < c.centroids.size(); ++j) norms[j] = sq_norm(c.centroids[j]);
  double total = 0.0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const std::size_t j = c.assignments[i];
    total += sq_distance(data.row(i), c.centroids[j], norms[j]);
  }
  return total;
}

Clustering kmeans(const BinaryDataset& data, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  const std::size_t n = data.n_rows();
  const std::size_t dim = data.n_cols();
  if (k < 1 || k > n) {
    fail(ErrorCode::invalid_argument, fmt::format("k = {} outside [1, {}]", k, n));
  }
  Rng rng(seed, "kmeans++");

  // k-means++ seeding.
  Clustering out;
  out.k = k;
  out.centroids.push_back(as_dense(data.row(rng.below(n)), dim));
  std::vector<double> d2(n);
  {
    const double norm = sq_norm(out.centroids[0]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_distance(data.row(i), out.centroids[0], norm);
  }
  while (out.centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    out.centroids.push_back(as_dense(data.row(pick), dim));
    const double norm = sq_norm(out.centroids.back());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_distance(data.row(i), out.centroids.back(), norm));
    }
  }

  // Lloyd iterations.
  out.assignments.assign(n, k);  // k = "unassigned" so the first pass always changes
  std::vector<double> norms(k);
  std::vector<double> best(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t j = 0; j < k; ++j) norms[j] = sq_norm(out.centroids[j]);
    bool changed = false;
    std::vector<std::size_t> sizes(k, 0);
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      double dist = sq_distance(data.row(i), out.centroids[0], norms[0]);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = sq_distance(data.row(i), out.centroids[j], norms[j]);
        if (d < dist) {
          dist = d;
          arg = j;
        }
      }
      if (out.assignments[i] != arg) changed = true;
      out.assignments[i] = arg;
      best[i] = dist;
      ++sizes[arg];
      objective += dist;
    }
    // An empty cluster takes over the point lying farthest from its centroid.
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[out.assignments[i]] > 1 && (far == n || best[i] > best[far])) far = i;
      }
      if (far == n) break;
      objective -= best[far];
      --sizes[out.assignments[far]];
      out.assignments[far] = j;
      sizes[j] = 1;
      best[far] = 0.0;
      changed = true;
    }
    assert(out.objective_history.empty() ||
           objective <= out.objective_history.back() + 1e-9 * std::max(1.0, out.objective_history.back()));
    out.objective_history.push_back(objective);
    ++out.iterations;
    if (!changed) break;

    for (auto& c : out.centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (ColumnIndex c : data.row(i)) out.centroids[out.assignments[i]][c] += 1.0;
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double inv = 1.0 / static_cast<double>(sizes[j]);
      for (double& x : out.centroids[j]) x *= inv;
    }
  }
  out.objective = clustering_objective(data, out);
  return out;
}

BinaryDataset cluster_rows(const BinaryDataset& data, const Clustering& c, std::size_t cluster) {
  BinaryDataset::Builder builder(data.n_cols());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    if (c.assignments[i] == cluster) builder.add_row(data.row(i));
  }
  return std::move(builder).build();
}

}  // namespace bindim
