#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bindim/baselines.hpp"
#include "bindim/error.hpp"
#include "bindim/random.hpp"

#ifdef BINDIM_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace bindim;

namespace {

bool throws_code(ErrorCode code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

SymmetricMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  SymmetricMatrix m{n, std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.uniform() * 2 - 1;
  }
  return m;
}

double reconstruction_error(const SymmetricMatrix& m, const EigenDecomposition& e) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < m.n; ++k) v += e.values[k] * e.vectors[k][i] * e.vectors[k][j];
      num += (v - m(i, j)) * (v - m(i, j));
      den += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(num / den);
}

// Columns as 0/1 vectors, 4-row truth table of two fair bits plus a constant.
const BinaryDataset kTruth(3, {{}, {1}, {0}, {0, 1}});

}  // namespace

TEST_CASE("jacobi_eigen reconstructs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto m = random_symmetric(12, seed);
    const auto e = jacobi_eigen(m);
    CHECK(reconstruction_error(m, e) <= 1e-8);
    const double sum = std::accumulate(e.values.begin(), e.values.end(), 0.0);
    CHECK(std::abs(sum - m.trace()) <= 1e-8 * std::max(1.0, std::abs(m.trace())));
    CHECK(std::is_sorted(e.values.rbegin(), e.values.rend()));
  }
}

#ifdef BINDIM_HAVE_EIGEN
TEST_CASE("jacobi_eigen matches a reference solver") {
  const auto m = random_symmetric(20, 42);
  Eigen::MatrixXd a(20, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
  const auto e = jacobi_eigen(m);
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(std::abs(e.values[k] - ref.eigenvalues()(static_cast<Eigen::Index>(19 - k))) <= 1e-9);
  }
}
#endif

TEST_CASE("covariance") {
  const auto c = covariance(BinaryDataset(2, {{}, {1}, {0}, {0, 1}}));
  CHECK(c(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(c(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(c(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("pca_summary") {
  SUBCASE("orthogonal pair") {
    const auto s = pca_summary(BinaryDataset(2, {{}, {1}, {0}, {0, 1}}));
    CHECK(s.eigenvalues[0] == doctest::Approx(1.0 / 3));
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0 / 3));
    CHECK(components_for_variance(s, 0.9) == 2);
    CHECK(s.explained_by(2) == doctest::Approx(1.0));
  }
  SUBCASE("duplicated column") {
    const auto s = pca_summary(BinaryDataset(2, {{}, {0, 1}, {0, 1}, {}}));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.0));
    CHECK(components_for_variance(s, 1.0) == 1);
  }
  SUBCASE("errors") {
    CHECK(throws_code(ErrorCode::invalid_argument, [] { pca_summary(BinaryDataset(2, {{0}})); }));
    CHECK(throws_code(ErrorCode::degenerate, [] { pca_summary(BinaryDataset(2, {{0}, {0}})); }));
  }
}

TEST_CASE("components_for_variance") {
  PcaSummary flat{std::vector<double>(20, 1.0), 20.0};
  CHECK(components_for_variance(flat, 0.9) == 18);
  CHECK(components_for_variance(flat, 1.0) == 20);
  PcaSummary peaked{{0.95, 0.03, 0.02}, 1.0};
  CHECK(components_for_variance(peaked, 0.9) == 1);
  PcaSummary zeros{{2.0, 1.0, 0.0, 0.0}, 3.0};
  CHECK(components_for_variance(zeros, 1.0) == 2);
}

TEST_CASE("avg_abs_correlation") {
  CHECK(avg_abs_correlation(BinaryDataset(2, {{0, 1}, {}, {0, 1}})) == doctest::Approx(1.0));
  CHECK(avg_abs_correlation(BinaryDataset(2, {{0}, {1}, {0}})) == doctest::Approx(1.0));
  CHECK(avg_abs_correlation(kTruth) == doctest::Approx(0.0));
  CHECK(throws_code(ErrorCode::undefined_correlation, [] { avg_abs_correlation(BinaryDataset(2, {{0}, {0}})); }));

  const auto d = gen_independent(50, 10000, MarginProfile{std::vector<double>(50, 0.3)}, 17);
  const double c = avg_abs_correlation(d);
  CHECK(c >= 0.0);
  CHECK(c <= 0.05);
}

TEST_CASE("kmeans") {
  const auto data = gen_independent(8, 60, MarginProfile{std::vector<double>(8, 0.4)}, 2);

  SUBCASE("k = 1 uses the column means") {
    const auto c = kmeans(data, 1, 3);
    const auto m = margins(data);
    for (std::size_t j = 0; j < 8; ++j) CHECK(c.centroids[0][j] == doctest::Approx(m.values[j]));
    double obj = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      std::vector<double> x(8, 0.0);
      for (auto col : data.row(i)) x[col] = 1.0;
      for (std::size_t j = 0; j < 8; ++j) obj += (x[j] - m.values[j]) * (x[j] - m.values[j]);
    }
    CHECK(c.objective == doctest::Approx(obj));
  }
  SUBCASE("k = N is exact") {
    const BinaryDataset small(3, {{0}, {1}, {2}, {0, 1}});
    const auto c = kmeans(small, 4, 1);
    CHECK(c.objective == doctest::Approx(0.0));
  }
  SUBCASE("separated blocks") {
    std::vector<std::vector<ColumnIndex>> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({});
    for (int i = 0; i < 10; ++i) rows.push_back({0, 1, 2, 3});
    const auto c = kmeans(BinaryDataset(4, rows), 2, 5);
    for (std::size_t i = 1; i < 10; ++i) CHECK(c.assignments[i] == c.assignments[0]);
    for (std::size_t i = 11; i < 20; ++i) CHECK(c.assignments[i] == c.assignments[10]);
    CHECK(c.assignments[0] != c.assignments[10]);
    CHECK(c.objective == doctest::Approx(0.0));
  }
  SUBCASE("deterministic, monotone, consistent") {
    const auto a = kmeans(data, 4, 11);
    const auto b = kmeans(data, 4, 11);
    CHECK(a.assignments == b.assignments);
    CHECK(a.objective == b.objective);
    for (std::size_t i = 1; i < a.objective_history.size(); ++i) {
      CHECK(a.objective_history[i] <= a.objective_history[i - 1] + 1e-12);
    }
    CHECK(clustering_objective(data, a) == doctest::Approx(a.objective));
    std::size_t total = 0;
    for (std::size_t k = 0; k < 4; ++k) total += cluster_rows(data, a, k).n_rows();
    CHECK(total == data.n_rows());
  }
  SUBCASE("range checks") {
    CHECK(throws_code(ErrorCode::invalid_argument, [&] { kmeans(data, 0, 1); }));
    CHECK(throws_code(ErrorCode::invalid_argument, [&] { kmeans(data, 61, 1); }));
  }
}
