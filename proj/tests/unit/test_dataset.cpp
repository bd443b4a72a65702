#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bindim/dataset.hpp"
#include "bindim/error.hpp"

using namespace bindim;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a bindim::Error");
  return ErrorCode::invalid_argument;
}

BinaryDataset parse(const std::string& text, FileFormat f, std::size_t min_cols = 0) {
  std::istringstream in(text);
  return load_dataset(in, f, min_cols);
}

}  // namespace

TEST_CASE("construction validates rows") {
  const BinaryDataset d(4, {{0, 2}, {}, {1, 2, 3}});
  CHECK(d.n_rows() == 3);
  CHECK(d.n_cols() == 4);
  CHECK(d.ones() == 5);
  CHECK(d.density() == doctest::Approx(5.0 / 12.0));
  CHECK(d.row(2).size() == 3);

  CHECK(code_of([] { BinaryDataset(3, {{0, 3}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { BinaryDataset(3, {{2, 1}}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { BinaryDataset(3, {{1, 1}}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("fimi parsing") {
  SUBCASE("dedup, blank lines and CRLF") {
    const auto d = parse("3 1 3\r\n\n0\n", FileFormat::fimi);
    CHECK(d.n_rows() == 3);
    CHECK(d.n_cols() == 4);
    CHECK(d.to_rows() == std::vector<std::vector<ColumnIndex>>{{1, 3}, {}, {0}});
  }
  SUBCASE("min_cols widens") { CHECK(parse("0 1\n", FileFormat::fimi, 10).n_cols() == 10); }
  SUBCASE("garbage is a format error") {
    CHECK(code_of([] { parse("1 x 2\n", FileFormat::fimi); }) == ErrorCode::format);
    CHECK(code_of([] { parse("-1\n", FileFormat::fimi); }) == ErrorCode::format);
  }
}

TEST_CASE("dense01 parsing") {
  const auto d = parse("0101\n\n1,1,0,0\n0 0 0 0\n", FileFormat::dense01);
  CHECK(d.n_rows() == 3);
  CHECK(d.n_cols() == 4);
  CHECK(d.to_rows() == std::vector<std::vector<ColumnIndex>>{{1, 3}, {0, 1}, {}});
  CHECK(code_of([] { parse("011\n01\n", FileFormat::dense01); }) == ErrorCode::format);
  CHECK(code_of([] { parse("012\n", FileFormat::dense01); }) == ErrorCode::format);
}

TEST_CASE("save/load round trip") {
  const BinaryDataset d(6, {{0, 5}, {}, {1, 2, 3}, {4}});
  for (auto f : {FileFormat::fimi, FileFormat::dense01}) {
    std::ostringstream out;
    save_dataset(out, d, f);
    CHECK(parse(out.str(), f, d.n_cols()) == d);
  }
  CHECK(parse_file_format("fimi") == FileFormat::fimi);
  CHECK(code_of([] { parse_file_format("csv"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("margins") {
  const BinaryDataset d(3, {{0}, {0, 1}, {}, {0}});
  const auto m = margins(d);
  CHECK(m.values == std::vector<double>{0.75, 0.25, 0.0});
}

TEST_CASE("permute_columns keeps margins and is seeded") {
  const auto p = random_profile(30, ProfileKind::margin, 4);
  const auto d = gen_independent(30, 200, p, 8);
  const auto a = permute_columns(d, 1);
  const auto b = permute_columns(d, 1);
  const auto c = permute_columns(d, 2);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(margins(a).values == margins(d).values);
  CHECK(a.ones() == d.ones());
}

TEST_CASE("copy_columns") {
  const BinaryDataset d(2, {{1}, {0, 1}});
  const auto c = copy_columns(d, 3);
  CHECK(c.n_cols() == 6);
  CHECK(c.to_rows() == std::vector<std::vector<ColumnIndex>>{{3, 4, 5}, {0, 1, 2, 3, 4, 5}});
}

TEST_CASE("sample_without_replacement") {
  const auto s = sample_without_replacement(100, 40, 5);
  CHECK(s.size() == 40);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 40);
  CHECK(*std::max_element(s.begin(), s.end()) < 100);
  CHECK(s == sample_without_replacement(100, 40, 5));
  const auto all = sample_without_replacement(10, 10, 1);
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == 10);
}

TEST_CASE("random_subset") {
  const auto d = gen_independent(20, 50, MarginProfile{std::vector<double>(20, 0.4)}, 3);
  const auto rows = random_subset(d, SubsetMode::rows, 10, 1);
  CHECK(rows.n_rows() == 10);
  CHECK(rows.n_cols() == 20);
  const auto cols = random_subset(d, SubsetMode::cols, 5, 1);
  CHECK(cols.n_rows() == 50);
  CHECK(cols.n_cols() == 5);
  CHECK(code_of([&] { random_subset(d, SubsetMode::cols, 21, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("gen_independent margins converge") {
  MarginProfile p{{0.1, 0.5, 0.9, 0.0, 1.0}};
  const auto d = gen_independent(5, 20000, p, 12);
  const auto m = margins(d);
  for (std::size_t j = 0; j < 5; ++j) {
    // 4 sigma of a Bernoulli mean over 20000 draws.
    const double sd = std::sqrt(p.values[j] * (1 - p.values[j]) / 20000.0);
    CHECK(std::abs(m.values[j] - p.values[j]) <= 4 * sd + 1e-12);
  }
  CHECK(gen_independent(5, 100, p, 1) == gen_independent(5, 100, p, 1));
}

TEST_CASE("random_profile bounds") {
  const auto p = random_profile(500, ProfileKind::margin, 9);
  const double top = *std::max_element(p.values.begin(), p.values.end());
  CHECK(top <= 1.0);
  CHECK(std::all_of(p.values.begin(), p.values.end(), [](double v) { return v >= 0.0; }));
  CHECK(p.kind == ProfileKind::margin);
}

TEST_CASE("gen_markov") {
  SUBCASE("t = 0 gives constant rows") {
    const auto d = gen_markov(10, 200, MarginProfile{std::vector<double>(10, 0.0), ProfileKind::reversal}, 3);
    for (std::size_t i = 0; i < d.n_rows(); ++i) CHECK((d.row(i).empty() || d.row(i).size() == 10));
  }
  SUBCASE("t = 1 alternates") {
    const auto d = gen_markov(6, 50, MarginProfile{std::vector<double>(6, 1.0), ProfileKind::reversal}, 3);
    for (std::size_t i = 0; i < d.n_rows(); ++i) CHECK(d.row(i).size() == 3);
  }
  SUBCASE("first column is a fair coin") {
    const auto d = gen_markov(3, 20000, MarginProfile{{0.2, 0.2, 0.2}, ProfileKind::reversal}, 5);
    CHECK(std::abs(margins(d).values[0] - 0.5) < 4 * 0.5 / std::sqrt(20000.0));
  }
  CHECK(t_measure(MarginProfile{{0.5, 0.5}, ProfileKind::reversal}) == doctest::Approx(1.0));
}

TEST_CASE("edge cases") {
  const auto dup = parse("5 5 5\n", FileFormat::fimi);
  CHECK(dup.n_cols() == 6);
  CHECK(dup.to_rows() == std::vector<std::vector<ColumnIndex>>{{5}});
  CHECK(parse("", FileFormat::fimi).n_rows() == 0);
  CHECK(code_of([] { margins(BinaryDataset(3, {})); }) == ErrorCode::undefined_margins);
  CHECK(code_of([] { copy_columns(BinaryDataset(1, {{0}}), 0); }) == ErrorCode::invalid_argument);
  CHECK(t_measure(MarginProfile{{0.1, 0.2}, ProfileKind::reversal}) == doctest::Approx(0.5));
}

TEST_CASE("random_profile values average a quarter") {
  // E[U[0, U[0,1]]] = 1/4; one value per profile keeps the draws independent.
  constexpr int n = 20000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = random_profile(3, ProfileKind::margin, static_cast<std::uint64_t>(i)).values[1];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - 0.25) <= 3 * sd);
}
