#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "bindim/error.hpp"
#include "bindim/harness.hpp"

using namespace bindim;

namespace {

std::string tsv(const std::vector<Table>& tables) {
  std::ostringstream out;
  write_tsv(out, tables);
  return out.str();
}

ExperimentSpec small_spec(std::string name) {
  ExperimentSpec s;
  s.name = std::move(name);
  s.replicates = 3;
  s.ks = {40, 60};
  s.n_rows = 600;
  s.subset_rows = 200;
  s.subset_cols = 20;
  return s;
}

}  // namespace

TEST_CASE("write_tsv layout") {
  Table t{"demo", {"a", "b", "c"}, {{std::int64_t{1}, 0.5, std::string("x")}, {Cell{}, 1.0 / 3, std::string("y")}},
          {{"answer", std::int64_t{42}}}};
  std::ostringstream out;
  write_tsv(out, t);
  CHECK(out.str() == "# demo\na\tb\tc\n1\t0.5\tx\nNA\t0.3333333333\ty\n# answer\t42\n");
}

TEST_CASE("tables_to_json") {
  Table t{"demo", {"a"}, {{2.5}, {Cell{}}}, {{"k", std::string("v")}}};
  const auto j = nlohmann::json::parse(tables_to_json({t}));
  CHECK(j["tables"][0]["name"] == "demo");
  CHECK(j["tables"][0]["rows"][0][0] == 2.5);
  CHECK(j["tables"][0]["rows"][1][0].is_null());
  CHECK(j["tables"][0]["summary"]["k"] == "v");
}

TEST_CASE("statistics helpers") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const std::vector<double> z{1, 8, 27, 64, 125};
  CHECK(pearson(x, y) == doctest::Approx(1.0));
  CHECK(spearman(x, z) == doctest::Approx(1.0));
  CHECK(pearson(x, z) < 1.0);
  CHECK(spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 2, 3}) == doctest::Approx(1.0));
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("dataset_report") {
  DimConfig cfg;
  const auto rep = independent_replicate(100, 2000, 0, 1);
  const auto r = dataset_report(rep.data, "indep", cfg);
  CHECK(r.n_cols == 100);
  CHECK(r.n_rows == 2000);
  CHECK(r.errors.empty());
  REQUIRE(r.c_hat);
  CHECK(*r.c_hat >= 0.78);
  CHECK(*r.c_hat <= 0.88);
  REQUIRE(r.ncd);
  CHECK(std::abs(static_cast<double>(*r.ncd) - 100.0) <= 15.0);
  CHECK(*r.ncd_over_k == doctest::Approx(static_cast<double>(*r.ncd) / 100.0));

  const auto fixed = dataset_report(gen_independent(100, 2000, MarginProfile{std::vector<double>(100, 0.3)}, 4),
                                    "fixed", cfg);
  REQUIRE(fixed.c_hat);
  CHECK(*fixed.c_hat >= 0.78);
  CHECK(*fixed.c_hat <= 0.88);
  REQUIRE(fixed.ncd);
  CHECK(std::abs(static_cast<double>(*fixed.ncd) - 100.0) <= 15.0);

  const auto table = reports_table({r}, false);
  CHECK(std::find(table.columns.begin(), table.columns.end(), "wall_time") == table.columns.end());
  CHECK(reports_table({r}, true).columns.size() == table.columns.size() + 1);
}

TEST_CASE("dataset_report with an empty dataset") {
  CHECK_THROWS_AS(dataset_report(BinaryDataset(5, {}), "empty", DimConfig{}), Error);
}

TEST_CASE("experiments are reproducible and thread independent") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    auto spec = small_spec(name);
    const auto a = tsv(run_experiment(spec));
    spec.threads = 3;
    const auto b = tsv(run_experiment(spec));
    CHECK(a == b);
    CHECK(!a.empty());
  }
  CHECK_THROWS_AS(run_experiment(small_spec("nope")), Error);
}

TEST_CASE("mixture dimension tracks component dimension") {
  auto spec = small_spec("cluster-dims");
  spec.replicates = 12;
  spec.n_rows = 1200;
  const auto tables = run_experiment(spec);
  const auto it = std::find_if(tables.begin(), tables.end(), [](const Table& t) { return t.name == "mixture-dims"; });
  REQUIRE(it != tables.end());
  for (const auto& [k, v] : it->summary) {
    if (k == "pearson_cd") CHECK(std::get<double>(v) > 0.0);
  }
}
