#include "bindim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "bindim/error.hpp"
#include "bindim/random.hpp"
#include "parallel.hpp"

namespace bindim {

using ordered_json = nlohmann::ordered_json;

// --- tables --------------------------------------------------------------------

namespace {

std::string render(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "NA";
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? fmt::format("{:.10g}", v) : std::string("NA");
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return fmt::format("{}", v);
        }
      },
      cell);
}

ordered_json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
        } else {
          return v;
        }
      },
      cell);
}

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }
Cell count(std::size_t v) { return Cell{static_cast<std::int64_t>(v)}; }

}  // namespace

void write_tsv(std::ostream& out, const Table& table) {
  if (!table.name.empty()) fmt::print(out, "# {}\n", table.name);
  fmt::print(out, "{}\n", fmt::join(table.columns, "\t"));
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (const auto& c : row) cells.push_back(render(c));
    fmt::print(out, "{}\n", fmt::join(cells, "\t"));
  }
  for (const auto& [key, value] : table.summary) fmt::print(out, "# {}\t{}\n", key, render(value));
}

void write_tsv(std::ostream& out, const std::vector<Table>& tables) {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out << '\n';
    write_tsv(out, tables[i]);
  }
}

std::string tables_to_json(const std::vector<Table>& tables) {
  ordered_json doc;
  doc["tables"] = ordered_json::array();
  for (const auto& t : tables) {
    ordered_json jt;
    jt["name"] = t.name;
    jt["columns"] = t.columns;
    jt["rows"] = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json jr = ordered_json::array();
      for (const auto& c : row) jr.push_back(cell_json(c));
      jt["rows"].push_back(std::move(jr));
    }
    jt["summary"] = ordered_json::object();
    for (const auto& [key, value] : t.summary) jt["summary"][key] = cell_json(value);
    doc["tables"].push_back(std::move(jt));
  }
  return doc.dump(2);
}

std::string to_json(const DimensionEstimate& est, const CdfSource& source) {
  ordered_json j;
  j["slope"] = est.slope;
  j["intercept"] = est.intercept;
  j["r1"] = est.r1;
  j["r2"] = est.r2;
  j["grid_n"] = est.grid_n;
  j["basis"] = std::string(to_string(source.kind));
  j["rows"] = source.n_rows;
  j["sample"] = source.sample;
  ordered_json pts = ordered_json::array();
  for (const auto& [x, y] : est.points) pts.push_back({x, y});
  j["points"] = std::move(pts);
  return j.dump(2);
}

std::string to_json(const NormalizedResult& res) {
  ordered_json j;
  j["h"] = res.h;
  j["s"] = res.s;
  j["cd_data"] = res.cd_data;
  j["cd_ind"] = res.cd_ind;
  j["cd_matched"] = res.cd_matched;
  j["prop3_estimate"] = res.prop3_estimate;
  return j.dump(2);
}

// --- statistics ---------------------------------------------------------------------

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::invalid_argument, "pearson needs paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::undefined_correlation, "constant sample");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

// --- report ---------------------------------------------------------------------------

DatasetReport dataset_report(const BinaryDataset& data, const std::string& name, const DimConfig& cfg,
                             const ExecOptions& exec) {
  const auto start = std::chrono::steady_clock::now();
  if (data.n_rows() == 0) fail(ErrorCode::empty_dataset, "dataset '" + name + "' has no rows");
  cfg.validate();
  DatasetReport rep;
  rep.name = name;
  rep.n_cols = data.n_cols();
  rep.n_rows = data.n_rows();
  rep.ones = data.ones();
  rep.density = data.density();

  try {
    rep.cd_data = cd_a(data_cdf(data, cfg, exec), cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
  } catch (const Error& e) {
    rep.errors["cd_data"] = fmt::format("{}: {}", to_string(e.code()), e.what());
  }
  try {
    const DistanceCdf icdf = ind_cdf(data, cfg, exec);
    const Moments m = mean_var(icdf);
    const double sigma = std::sqrt(m.variance);
    if (sigma > 0.0) rep.mu_over_sigma = m.mean / sigma;
    rep.cd_ind = cd_a(icdf, cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
    if (m.mean > 0.0) rep.c_hat = *rep.cd_ind * sigma / m.mean;
  } catch (const Error& e) {
    rep.errors["cd_ind"] = fmt::format("{}: {}", to_string(e.code()), e.what());
  }
  if (rep.cd_data && rep.cd_ind) {
    try {
      rep.prop3 = prop3_estimate(*rep.cd_data, *rep.cd_ind, data.n_cols());
      const NormalizedResult norm = normalize_dimension(*rep.cd_data, *rep.cd_ind, data.n_cols(), cfg);
      rep.ncd = norm.h;
      rep.ncd_over_k = static_cast<double>(norm.h) / static_cast<double>(data.n_cols());
    } catch (const Error& e) {
      rep.errors["ncd"] = fmt::format("{}: {}", to_string(e.code()), e.what());
    }
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Table reports_table(const std::vector<DatasetReport>& reports, bool with_timing) {
  Table t;
  t.name = "report";
  t.columns = {"name", "K", "N", "ones", "density_pct", "cd", "cd_ind", "mu_over_sigma",
               "c_hat", "ncd", "ncd_over_K", "prop3_estimate"};
  if (with_timing) t.columns.push_back("wall_time_s");
  t.columns.push_back("errors");
  for (const auto& r : reports) {
    std::vector<Cell> row{r.name,          count(r.n_cols),  count(r.n_rows),
                          count(r.ones),   r.density * 100.0, opt(r.cd_data),
                          opt(r.cd_ind),   opt(r.mu_over_sigma), opt(r.c_hat),
                          r.ncd ? count(*r.ncd) : Cell{}, opt(r.ncd_over_k), opt(r.prop3)};
    if (with_timing) row.emplace_back(r.wall_time);
    std::string errs;
    for (const auto& [field, msg] : r.errors) errs += (errs.empty() ? "" : "; ") + field + "=" + msg;
    row.emplace_back(errs.empty() ? Cell{} : Cell{errs});
    t.rows.push_back(std::move(row));
  }
  return t;
}

// --- synthetic families -----------------------------------------------------------------

namespace {

std::uint64_t family_index(std::size_t n_cols, std::size_t replicate) {
  return (static_cast<std::uint64_t>(n_cols) << 32) | static_cast<std::uint64_t>(replicate);
}

}  // namespace

IndependentReplicate independent_replicate(std::size_t n_cols, std::size_t n_rows, std::size_t replicate,
                                           std::uint64_t seed) {
  const auto idx = family_index(n_cols, replicate);
  IndependentReplicate out;
  out.margins = random_profile(n_cols, ProfileKind::margin, derive_seed(seed, "indep-profile", idx));
  out.data = gen_independent(n_cols, n_rows, out.margins, derive_seed(seed, "indep-data", idx));
  return out;
}

MarkovReplicate markov_replicate(std::size_t n_cols, std::size_t n_rows, std::size_t replicate,
                                 std::uint64_t seed) {
  const auto idx = family_index(n_cols, replicate);
  MarkovReplicate out;
  out.reversal = random_profile(n_cols, ProfileKind::reversal, derive_seed(seed, "markov-profile", idx));
  out.data = gen_markov(n_cols, n_rows, out.reversal, derive_seed(seed, "markov-data", idx));
  return out;
}

// --- experiments ------------------------------------------------------------------------

namespace {

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<T> out(count);
  const unsigned workers =
      std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  detail::run_workers(workers, [&](unsigned w) {
    for (std::size_t i = w; i < count; i += workers) out[i] = fn(i);
  });
  return out;
}

std::string describe(const Error& e) { return fmt::format("{}: {}", to_string(e.code()), e.what()); }

/// Everything the independent-columns experiments need from one replicate.
struct Analysis {
  std::size_t k = 0;
  std::size_t replicate = 0;
  double mu = NAN;      // of Z_D
  double sigma = NAN;
  double t = NAN;       // t_measure, Markov family only
  bool all_t_below_half = false;
  std::optional<double> cd;     // grid N from cfg
  std::optional<double> cd_n1;  // grid N = 1
  std::optional<double> cd_ind;
  std::optional<double> prop2_cd;
  std::optional<std::size_t> ncd;
  std::optional<double> prop3;
  std::string error;
};

DimConfig replicate_config(const ExperimentSpec& spec, std::string_view family, std::uint64_t idx) {
  DimConfig cfg = spec.cfg;
  cfg.seed = derive_seed(spec.seed, family, idx);
  return cfg;
}

constexpr double kProp2Low = 0.75;
constexpr double kProp2High = 1.0;

void analyze(Analysis& a, const BinaryDataset& data, const DimConfig& cfg, const MarginProfile* margins) {
  const ExecOptions exec{.threads = 1};
  try {
    const DistanceCdf dcdf = data_cdf(data, cfg, exec);
    const Moments m = mean_var(dcdf);
    a.mu = m.mean;
    a.sigma = std::sqrt(m.variance);
    a.cd = cd_a(dcdf, cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
    a.cd_n1 = cd_a(dcdf, cfg.alpha1, cfg.alpha2, 1).slope;
    a.cd_ind = cd_a(ind_cdf(data, cfg, exec), cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
    a.prop3 = prop3_estimate(*a.cd, *a.cd_ind, data.n_cols());
    a.ncd = normalize_dimension(*a.cd, *a.cd_ind, data.n_cols(), cfg).h;
  } catch (const Error& e) {
    a.error = describe(e);
  }
  // The lower radius sits in the left tail, which Monte Carlo may not reach.
  if (margins) {
    try {
      a.prop2_cd = prop2_check(*margins, kProp2Low, kProp2High, cfg).cd;
    } catch (const Error&) {
    }
  }
}

struct Job {
  std::size_t k;
  std::size_t replicate;
};

std::vector<Job> jobs_for(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (std::size_t k : spec.ks) {
    for (std::size_t r = 0; r < spec.replicates; ++r) jobs.push_back({k, r});
  }
  return jobs;
}

std::vector<Analysis> independent_family(const ExperimentSpec& spec) {
  const auto jobs = jobs_for(spec);
  return parallel_map<Analysis>(jobs.size(), spec.threads, [&](std::size_t i) {
    Analysis a;
    a.k = jobs[i].k;
    a.replicate = jobs[i].replicate;
    const auto rep = independent_replicate(a.k, spec.n_rows, a.replicate, spec.seed);
    analyze(a, rep.data, replicate_config(spec, "indep-cfg", family_index(a.k, a.replicate)), &rep.margins);
    return a;
  });
}

std::vector<Analysis> markov_family(const ExperimentSpec& spec) {
  const auto jobs = jobs_for(spec);
  return parallel_map<Analysis>(jobs.size(), spec.threads, [&](std::size_t i) {
    Analysis a;
    a.k = jobs[i].k;
    a.replicate = jobs[i].replicate;
    const auto rep = markov_replicate(a.k, spec.n_rows, a.replicate, spec.seed);
    a.t = t_measure(rep.reversal);
    a.all_t_below_half = std::all_of(rep.reversal.values.begin() + 1, rep.reversal.values.end(),
                                     [](double t) { return t < 0.5; });
    analyze(a, rep.data, replicate_config(spec, "markov-cfg", family_index(a.k, a.replicate)), nullptr);
    return a;
  });
}

Cell err_cell(const Analysis& a) { return a.error.empty() ? Cell{} : Cell{a.error}; }
Cell ncd_cell(const Analysis& a) { return a.ncd ? count(*a.ncd) : Cell{}; }

/// Summary correlation that tolerates too-small or constant samples.
Cell safe_corr(std::span<const double> x, std::span<const double> y, bool rank) {
  if (x.size() < 2) return {};
  try {
    return rank ? spearman(x, y) : pearson(x, y);
  } catch (const Error&) {
    return {};
  }
}

std::vector<Table> indep_box(const ExperimentSpec& spec) {
  const auto results = independent_family(spec);
  Table t;
  t.name = "indep-box";
  t.columns = {"K", "replicate", "mu", "ncd", "ncd_over_K", "error"};
  for (const auto& a : results) {
    t.rows.push_back({count(a.k), count(a.replicate), a.mu, ncd_cell(a),
                      a.ncd ? Cell{static_cast<double>(*a.ncd) / static_cast<double>(a.k)} : Cell{},
                      err_cell(a)});
  }
  for (std::size_t k : spec.ks) {
    std::vector<double> ncds;
    for (const auto& a : results) {
      if (a.k == k && a.ncd) ncds.push_back(static_cast<double>(*a.ncd));
    }
    t.summary.emplace_back(fmt::format("median_ncd_K{}", k), ncds.empty() ? Cell{} : Cell{median(ncds)});
    if (!ncds.empty()) {
      const auto [lo, hi] = std::minmax_element(ncds.begin(), ncds.end());
      t.summary.emplace_back(fmt::format("min_ncd_K{}", k), *lo);
      t.summary.emplace_back(fmt::format("max_ncd_K{}", k), *hi);
    }
    t.summary.emplace_back(fmt::format("failed_K{}", k), count(spec.replicates - ncds.size()));
  }
  return {t};
}

std::vector<Table> slope_musigma(const ExperimentSpec& spec) {
  const auto results = independent_family(spec);
  Table t;
  t.name = "slope-musigma";
  t.columns = {"K", "replicate", "mu_over_sigma", "cd", "error"};
  std::vector<std::pair<double, double>> pts;
  for (const auto& a : results) {
    const double x = a.mu / a.sigma;
    t.rows.push_back({count(a.k), count(a.replicate), x, opt(a.cd), err_cell(a)});
    if (a.cd && std::isfinite(x)) pts.emplace_back(x, *a.cd);
  }
  if (pts.size() >= 2) {
    const auto [slope, intercept] = least_squares_line(pts);
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [x, y] : pts) {
      sxy += x * y;
      sxx += x * x;
    }
    t.summary.emplace_back("slope", slope);
    t.summary.emplace_back("intercept", intercept);
    t.summary.emplace_back("slope_through_origin", sxy / sxx);
    t.summary.emplace_back("c_alpha", c_alpha(spec.cfg.alpha1));
  }
  return {t};
}

std::vector<Table> grid_n(const ExperimentSpec& spec) {
  const auto results = independent_family(spec);
  Table t;
  t.name = "grid-n";
  t.columns = {"K", "replicate", "cd_N1", fmt::format("cd_N{}", spec.cfg.grid_n), "rel_diff", "error"};
  double worst = 0.0;
  std::size_t within = 0;
  std::size_t total = 0;
  for (const auto& a : results) {
    Cell rel;
    if (a.cd && a.cd_n1) {
      const double d = std::abs(*a.cd - *a.cd_n1) / *a.cd_n1;
      rel = d;
      worst = std::max(worst, d);
      within += d <= 0.1 ? 1 : 0;
      ++total;
    }
    t.rows.push_back({count(a.k), count(a.replicate), opt(a.cd_n1), opt(a.cd), rel, err_cell(a)});
  }
  t.summary.emplace_back("max_rel_diff", worst);
  t.summary.emplace_back("fraction_within_10pct",
                         total ? Cell{static_cast<double>(within) / static_cast<double>(total)} : Cell{});
  return {t};
}

std::vector<Table> cd_vs_mu(const ExperimentSpec& spec) {
  const auto results = independent_family(spec);
  Table t;
  t.name = "cd-vs-mu";
  t.columns = {"K", "replicate", "mu", "cd", "prop2_cd", "error"};
  std::vector<double> mus;
  std::vector<double> cds;
  for (const auto& a : results) {
    t.rows.push_back({count(a.k), count(a.replicate), a.mu, opt(a.cd), opt(a.prop2_cd), err_cell(a)});
    if (a.cd) {
      mus.push_back(a.mu);
      cds.push_back(*a.cd);
    }
  }
  t.summary.emplace_back("pearson_mu_cd", safe_corr(mus, cds, false));
  for (std::size_t k : spec.ks) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& a : results) {
      if (a.k == k && a.cd) pts.emplace_back(a.mu, *a.cd);
    }
    if (pts.size() >= 2) {
      try {
        t.summary.emplace_back(fmt::format("slope_K{}", k), least_squares_line(pts).first);
      } catch (const Error&) {
        t.summary.emplace_back(fmt::format("slope_K{}", k), Cell{});
      }
    }
  }
  return {t};
}

std::vector<Table> ncd_vs_sparsity(const ExperimentSpec& spec) {
  const auto results = independent_family(spec);
  Table t;
  t.name = "ncd-vs-sparsity";
  t.columns = {"K", "replicate", "mu", "ncd", "ncd_over_K", "error"};
  std::vector<double> mus;
  std::vector<double> ratios;
  for (const auto& a : results) {
    Cell ratio;
    if (a.ncd) {
      const double r = static_cast<double>(*a.ncd) / static_cast<double>(a.k);
      ratio = r;
      mus.push_back(a.mu);
      ratios.push_back(r);
    }
    t.rows.push_back({count(a.k), count(a.replicate), a.mu, ncd_cell(a), ratio, err_cell(a)});
  }
  t.summary.emplace_back("pearson_mu_ncd_over_K", safe_corr(mus, ratios, false));
  return {t};
}

std::vector<Table> markov(const ExperimentSpec& spec) {
  const auto results = markov_family(spec);
  Table t;
  t.name = "markov";
  t.columns = {"K", "replicate", "t", "all_t_below_half", "cd", "cd_ind", "ncd", "prop3_estimate", "error"};
  std::vector<double> ts;
  std::vector<double> cds;
  std::size_t eligible = 0;
  std::size_t holds = 0;
  for (const auto& a : results) {
    t.rows.push_back({count(a.k), count(a.replicate), a.t, count(a.all_t_below_half ? 1 : 0), opt(a.cd),
                      opt(a.cd_ind), ncd_cell(a), opt(a.prop3), err_cell(a)});
    if (a.cd) {
      ts.push_back(a.t);
      cds.push_back(*a.cd);
    }
    if (a.all_t_below_half && a.cd && a.cd_ind) {
      ++eligible;
      holds += *a.cd <= *a.cd_ind ? 1 : 0;
    }
  }
  t.summary.emplace_back("spearman_t_cd", safe_corr(ts, cds, true));
  t.summary.emplace_back("conjecture_eligible", count(eligible));
  t.summary.emplace_back("conjecture_fraction",
                         eligible ? Cell{static_cast<double>(holds) / static_cast<double>(eligible)} : Cell{});
  return {t};
}

std::vector<Table> ncd_vs_estimate(const ExperimentSpec& spec) {
  Table t;
  t.name = "ncd-vs-estimate";
  t.columns = {"family", "K", "replicate", "prop3_estimate", "ncd", "abs_gap_over_K", "error"};
  for (const auto& [family, results] :
       {std::pair{std::string("independent"), independent_family(spec)},
        std::pair{std::string("markov"), markov_family(spec)}}) {
    std::size_t within = 0;
    std::size_t total = 0;
    std::vector<double> est;
    std::vector<double> ncd;
    for (const auto& a : results) {
      Cell gap;
      if (a.ncd && a.prop3) {
        const double g = std::abs(static_cast<double>(*a.ncd) - *a.prop3) / static_cast<double>(a.k);
        gap = g;
        within += g <= 0.15 ? 1 : 0;
        ++total;
        est.push_back(*a.prop3);
        ncd.push_back(static_cast<double>(*a.ncd));
      }
      t.rows.push_back({family, count(a.k), count(a.replicate), opt(a.prop3), ncd_cell(a), gap, err_cell(a)});
    }
    t.summary.emplace_back(family + "_fraction_within_15pct",
                           total ? Cell{static_cast<double>(within) / static_cast<double>(total)} : Cell{});
    t.summary.emplace_back(family + "_pearson", safe_corr(est, ncd, false));
  }
  return {t};
}

BinaryDataset default_structured_data(const ExperimentSpec& spec) {
  return markov_replicate(200, spec.n_rows, 0, derive_seed(spec.seed, "stand-in")).data;
}

std::vector<Table> pca_subsets(const ExperimentSpec& spec) {
  const BinaryDataset data = spec.input ? *spec.input : default_structured_data(spec);
  const std::size_t rows = std::min(spec.subset_rows, data.n_rows());
  const std::size_t cols = std::min(spec.subset_cols, data.n_cols());
  struct Row {
    std::optional<std::size_t> ncd;
    std::optional<std::size_t> pca90;
    std::optional<double> corr;
    std::string error;
  };
  const auto results = parallel_map<Row>(spec.replicates, spec.threads, [&](std::size_t i) {
    Row r;
    try {
      const auto sub_rows = random_subset(data, SubsetMode::rows, rows, derive_seed(spec.seed, "pca-rows", i));
      const auto sub = random_subset(sub_rows, SubsetMode::cols, cols, derive_seed(spec.seed, "pca-cols", i));
      DimConfig cfg = replicate_config(spec, "pca-cfg", i);
      try {
        r.ncd = normalized_cd(sub, cfg, {.threads = 1}).h;
      } catch (const Error& e) {
        r.error = describe(e);
      }
      r.pca90 = components_for_variance(pca_summary(sub), 0.9);
      r.corr = avg_abs_correlation(sub);
    } catch (const Error& e) {
      if (r.error.empty()) r.error = describe(e);
    }
    return r;
  });

  Table t;
  t.name = "pca-subsets";
  t.columns = {"subset", "M", "ncd", "ncd_over_M", "pca90", "pca90_over_M", "avg_corr", "error"};
  const double m = static_cast<double>(cols);
  std::vector<double> ncd_x, pca_y, ncd_c, corr_y;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    t.rows.push_back({count(i), count(cols), r.ncd ? count(*r.ncd) : Cell{},
                      r.ncd ? Cell{static_cast<double>(*r.ncd) / m} : Cell{}, r.pca90 ? count(*r.pca90) : Cell{},
                      r.pca90 ? Cell{static_cast<double>(*r.pca90) / m} : Cell{}, opt(r.corr),
                      r.error.empty() ? Cell{} : Cell{r.error}});
    if (r.ncd && r.pca90) {
      ncd_x.push_back(static_cast<double>(*r.ncd) / m);
      pca_y.push_back(static_cast<double>(*r.pca90) / m);
    }
    if (r.ncd && r.corr) {
      ncd_c.push_back(static_cast<double>(*r.ncd) / m);
      corr_y.push_back(*r.corr);
    }
  }
  t.summary.emplace_back("corr_ncd_pca90", safe_corr(ncd_x, pca_y, false));
  t.summary.emplace_back("corr_ncd_avgcorr", safe_corr(ncd_c, corr_y, false));

  // Whole-data comparison, affordable for moderate K only.
  if (data.n_cols() <= 1000 && data.n_rows() >= 2) {
    try {
      DimConfig cfg = replicate_config(spec, "pca-whole", 0);
      const auto whole = normalized_cd(data, cfg, {.threads = spec.threads});
      const PcaSummary pca = pca_summary(data);
      t.summary.emplace_back("whole_ncd", count(whole.h));
      t.summary.emplace_back("whole_pca_pct_by_ncd", 100.0 * pca.explained_by(whole.h));
      t.summary.emplace_back("whole_pca90", count(components_for_variance(pca, 0.9)));
    } catch (const Error& e) {
      t.summary.emplace_back("whole_error", describe(e));
    }
  }
  return {t};
}

/// cd and ncd of one dataset with a per-purpose seed; errors become NA.
std::pair<std::optional<double>, std::optional<std::size_t>> dims_of(const BinaryDataset& data, const DimConfig& cfg,
                                                                     std::string* error) {
  std::optional<double> cd;
  std::optional<std::size_t> ncd;
  try {
    const auto res = normalized_cd(data, cfg, {.threads = 1});
    cd = res.cd_data;
    ncd = res.h;
  } catch (const Error& e) {
    if (error) *error = describe(e);
    try {
      cd = cd_a(data_cdf(data, cfg), cfg.alpha1, cfg.alpha2, cfg.grid_n).slope;
    } catch (const Error&) {
    }
  }
  return {cd, ncd};
}

struct Mixture {
  std::vector<BinaryDataset> parts;
  BinaryDataset whole;
};

Mixture make_mixture(std::size_t n_cols, std::size_t n_rows, std::size_t replicate, std::uint64_t seed) {
  constexpr std::size_t kParts = 4;
  Mixture m;
  BinaryDataset::Builder all(n_cols);
  for (std::size_t p = 0; p < kParts; ++p) {
    const auto idx = family_index(n_cols, replicate * kParts + p);
    const auto margins = random_profile(n_cols, ProfileKind::margin, derive_seed(seed, "mix-profile", idx));
    m.parts.push_back(gen_independent(n_cols, n_rows / kParts, margins, derive_seed(seed, "mix-data", idx)));
    for (std::size_t i = 0; i < m.parts.back().n_rows(); ++i) all.add_row(m.parts.back().row(i));
  }
  m.whole = std::move(all).build();
  return m;
}

std::vector<Table> cluster_dims(const ExperimentSpec& spec) {
  const std::size_t k_cols = spec.ks.empty() ? 100 : spec.ks.front();
  std::vector<Table> out;

  // Per-cluster dimensions of one dataset.
  {
    const BinaryDataset data = spec.input ? *spec.input : make_mixture(k_cols, spec.n_rows, 0, spec.seed).whole;
    const Clustering cl = kmeans(data, spec.clusters, derive_seed(spec.seed, "cluster-kmeans"));
    Table t;
    t.name = "cluster-dims";
    t.columns = {"data", "rows", "cd", "ncd", "error"};
    std::vector<double> cds;
    std::vector<double> ncds;
    for (std::size_t c = 0; c < spec.clusters; ++c) {
      const BinaryDataset part = cluster_rows(data, cl, c);
      std::string err;
      std::optional<double> cd;
      std::optional<std::size_t> ncd;
      if (part.n_rows() > 0) {
        std::tie(cd, ncd) = dims_of(part, replicate_config(spec, "cluster-part", c), &err);
      } else {
        err = "empty cluster";
      }
      if (cd) cds.push_back(*cd);
      if (ncd) ncds.push_back(static_cast<double>(*ncd));
      t.rows.push_back({fmt::format("cluster {}", c + 1), count(part.n_rows()), opt(cd),
                        ncd ? count(*ncd) : Cell{}, err.empty() ? Cell{} : Cell{err}});
    }
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? Cell{} : Cell{std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())};
    };
    t.rows.push_back({std::string("average"), Cell{}, mean(cds), mean(ncds), Cell{}});
    std::string err;
    const auto [cd, ncd] = dims_of(data, replicate_config(spec, "cluster-whole", 0), &err);
    t.rows.push_back({std::string("whole data"), count(data.n_rows()), opt(cd), ncd ? count(*ncd) : Cell{},
                      err.empty() ? Cell{} : Cell{err}});
    out.push_back(std::move(t));
  }

  // Mixtures of independent components: whole vs mean component dimension.
  {
    struct Row {
      std::optional<double> comp_cd, mix_cd, comp_ncd;
      std::optional<std::size_t> mix_ncd;
    };
    const auto rows = parallel_map<Row>(spec.replicates, spec.threads, [&](std::size_t r) {
      const Mixture m = make_mixture(k_cols, spec.n_rows, r, spec.seed);
      Row row;
      double cd_sum = 0.0;
      double ncd_sum = 0.0;
      bool cd_ok = true;
      bool ncd_ok = true;
      for (std::size_t p = 0; p < m.parts.size(); ++p) {
        const auto [cd, ncd] = dims_of(m.parts[p], replicate_config(spec, "mix-part", r * 16 + p), nullptr);
        cd_ok = cd_ok && cd.has_value();
        ncd_ok = ncd_ok && ncd.has_value();
        if (cd) cd_sum += *cd;
        if (ncd) ncd_sum += static_cast<double>(*ncd);
      }
      const double parts = static_cast<double>(m.parts.size());
      if (cd_ok) row.comp_cd = cd_sum / parts;
      if (ncd_ok) row.comp_ncd = ncd_sum / parts;
      std::tie(row.mix_cd, row.mix_ncd) = dims_of(m.whole, replicate_config(spec, "mix-whole", r), nullptr);
      return row;
    });
    Table t;
    t.name = "mixture-dims";
    t.columns = {"replicate", "mean_component_cd", "mixture_cd", "mean_component_ncd", "mixture_ncd"};
    std::vector<double> xc, yc, xn, yn;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      t.rows.push_back({count(r), opt(row.comp_cd), opt(row.mix_cd), opt(row.comp_ncd),
                        row.mix_ncd ? count(*row.mix_ncd) : Cell{}});
      if (row.comp_cd && row.mix_cd) {
        xc.push_back(*row.comp_cd);
        yc.push_back(*row.mix_cd);
      }
      if (row.comp_ncd && row.mix_ncd) {
        xn.push_back(*row.comp_ncd);
        yn.push_back(static_cast<double>(*row.mix_ncd));
      }
    }
    t.summary.emplace_back("pearson_cd", safe_corr(xc, yc, false));
    t.summary.emplace_back("pearson_ncd", safe_corr(xn, yn, false));
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"indep-box", "slope-musigma", "grid-n",      "cd-vs-mu",    "markov",
          "ncd-vs-sparsity", "ncd-vs-estimate", "pca-subsets", "cluster-dims"};
}

std::vector<Table> run_experiment(const ExperimentSpec& spec) {
  spec.cfg.validate();
  if (spec.replicates == 0) fail(ErrorCode::invalid_argument, "need at least one replicate");
  if (spec.ks.empty()) fail(ErrorCode::invalid_argument, "need at least one column count");
  if (spec.name == "indep-box") return indep_box(spec);
  if (spec.name == "slope-musigma") return slope_musigma(spec);
  if (spec.name == "grid-n") return grid_n(spec);
  if (spec.name == "cd-vs-mu") return cd_vs_mu(spec);
  if (spec.name == "markov") return markov(spec);
  if (spec.name == "ncd-vs-sparsity") return ncd_vs_sparsity(spec);
  if (spec.name == "ncd-vs-estimate") return ncd_vs_estimate(spec);
  if (spec.name == "pca-subsets") return pca_subsets(spec);
  if (spec.name == "cluster-dims") return cluster_dims(spec);
  fail(ErrorCode::invalid_argument, "unknown experiment '" + spec.name + "'");
}

}  // namespace bindim
