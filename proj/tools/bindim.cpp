// bindim: correlation dimension and normalized correlation dimension of
// 0/1 datasets from the command line.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bindim/baselines.hpp"
#include "bindim/dataset.hpp"
#include "bindim/dimension.hpp"
#include "bindim/distdist.hpp"
#include "bindim/error.hpp"
#include "bindim/harness.hpp"
#include "bindim/random.hpp"

namespace {

constexpr int kComputationError = 1;
constexpr int kUsageError = 2;

struct CommonOptions {
  std::string format = "fimi";
  std::size_t min_cols = 0;
  bool json = false;
  unsigned threads = 1;
  bindim::DimConfig cfg;
};

void add_dim_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--alpha1", o.cfg.alpha1, "Lower quantile for the radius range")->capture_default_str();
  cmd->add_option("--alpha2", o.cfg.alpha2, "Upper quantile for the radius range")->capture_default_str();
  cmd->add_option("--grid", o.cfg.grid_n, "Number of grid intervals between r1 and r2")->capture_default_str();
  cmd->add_option("--sample", o.cfg.sample_m, "Rows in D_s; exact pairs when N <= sample")->capture_default_str();
  cmd->add_option("--ind-samples", o.cfg.ind_samples, "Monte Carlo draws for the independent model")
      ->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "Master random seed")->capture_default_str();
  cmd->add_option("--search-tol", o.cfg.search_tol, "Bisection tolerance on the matched margin")
      ->capture_default_str();
  cmd->add_option("--h-max", o.cfg.h_max, "Upper bound of the normalized dimension search")->capture_default_str();
}

void add_io_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--format", o.format, "Input format: fimi or dense01")->capture_default_str();
  cmd->add_option("--min-cols", o.min_cols, "Raise the inferred column count to at least this value");
  cmd->add_flag("--json", o.json, "Emit JSON instead of TSV");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores); output does not depend on it")
      ->capture_default_str();
}

bindim::BinaryDataset load(const std::string& path, const CommonOptions& o) {
  const auto fmt = bindim::parse_file_format(o.format);
  if (path == "-") return bindim::load_dataset(std::cin, fmt, o.min_cols);
  return bindim::load_dataset(std::filesystem::path(path), fmt, o.min_cols);
}

void emit(const std::vector<bindim::Table>& tables, bool json) {
  if (json) {
    std::cout << bindim::tables_to_json(tables) << '\n';
  } else {
    bindim::write_tsv(std::cout, tables);
  }
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      bindim::fail(bindim::ErrorCode::invalid_argument, "bad count '" + item + "' in list");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation dimension of binary datasets"};
  app.require_subcommand(1);

  CommonOptions o;

  // dim
  std::string dim_file;
  std::string cdf_out;
  bool with_points = false;
  auto* dim = app.add_subcommand("dim", "Correlation dimension cd_A of a dataset");
  dim->add_option("file", dim_file, "Dataset path ('-' for stdin)")->required();
  dim->add_option("--cdf-out", cdf_out, "Also write the distance CDF as TSV to this path");
  dim->add_flag("--points", with_points, "Include the fitted log-log points in TSV output");
  add_dim_flags(dim, o);
  add_io_flags(dim, o);

  // ncd
  std::string ncd_file;
  auto* ncd = app.add_subcommand("ncd", "Normalized correlation dimension of a dataset");
  ncd->add_option("file", ncd_file, "Dataset path ('-' for stdin)")->required();
  add_dim_flags(ncd, o);
  add_io_flags(ncd, o);

  // report
  std::vector<std::string> report_files;
  bool timing = false;
  auto* report = app.add_subcommand("report", "Summary row per dataset (statistics, cd, ncd)");
  report->add_option("files", report_files, "Dataset paths")->required();
  report->add_flag("--timing", timing, "Add a wall-time column (output no longer reproducible)");
  add_dim_flags(report, o);
  add_io_flags(report, o);

  // gen
  std::string gen_kind;
  std::size_t gen_k = 100;
  std::size_t gen_n = 2000;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  std::string gen_format = "fimi";
  std::vector<double> gen_p;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("kind", gen_kind, "indep or markov")->required()->check(CLI::IsMember({"indep", "markov"}));
  gen->add_option("--k", gen_k, "Columns")->capture_default_str();
  gen->add_option("--n", gen_n, "Rows")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default stdout)");
  gen->add_option("--format", gen_format, "Output format: fimi or dense01")->capture_default_str();
  gen->add_option("--p", gen_p,
                  "Fixed margin (indep) or reversal probability (markov) for every column; "
                  "random profile when omitted");

  // pca
  std::string pca_file;
  double pca_frac = 0.9;
  auto* pca = app.add_subcommand("pca", "PCA eigenvalues and components needed for a variance fraction");
  pca->add_option("file", pca_file, "Dataset path")->required();
  pca->add_option("--frac", pca_frac, "Variance fraction to explain")->capture_default_str();
  add_io_flags(pca, o);

  // corr
  std::string corr_file;
  auto* corr = app.add_subcommand("corr", "Average absolute Pearson correlation between columns");
  corr->add_option("file", corr_file, "Dataset path")->required();
  add_io_flags(corr, o);

  // cluster
  std::string cluster_file;
  std::size_t cluster_k = 3;
  std::uint64_t cluster_seed = 1;
  auto* cluster = app.add_subcommand("cluster", "k-means cluster assignment, one id per line");
  cluster->add_option("file", cluster_file, "Dataset path")->required();
  cluster->add_option("--k", cluster_k, "Number of clusters")->capture_default_str();
  cluster->add_option("--seed", cluster_seed, "Random seed")->capture_default_str();
  add_io_flags(cluster, o);

  // experiment
  bindim::ExperimentSpec spec;
  std::string ks_text;
  std::string exp_input;
  auto* experiment = app.add_subcommand("experiment", "Run one of the synthetic / subset experiments");
  experiment->add_option("name", spec.name, "Experiment name")
      ->required()
      ->check(CLI::IsMember(bindim::experiment_names()));
  experiment->add_option("--replicates", spec.replicates, "Datasets per configuration")->capture_default_str();
  experiment->add_option("--ks", ks_text, "Comma-separated column counts (default 50,100,150,200)");
  experiment->add_option("--n", spec.n_rows, "Rows per synthetic dataset")->capture_default_str();
  experiment->add_option("--input", exp_input, "Dataset for pca-subsets / cluster-dims");
  experiment->add_option("--subset-rows", spec.subset_rows, "Rows per random subset")->capture_default_str();
  experiment->add_option("--subset-cols", spec.subset_cols, "Columns per random subset")->capture_default_str();
  experiment->add_option("--clusters", spec.clusters, "k for cluster-dims")->capture_default_str();
  add_dim_flags(experiment, o);
  add_io_flags(experiment, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    o.cfg.validate();
    const bindim::ExecOptions exec{.threads = o.threads};

    if (*dim) {
      const auto data = load(dim_file, o);
      const auto cdf = bindim::data_cdf(data, o.cfg, exec);
      if (!cdf_out.empty()) {
        std::ofstream out(cdf_out);
        if (!out) bindim::fail(bindim::ErrorCode::invalid_argument, "cannot write '" + cdf_out + "'");
        bindim::write_cdf_tsv(out, cdf);
      }
      const auto est = bindim::cd_a(cdf, o.cfg.alpha1, o.cfg.alpha2, o.cfg.grid_n);
      if (o.json) {
        std::cout << bindim::to_json(est, cdf.source()) << '\n';
      } else {
        bindim::Table t;
        t.name = "dim";
        t.columns = {"cd", "intercept", "r1", "r2", "grid_n", "basis", "K", "N"};
        t.rows.push_back({est.slope, est.intercept, est.r1, est.r2, static_cast<std::int64_t>(est.grid_n),
                          std::string(bindim::to_string(cdf.source().kind)),
                          static_cast<std::int64_t>(data.n_cols()), static_cast<std::int64_t>(data.n_rows())});
        std::vector<bindim::Table> tables{t};
        if (with_points) {
          bindim::Table p;
          p.name = "points";
          p.columns = {"log_r", "log_f"};
          for (const auto& [x, y] : est.points) p.rows.push_back({x, y});
          tables.push_back(std::move(p));
        }
        bindim::write_tsv(std::cout, tables);
      }
    } else if (*ncd) {
      const auto data = load(ncd_file, o);
      const auto res = bindim::normalized_cd(data, o.cfg, exec);
      if (o.json) {
        std::cout << bindim::to_json(res) << '\n';
      } else {
        bindim::Table t;
        t.name = "ncd";
        t.columns = {"ncd", "s", "cd", "cd_ind", "cd_matched", "prop3_estimate", "K"};
        t.rows.push_back({static_cast<std::int64_t>(res.h), res.s, res.cd_data, res.cd_ind, res.cd_matched,
                          res.prop3_estimate, static_cast<std::int64_t>(data.n_cols())});
        bindim::write_tsv(std::cout, t);
      }
    } else if (*report) {
      std::vector<bindim::DatasetReport> reports;
      for (const auto& f : report_files) {
        const auto data = load(f, o);
        reports.push_back(bindim::dataset_report(data, std::filesystem::path(f).filename().string(), o.cfg, exec));
      }
      emit({bindim::reports_table(reports, timing)}, o.json);
    } else if (*gen) {
      bindim::MarginProfile profile;
      const auto kind = gen_kind == "indep" ? bindim::ProfileKind::margin : bindim::ProfileKind::reversal;
      if (gen_p.empty()) {
        profile = bindim::random_profile(gen_k, kind, bindim::derive_seed(gen_seed, "cli-profile"));
      } else if (gen_p.size() == 1) {
        profile = {std::vector<double>(gen_k, gen_p.front()), kind};
      } else {
        profile = {gen_p, kind};
      }
      const auto data = gen_kind == "indep"
                            ? bindim::gen_independent(gen_k, gen_n, profile, bindim::derive_seed(gen_seed, "cli-data"))
                            : bindim::gen_markov(gen_k, gen_n, profile, bindim::derive_seed(gen_seed, "cli-data"));
      const auto format = bindim::parse_file_format(gen_format);
      if (gen_out.empty()) {
        bindim::save_dataset(std::cout, data, format);
      } else {
        std::ofstream out(gen_out);
        if (!out) bindim::fail(bindim::ErrorCode::invalid_argument, "cannot write '" + gen_out + "'");
        bindim::save_dataset(out, data, format);
      }
    } else if (*pca) {
      const auto data = load(pca_file, o);
      const auto summary = bindim::pca_summary(data);
      bindim::Table t;
      t.name = "pca";
      t.columns = {"component", "eigenvalue", "cumulative_fraction"};
      double acc = 0.0;
      for (std::size_t i = 0; i < summary.eigenvalues.size(); ++i) {
        acc += summary.eigenvalues[i];
        t.rows.push_back({static_cast<std::int64_t>(i + 1), summary.eigenvalues[i], acc / summary.total_variance});
      }
      t.summary.emplace_back("total_variance", summary.total_variance);
      t.summary.emplace_back(fmt::format("components_for_{}", pca_frac),
                             static_cast<std::int64_t>(bindim::components_for_variance(summary, pca_frac)));
      emit({t}, o.json);
    } else if (*corr) {
      const auto data = load(corr_file, o);
      bindim::Table t;
      t.name = "corr";
      t.columns = {"avg_abs_correlation", "K", "N"};
      t.rows.push_back({bindim::avg_abs_correlation(data), static_cast<std::int64_t>(data.n_cols()),
                        static_cast<std::int64_t>(data.n_rows())});
      emit({t}, o.json);
    } else if (*cluster) {
      const auto data = load(cluster_file, o);
      const auto c = bindim::kmeans(data, cluster_k, cluster_seed);
      if (o.json) {
        bindim::Table t;
        t.name = "cluster";
        t.columns = {"row", "cluster"};
        for (std::size_t i = 0; i < c.assignments.size(); ++i) {
          t.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(c.assignments[i])});
        }
        t.summary.emplace_back("objective", c.objective);
        t.summary.emplace_back("iterations", static_cast<std::int64_t>(c.iterations));
        emit({t}, true);
      } else {
        for (std::size_t a : c.assignments) std::cout << a << '\n';
      }
    } else if (*experiment) {
      spec.seed = o.cfg.seed;
      spec.threads = o.threads;
      spec.cfg = o.cfg;
      if (!ks_text.empty()) spec.ks = parse_sizes(ks_text);
      if (!exp_input.empty()) spec.input = load(exp_input, o);
      emit(bindim::run_experiment(spec), o.json);
    }
  } catch (const bindim::Error& e) {
    std::cerr << "bindim: " << bindim::to_string(e.code()) << ": " << e.what() << '\n';
    return e.is_usage_error() ? kUsageError : kComputationError;
  }
  return 0;
}
