// Command-line front end: simulate functional time series, estimate
// operators, evaluate expansion residuals, and run max-deviation inference
// and Monte Carlo experiments. All randomness flows from --seed.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fts/harness.hpp"
#include "fts/io.hpp"

namespace {

using namespace fts;
using nlohmann::json;

ProcessSpec load_spec(const std::string& path) {
  return spec_from_json(json::parse(load_text(path)));
}

SamplePath load_sample(const std::string& path) {
  std::istringstream is(load_text(path));
  return read_sample_csv(is);
}

WeightScheme parse_weights(const std::string& name) {
  if (name == "flat") return WeightScheme::flat();
  if (name == "bartlett") return WeightScheme::bartlett();
  throw validation_error("unknown weight scheme: " + name);
}

OperatorEstimate::Kind parse_estimator(const std::string& kind) {
  if (kind == "cov") return OperatorEstimate::Kind::Cov;
  if (kind == "lag") return OperatorEstimate::Kind::Lag;
  if (kind == "symlag") return OperatorEstimate::Kind::SymLag;
  if (kind == "longrun") return OperatorEstimate::Kind::LongRun;
  throw validation_error("unknown estimator kind: " + kind);
}

KernelOp estimate_kernel(const SamplePath& sample, OperatorEstimate::Kind kind, int h, int b,
                         WeightScheme w, bool center) {
  switch (kind) {
    case OperatorEstimate::Kind::Cov:
      return cov_op(sample, center).op;
    case OperatorEstimate::Kind::Lag:
      return lag_op(sample, h, center).op;
    case OperatorEstimate::Kind::SymLag:
      return sym_lag_op(sample, h).op;
    case OperatorEstimate::Kind::LongRun:
      return longrun_op(sample, b, w, center).op;
  }
  throw validation_error("unreachable estimator kind");
}

ExperimentConfig parse_experiment(const json& j, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.spec = spec_from_json(j.at("spec"));
  cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  cfg.reps = j.value("reps", 50);
  cfg.estimator = parse_estimator(j.value("estimator", std::string("cov")));
  cfg.h = j.value("h", 1);
  cfg.b = j.value("b", 0);
  cfg.weights = parse_weights(j.value("weights", std::string("flat")));
  cfg.burnin = j.value("burnin", 0);
  cfg.J_report = j.value("J_report", 0);
  cfg.output_path = j.value("output_path", std::string());
  cfg.seed = SeedSpec{seed};
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Functional time series eigen-expansion toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int threads = 1;
  std::string config_path;
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads (reserved; execution is deterministic)");
  app.add_option("--config", config_path, "JSON config file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw sample curves from a process spec");
  int sim_n = 100, sim_burnin = 0;
  std::string sim_out, sim_scores_out;
  sim->add_option("--n", sim_n, "sample size")->required();
  sim->add_option("--burnin", sim_burnin, "burn-in length");
  sim->add_option("--out", sim_out, "curves CSV path")->required();
  sim->add_option("--scores-out", sim_scores_out, "true scores CSV path (kl only)");

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate an operator kernel from curves");
  std::string est_input, est_kind = "cov", est_weights = "flat", est_out;
  int est_h = 1, est_b = 1;
  bool est_center = false;
  est->set_help_flag("--help", "print help");  // frees -h for the lag flag
  est->add_option("--input", est_input, "curves CSV")->required();
  est->add_option("--kind", est_kind, "cov|lag|symlag|longrun");
  est->add_option("--h", est_h, "lag");
  est->add_option("--b", est_b, "long-run bandwidth");
  est->add_option("--weights", est_weights, "flat|bartlett");
  est->add_flag("--center", est_center, "subtract the sample mean");
  est->add_option("--out", est_out, "kernel CSV path")->required();

  // expand
  auto* exp = app.add_subcommand("expand", "expansion residuals vs the population operator");
  std::string exp_input, exp_kind = "cov", exp_weights = "flat", exp_out;
  int exp_h = 1, exp_b = 1, exp_J = 0;
  exp->set_help_flag("--help", "print help");
  exp->add_option("--input", exp_input, "curves CSV")->required();
  exp->add_option("--kind", exp_kind, "cov|symlag|longrun");
  exp->add_option("--h", exp_h, "lag");
  exp->add_option("--b", exp_b, "long-run bandwidth");
  exp->add_option("--weights", exp_weights, "flat|bartlett");
  exp->add_option("--J", exp_J, "indices to report (0 = model order)");
  exp->add_option("--out", exp_out, "report CSV path")->required();

  // maxdev / band
  auto add_band_flags = [](CLI::App* cmd, std::string& input, int& jplus, double& level,
                           std::string& method, int& bandwidth, std::string& out,
                           std::string& constant) {
    cmd->add_option("--input", input, "curves CSV")->required();
    cmd->add_option("--jplus", jplus, "number of leading eigenvalues")->required();
    cmd->add_option("--level", level, "confidence level");
    cmd->add_option("--method", method, "gumbel|gaussian-mc");
    cmd->add_option("--bandwidth", bandwidth, "HAC bandwidth (default floor(n^{1/3}))");
    cmd->add_option("--gumbel-constant", constant, "paper|classical");
    cmd->add_option("--out", out, "result JSON path")->required();
  };
  auto* maxdev = app.add_subcommand("maxdev", "max-deviation statistic and simultaneous band");
  std::string md_input, md_method = "gumbel", md_out, md_constant = "paper";
  int md_jplus = 2, md_bandwidth = 0;
  double md_level = 0.95;
  add_band_flags(maxdev, md_input, md_jplus, md_level, md_method, md_bandwidth, md_out,
                 md_constant);
  auto* band = app.add_subcommand("band", "simultaneous confidence band for eigenvalues");
  std::string bd_input, bd_method = "gumbel", bd_out, bd_constant = "paper";
  int bd_jplus = 2, bd_bandwidth = 0;
  double bd_level = 0.95;
  add_band_flags(band, bd_input, bd_jplus, bd_level, bd_method, bd_bandwidth, bd_out, bd_constant);

  // mc-rate
  auto* mcr = app.add_subcommand("mc-rate", "Monte Carlo rate experiment from a config file");
  std::string mcr_out;
  mcr->add_option("--out", mcr_out, "report JSON path");

  // mc-dist
  auto* mcd = app.add_subcommand("mc-dist", "distribution of the max statistic vs Gaussian maxima");
  int mcd_n = 2000, mcd_reps = 500, mcd_jplus = 20, mcd_zreps = 100000;
  std::string mcd_out;
  mcd->add_option("--n", mcd_n, "sample size per replication");
  mcd->add_option("--reps", mcd_reps, "replications");
  mcd->add_option("--jplus", mcd_jplus, "number of leading eigenvalues");
  mcd->add_option("--zreps", mcd_zreps, "Gaussian comparison draws");
  mcd->add_option("--out", mcd_out, "result JSON path")->required();

  CLI11_PARSE(app, argc, argv);
  const SeedSpec master{seed};

  if (sim->parsed()) {
    if (config_path.empty()) throw validation_error("simulate: --config <spec.json> required");
    const ProcessSpec spec = load_spec(config_path);
    const SamplePath sample = gen_process(spec, sim_n, sim_burnin, master);
    std::ostringstream os;
    write_sample_csv(os, sample);
    save_text(sim_out, os.str());
    if (!sim_scores_out.empty()) {
      if (!sample.true_scores) throw validation_error("simulate: no stored scores for this kind");
      std::ostringstream ss;
      const Matrix& sc = *sample.true_scores;
      for (std::size_t k = 0; k < sc.rows(); ++k) {
        for (std::size_t j = 0; j < sc.cols(); ++j)
          ss << (j ? "," : "") << format_double(sc(k, j));
        ss << '\n';
      }
      save_text(sim_scores_out, ss.str());
    }
  } else if (est->parsed()) {
    const SamplePath sample = load_sample(est_input);
    const KernelOp K = estimate_kernel(sample, parse_estimator(est_kind), est_h, est_b,
                                       parse_weights(est_weights), est_center);
    std::ostringstream os;
    write_kernel_csv(os, K);
    save_text(est_out, os.str());
  } else if (exp->parsed()) {
    if (config_path.empty()) throw validation_error("expand: --config <spec.json> required");
    const ProcessSpec spec = load_spec(config_path);
    SamplePath sample = load_sample(exp_input);
    sample.spec = spec;
    if (sample.spec.grid().size != sample.curves.front().grid.size)
      throw validation_error("expand: curves and spec disagree on grid size");
    const OperatorEstimate::Kind kind = parse_estimator(exp_kind);
    const KernelOp hatK =
        estimate_kernel(sample, kind, exp_h, exp_b, parse_weights(exp_weights), true);
    PopulationOperator pop;
    double m = sample.n;
    switch (kind) {
      case OperatorEstimate::Kind::Cov:
        pop = population_operator(spec, PopulationOperator::Kind::Cov);
        break;
      case OperatorEstimate::Kind::Lag:
        pop = population_operator(spec, PopulationOperator::Kind::Lag, exp_h);
        break;
      case OperatorEstimate::Kind::SymLag:
        pop = population_sym_lag(spec, exp_h);
        break;
      case OperatorEstimate::Kind::LongRun:
        pop = population_operator(spec, PopulationOperator::Kind::LongRun, exp_b);
        m = static_cast<double>(sample.n) / exp_b;
        break;
    }
    const EigenSystem pop_sys = population_eigensystem(spec, pop);
    const int J = exp_J > 0 ? exp_J : spec.model_order();
    const ExpansionReport report = expansion_report(hatK, pop.op, pop_sys, J, m);
    std::ostringstream os;
    write_expansion_csv(os, report);
    save_text(exp_out, os.str());
  } else if (maxdev->parsed() || band->parsed()) {
    const bool is_maxdev = maxdev->parsed();
    const std::string& input = is_maxdev ? md_input : bd_input;
    const int jplus = is_maxdev ? md_jplus : bd_jplus;
    const double level = is_maxdev ? md_level : bd_level;
    const std::string& method = is_maxdev ? md_method : bd_method;
    int bandwidth = is_maxdev ? md_bandwidth : bd_bandwidth;
    const std::string& out = is_maxdev ? md_out : bd_out;
    const std::string& constant_name = is_maxdev ? md_constant : bd_constant;
    const GumbelConstant constant =
        constant_name == "classical" ? GumbelConstant::Classical : GumbelConstant::Paper;

    const SamplePath sample = load_sample(input);
    const OperatorEstimate cov = cov_op(sample, true);
    const EigenSystem eig = eig_sym(cov.op, jplus);
    const ScorePanel panel = empirical_scores(sample, eig, jplus);
    if (bandwidth <= 0)
      bandwidth = static_cast<int>(std::floor(std::pow(sample.n, 1.0 / 3.0)));
    const LongRunVar lrv = longrun_var(panel, bandwidth, WeightScheme::bartlett());

    MaxDevResult res = simultaneous_band(eig.lambdas, lrv.sigma_hat, sample.n, jplus, level,
                                         method, constant, &lrv.rho_hat, 20000, master);
    if (!config_path.empty()) {
      // population reference available: compute the statistic and p-value
      const ProcessSpec spec = load_spec(config_path);
      const PopulationOperator pop = population_operator(spec, PopulationOperator::Kind::Cov);
      std::vector<double> lambda_ref(pop.lambdas.begin(),
                                     pop.lambdas.begin() + std::min<std::size_t>(
                                                               pop.lambdas.size(), jplus));
      if (static_cast<int>(lambda_ref.size()) < jplus)
        throw validation_error("maxdev: spec model order below jplus");
      res.T = t_stat(eig.lambdas, lambda_ref, lrv.sigma_hat, sample.n, jplus);
      res.pvalue = gumbel_pvalue(res.T, jplus, constant);
      res.used_population_reference = true;
    }
    json j = maxdev_to_json(res);
    json sig = json::array();
    for (double s : lrv.sigma_hat) sig.push_back(s);
    j["sigma_hat"] = std::move(sig);
    j["bandwidth"] = bandwidth;
    save_text(out, j.dump(2));
  } else if (mcr->parsed()) {
    if (config_path.empty()) throw validation_error("mc-rate: --config <experiment.json> required");
    ExperimentConfig cfg = parse_experiment(json::parse(load_text(config_path)), seed);
    if (!mcr_out.empty()) cfg.output_path = mcr_out;
    const MCReport report = run_experiment(cfg);
    std::cout << report.to_json().dump(2) << '\n';
  } else if (mcd->parsed()) {
    if (config_path.empty()) throw validation_error("mc-dist: --config <spec.json> required");
    const ProcessSpec spec = load_spec(config_path);
    const PopulationOperator pop = population_operator(spec, PopulationOperator::Kind::Cov);
    if (static_cast<int>(pop.lambdas.size()) < mcd_jplus)
      throw validation_error("mc-dist: model order below jplus");
    std::vector<double> lambda_ref(pop.lambdas.begin(), pop.lambdas.begin() + mcd_jplus);
    const std::vector<double> sigma(mcd_jplus, std::sqrt(2.0));  // iid Gaussian scores
    std::vector<double> T_sample;
    T_sample.reserve(mcd_reps);
    for (int r = 0; r < mcd_reps; ++r) {
      const SamplePath sample = gen_process(spec, mcd_n, 0, master.sub(r));
      const EigenSystem eig = eig_sym(cov_op(sample, true).op, mcd_jplus);
      T_sample.push_back(t_stat(eig.lambdas, lambda_ref, sigma, mcd_n, mcd_jplus));
    }
    Matrix identity(mcd_jplus, mcd_jplus);
    for (int j = 0; j < mcd_jplus; ++j) identity(j, j) = 1.0;
    std::vector<double> z = gauss_max_sample(identity, mcd_zreps, master.sub(0x2f));
    std::sort(z.begin(), z.end());
    const double ks = ks_distance(T_sample, [&](double x) {
      const auto it = std::upper_bound(z.begin(), z.end(), x);
      return static_cast<double>(it - z.begin()) / z.size();
    });
    json j;
    j["ks"] = ks;
    j["T_sample"] = T_sample;
    save_text(mcd_out, j.dump(2));
    std::cout << "ks=" << format_double(ks) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fts::degeneracy_error& e) {
    std::cerr << "degeneracy error: " << e.what() << '\n';
    return 3;
  } catch (const fts::validation_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
