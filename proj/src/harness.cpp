#include "fts/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fts/io.hpp"

namespace fts {

using nlohmann::json;

void ExperimentConfig::validate() const {
  spec.validate();
  if (n_grid.empty()) throw validation_error("ExperimentConfig: empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw validation_error("ExperimentConfig: n grid must be increasing");
  if (reps < 1) throw validation_error("ExperimentConfig: need reps >= 1");
  if (J_report < 0 || J_report > spec.model_order())
    throw validation_error("ExperimentConfig: J_report out of range");
  if (estimator == OperatorEstimate::Kind::SymLag && h < 1)
    throw validation_error("ExperimentConfig: symlag needs h >= 1");
  if (estimator == OperatorEstimate::Kind::LongRun && b < 1)
    throw validation_error("ExperimentConfig: long-run estimator needs b >= 1");
}

std::uint64_t content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

EigenSystem population_eigensystem(const ProcessSpec& spec, const PopulationOperator& pop) {
  const int J = static_cast<int>(pop.lambdas.size());
  std::vector<int> order(J);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return pop.lambdas[a] > pop.lambdas[b]; });
  EigenSystem sys;
  sys.grid = spec.grid();
  sys.count = J;
  sys.lambdas.resize(J);
  sys.efuns.reserve(J);
  for (int r = 0; r < J; ++r) {
    sys.lambdas[r] = pop.lambdas[order[r]];
    sys.efuns.push_back(spec.basis.functions[order[r]]);
  }
  sys.refresh_gap_quantities();
  return sys;
}

namespace {

struct Summary {
  double mean = 0, sd = 0, q50 = 0, q90 = 0;
};

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  const int N = static_cast<int>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= N;
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = N > 1 ? std::sqrt(ss / (N - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  auto quant = [&](double q) {
    const int idx = std::max(0, static_cast<int>(std::ceil(q * N)) - 1);
    return v[std::min(idx, N - 1)];
  };
  s.q50 = quant(0.5);
  s.q90 = quant(0.9);
  return s;
}

}  // namespace

MCReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int J_model = config.spec.model_order();
  const int J = config.J_report > 0 ? config.J_report : J_model;

  // population reference is shared by all cells
  PopulationOperator pop;
  switch (config.estimator) {
    case OperatorEstimate::Kind::Cov:
      pop = population_operator(config.spec, PopulationOperator::Kind::Cov);
      break;
    case OperatorEstimate::Kind::Lag:
      pop = population_operator(config.spec, PopulationOperator::Kind::Lag, config.h);
      break;
    case OperatorEstimate::Kind::SymLag:
      pop = population_sym_lag(config.spec, config.h);
      break;
    case OperatorEstimate::Kind::LongRun:
      pop = population_operator(config.spec, PopulationOperator::Kind::LongRun, config.b);
      break;
  }
  const EigenSystem pop_sys = population_eigensystem(config.spec, pop);

  MCReport report;
  report.master_seed = config.seed.master;
  report.config_hash = content_hash(spec_to_json(config.spec).dump() + "|" +
                                    std::to_string(config.reps) + "|" +
                                    std::to_string(static_cast<int>(config.estimator)) + "|" +
                                    std::to_string(config.h) + "|" + std::to_string(config.b));

  std::vector<double> cell_ns, meanR1s, meanR2s, meanR3s;
  for (std::size_t cell = 0; cell < config.n_grid.size(); ++cell) {
    const int n = config.n_grid[cell];
    CellSummary cs;
    cs.n = n;
    std::vector<double> maxR1, maxR2, maxR3;
    std::vector<double> scaled_sum_per_j(J, 0.0);
    double scaled_acc = 0.0;
    int scaled_count = 0;

    for (int rep = 0; rep < config.reps; ++rep) {
      // keyed by (n, rep) so a cell's numbers do not depend on its position
      // in the grid
      const SeedSpec rep_seed =
          config.seed.sub((static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(rep));
      try {
        const SamplePath sample = gen_process(config.spec, n, config.burnin, rep_seed);
        KernelOp hatK;
        double m = n;
        switch (config.estimator) {
          case OperatorEstimate::Kind::Cov:
            hatK = cov_op(sample, true).op;
            break;
          case OperatorEstimate::Kind::Lag:
            hatK = lag_op(sample, config.h, true).op;
            break;
          case OperatorEstimate::Kind::SymLag:
            hatK = sym_lag_op(sample, config.h).op;
            break;
          case OperatorEstimate::Kind::LongRun:
            hatK = longrun_op(sample, config.b, config.weights, true).op;
            m = static_cast<double>(n) / config.b;
            break;
        }
        const ExpansionReport rep_out = expansion_report(hatK, pop.op, pop_sys, J, m);
        double r1 = 0, r2 = 0, r3 = 0;
        for (int j = 0; j < J; ++j) {
          r1 = std::max(r1, std::abs(rep_out.R1[j]));
          r2 = std::max(r2, std::abs(rep_out.R2[j]));
          r3 = std::max(r3, std::abs(rep_out.R3[j]));
          const double dev = std::sqrt(m) *
                             std::abs(rep_out.lambda_hat[j] - rep_out.lambda_pop[j]) /
                             rep_out.lambda_pop[j];
          scaled_sum_per_j[j] += dev;
          scaled_acc += dev;
          ++scaled_count;
        }
        maxR1.push_back(r1);
        maxR2.push_back(r2);
        maxR3.push_back(r3);
      } catch (const std::exception& e) {
        cs.errors.emplace_back(e.what());
      }
    }

    cs.reps_ok = static_cast<int>(maxR1.size());
    const Summary s1 = summarize(maxR1), s2 = summarize(maxR2), s3 = summarize(maxR3);
    cs.mean_maxR1 = s1.mean; cs.sd_maxR1 = s1.sd; cs.q50_maxR1 = s1.q50; cs.q90_maxR1 = s1.q90;
    cs.mean_maxR2 = s2.mean; cs.sd_maxR2 = s2.sd; cs.q50_maxR2 = s2.q50; cs.q90_maxR2 = s2.q90;
    cs.mean_maxR3 = s3.mean; cs.sd_maxR3 = s3.sd; cs.q50_maxR3 = s3.q50; cs.q90_maxR3 = s3.q90;
    cs.mean_scaled_dev = scaled_count > 0 ? scaled_acc / scaled_count : 0.0;
    if (cs.reps_ok > 0) {
      double mx = 0.0;
      for (double v : scaled_sum_per_j) mx = std::max(mx, v / cs.reps_ok);
      cs.max_mean_scaled_dev = mx;
    }
    report.cells.push_back(std::move(cs));

    if (report.cells.back().reps_ok > 0) {
      cell_ns.push_back(n);
      meanR1s.push_back(s1.mean);
      meanR2s.push_back(s2.mean);
      meanR3s.push_back(s3.mean);
    }
  }

  auto fit_or_zero = [&](const std::vector<double>& errs) {
    RateFitResult r;
    if (cell_ns.size() >= 3) {
      bool positive = true;
      for (double e : errs) positive = positive && e > 0.0;
      if (positive) r = rate_fit(cell_ns, errs);
    }
    return r;
  };
  report.slope_R1 = fit_or_zero(meanR1s);
  report.slope_R2 = fit_or_zero(meanR2s);
  report.slope_R3 = fit_or_zero(meanR3s);

  if (!config.output_path.empty()) save_text(config.output_path, report.to_json().dump(2));
  return report;
}

json MCReport::to_json() const {
  json cells_j = json::array();
  for (const CellSummary& c : cells) {
    cells_j.push_back(json{
        {"n", c.n},
        {"reps_ok", c.reps_ok},
        {"errors", c.errors},
        {"maxR1", {{"mean", c.mean_maxR1}, {"sd", c.sd_maxR1}, {"q50", c.q50_maxR1}, {"q90", c.q90_maxR1}}},
        {"maxR2", {{"mean", c.mean_maxR2}, {"sd", c.sd_maxR2}, {"q50", c.q50_maxR2}, {"q90", c.q90_maxR2}}},
        {"maxR3", {{"mean", c.mean_maxR3}, {"sd", c.sd_maxR3}, {"q50", c.q50_maxR3}, {"q90", c.q90_maxR3}}},
        {"mean_scaled_dev", c.mean_scaled_dev},
        {"max_mean_scaled_dev", c.max_mean_scaled_dev},
    });
  }
  auto fit_j = [](const RateFitResult& r) {
    return json{{"slope", r.slope}, {"intercept", r.intercept}, {"se", r.se}};
  };
  return json{{"cells", std::move(cells_j)},
              {"slope_R1", fit_j(slope_R1)},
              {"slope_R2", fit_j(slope_R2)},
              {"slope_R3", fit_j(slope_R3)},
              {"master_seed", master_seed},
              {"config_hash", config_hash}};
}

RateFitResult rate_fit(const std::vector<double>& ns, const std::vector<double>& errors) {
  const int k = static_cast<int>(ns.size());
  if (k < 3 || errors.size() != ns.size())
    throw validation_error("rate_fit: need >= 3 matched points");
  std::vector<double> x(k), y(k);
  for (int i = 0; i < k; ++i) {
    if (!(ns[i] > 0.0) || !(errors[i] > 0.0))
      throw validation_error("rate_fit: all entries must be positive");
    x[i] = std::log(ns[i]);
    y[i] = std::log(errors[i]);
  }
  double mx = 0, my = 0;
  for (int i = 0; i < k; ++i) { mx += x[i]; my += y[i]; }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  RateFitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double rss = 0;
  for (int i = 0; i < k; ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    rss += e * e;
  }
  r.se = k > 2 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
  return r;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw validation_error("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const int N = static_cast<int>(sample.size());
  double d = 0.0;
  for (int i = 0; i < N; ++i) {
    const double F = cdf(sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / N - F));
    d = std::max(d, std::abs(static_cast<double>(i) / N - F));
  }
  return d;
}

}  // namespace fts
