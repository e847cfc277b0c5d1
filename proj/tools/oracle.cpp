#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>

#include "bayalign/errors.hpp"
#include "bayalign/sampler.hpp"
#include "commands.hpp"

namespace bayalign::cli {
namespace {

struct Instance {
  DpWeights weights;
  GapParams gp;
};

// Path weight straight from the step list, independent of the DP code.
double brute_logweight(const AlignmentPath& path, const DpWeights& w, const GapParams& gp) {
  double total = 0.0;
  int i = 0, j = 0;
  for (Step s : path.steps()) {
    if (s == Step::Match) total += w.match(i++, j++);
    if (s == Step::SkipX) total += w.skip_x(i++);
    if (s == Step::SkipY) total += w.skip_y(j++);
  }
  return total - gap_penalty(path, gp);
}

Instance random_instance(int n, int m, bool allow, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, 3.0);
  Instance inst;
  inst.gp = {unif(rng), unif(rng)};
  inst.weights.match = LogMatrix(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) inst.weights.match(i, j) = normal(rng);
  inst.weights.skip_x = Eigen::VectorXd(n);
  inst.weights.skip_y = Eigen::VectorXd(m);
  for (int i = 0; i < n; ++i) inst.weights.skip_x(i) = 0.5 * normal(rng);
  for (int j = 0; j < m; ++j) inst.weights.skip_y(j) = 0.5 * normal(rng);
  inst.weights.set_gap_params(inst.gp);
  inst.weights.allow_simultaneous = allow;
  return inst;
}

class Runner {
 public:
  Runner(const OracleConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out), rng_(cfg.seed) {}

  void check(const std::string& name, const std::function<std::string()>& body) {
    std::string failure;
    try {
      failure = body();
    } catch (const RefusalError&) {
      throw;
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    out_ << (failure.empty() ? "PASS " : "FAIL ") << name << (failure.empty() ? "" : "  " + failure) << "\n";
    failed_ += !failure.empty();
  }

  int failed() const { return failed_; }
  Rng& rng() { return rng_; }

  // Weights handed to the DP engine; the fault hook corrupts them, the oracle side never sees it.
  DpWeights engine_weights(const Instance& inst) const {
    DpWeights w = inst.weights;
    if (cfg_.inject_fault == "gap-sign") {
      w.open_logweight = -w.open_logweight;
      w.ext_logweight = -w.ext_logweight;
    }
    return w;
  }

 private:
  const OracleConfig& cfg_;
  std::ostream& out_;
  Rng rng_;
  int failed_ = 0;
};

std::string forward_sum(Runner& r, int n, int m, bool allow) {
  const Instance inst = random_instance(n, m, allow, r.rng());
  std::vector<double> lw;
  for (const auto& p : enumerate_paths(n, m, allow)) lw.push_back(brute_logweight(p, inst.weights, inst.gp));
  const double oracle = log_sum_exp(lw);
  const double dp = forward(r.engine_weights(inst)).total();
  const double rel = std::abs(std::expm1(dp - oracle));
  if (!(rel < 1e-10)) return "n=" + std::to_string(n) + " m=" + std::to_string(m) + " rel err " + std::to_string(rel);
  return {};
}

std::string forward_max_check(Runner& r, int n, int m, bool allow) {
  const Instance inst = random_instance(n, m, allow, r.rng());
  double best = kNegInf;
  for (const auto& p : enumerate_paths(n, m, allow)) best = std::max(best, brute_logweight(p, inst.weights, inst.gp));
  const DpWeights w = r.engine_weights(inst);
  const double dp = forward_max(w).total();
  const double mapw = brute_logweight(map_traceback(w), inst.weights, inst.gp);
  if (std::abs(dp - best) > 1e-9 || std::abs(mapw - best) > 1e-9) {
    return "n=" + std::to_string(n) + " m=" + std::to_string(m) + " best " + std::to_string(best) + " dp " +
           std::to_string(dp) + " map " + std::to_string(mapw);
  }
  return {};
}

std::string gap_prior_norm(Runner& r, int n, int m, bool allow) {
  std::uniform_real_distribution<double> unif(0.05, 3.0);
  const GapParams gp{unif(r.rng()), unif(r.rng())};
  std::vector<double> lw;
  for (const auto& p : enumerate_paths(n, m, allow)) lw.push_back(-gap_penalty(p, gp));
  const double total = log_sum_exp(lw) - gap_prior_log_Z(n, m, gp, allow);
  if (!(std::abs(std::expm1(total)) < 1e-10)) return "prior mass " + std::to_string(std::exp(total));
  return {};
}

std::string traceback_frequencies(Runner& r, int n, int m, int draws) {
  const Instance inst = random_instance(n, m, true, r.rng());
  const auto paths = enumerate_paths(n, m, true);
  std::vector<double> lw;
  for (const auto& p : paths) lw.push_back(brute_logweight(p, inst.weights, inst.gp));
  const double z = log_sum_exp(lw);
  const ForwardTable fwd = forward(r.engine_weights(inst));
  std::map<AlignmentPath, double> freq;
  for (int d = 0; d < draws; ++d) {
    const SampledPath s = sample_traceback(fwd, r.rng());
    freq[s.path] += 1.0 / draws;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto it = freq.find(paths[k]);
    tv += std::abs(std::exp(lw[k] - z) - (it == freq.end() ? 0.0 : it->second));
  }
  tv *= 0.5;
  if (!(tv < 0.02)) return "total variation " + std::to_string(tv);
  return {};
}

std::string sampler_invariance(Runner& r, int sweeps) {
  // Fixed sigma2 and gap penalties: the chain must target exp(path_log_target) over |M| >= 3.
  const int n = 4, m = 4;
  std::normal_distribution<double> normal(0.0, 1.0);
  AlignmentProblem problem;
  problem.x = Coords(n, 3);
  problem.y = Coords(m, 3);
  for (int i = 0; i < n; ++i) problem.x.row(i) << 3.8 * i, 0.8 * normal(r.rng()), 0.8 * normal(r.rng());
  for (int j = 0; j < m; ++j) problem.y.row(j) << 3.8 * j + normal(r.rng()), normal(r.rng()), normal(r.rng());
  problem.lambda = 100.0;

  std::vector<AlignmentPath> support;
  std::vector<double> lw;
  for (const auto& p : enumerate_paths(n, m, true)) {
    if (p.match_count() < 3) continue;
    const ModelState s = make_state(problem, p, 4.0, {1.0, 0.5});
    support.push_back(p);
    lw.push_back(path_log_target(problem, s));
  }
  const double z = log_sum_exp(lw);

  ChainConfig cfg;
  cfg.iterations = sweeps;
  cfg.burn_in = sweeps / 10;
  cfg.seed = r.rng()();
  cfg.update_sigma2 = false;
  cfg.update_gaps = false;
  cfg.global_move_prob = 0.0;
  const ModelState start = make_state(problem, AlignmentPath::all_match(n), 4.0, {1.0, 0.5});
  const SampleSet samples = run_chain(problem, Hyperparams{}, cfg, FragmentLibrary{}, start);
  std::map<AlignmentPath, double> freq;
  for (const auto& rec : samples.records) freq[rec.path] += 1.0 / static_cast<double>(samples.size());
  double tv = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto it = freq.find(support[k]);
    tv += std::abs(std::exp(lw[k] - z) - (it == freq.end() ? 0.0 : it->second));
  }
  tv *= 0.5;
  if (!(tv < 0.04)) return "total variation " + std::to_string(tv);
  return {};
}

}  // namespace

int cmd_oracle(const OracleConfig& cfg, std::ostream& out, std::ostream& err) {
  if ((cfg.n && *cfg.n < 1) || (cfg.m && *cfg.m < 1)) {
    err << "error: --n and --m must be positive\n";
    return kExitUsage;
  }
  if (cfg.n.value_or(1) * cfg.m.value_or(1) > 36) {
    err << "error: enumeration refused for n*m = " << cfg.n.value_or(1) * cfg.m.value_or(1) << " > 36\n";
    return kExitUsage;
  }
  Runner r(cfg, out);
  try {
    if (cfg.n || cfg.m) {
      const int n = cfg.n.value_or(*cfg.m);
      const int m = cfg.m.value_or(*cfg.n);
      for (bool allow : {true, false}) {
        const std::string tag = allow ? "" : " (no simultaneous gaps)";
        r.check("forward sum" + tag, [&] { return forward_sum(r, n, m, allow); });
        r.check("forward max and MAP traceback" + tag, [&] { return forward_max_check(r, n, m, allow); });
        r.check("gap prior normalisation" + tag, [&] { return gap_prior_norm(r, n, m, allow); });
      }
      r.check("traceback frequencies", [&] { return traceback_frequencies(r, n, m, 100000); });
    } else {
      std::uniform_int_distribution<int> len(1, 5);
      r.check("forward sum, 50 random instances", [&] {
        for (int t = 0; t < 50; ++t) {
          const std::string f = forward_sum(r, len(r.rng()), len(r.rng()), t % 2 == 0);
          if (!f.empty()) return f;
        }
        return std::string{};
      });
      r.check("forward max and MAP traceback, 50 random instances", [&] {
        for (int t = 0; t < 50; ++t) {
          const std::string f = forward_max_check(r, len(r.rng()), len(r.rng()), t % 2 == 0);
          if (!f.empty()) return f;
        }
        return std::string{};
      });
      r.check("gap prior normalisation, n,m <= 6", [&] {
        for (int n = 1; n <= 6; ++n)
          for (int m = 1; m <= 6; ++m)
            for (bool allow : {true, false}) {
              const std::string f = gap_prior_norm(r, n, m, allow);
              if (!f.empty()) return "n=" + std::to_string(n) + " m=" + std::to_string(m) + " " + f;
            }
        return std::string{};
      });
      r.check("traceback frequencies, n=m=3", [&] { return traceback_frequencies(r, 3, 3, 100000); });
      r.check("sampler invariance at fixed parameters, n=m=4", [&] { return sampler_invariance(r, 60000); });
    }
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << (r.failed() == 0 ? "all checks passed\n" : std::to_string(r.failed()) + " check(s) failed\n");
  return r.failed() == 0 ? kExitOk : kExitFailed;
}

}  // namespace bayalign::cli
