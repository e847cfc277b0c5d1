#include "bayalign/sampler.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "bayalign/errors.hpp"

namespace bayalign {
namespace {

bool accept(double log_ratio, Rng& rng) {
  if (log_ratio >= 0.0) return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng)) < log_ratio;
}

// Proposes M' from `fwd` and accepts it against the reverse density `reverse_table`
// (or, when null, the table at the proposal's own profile registration).
AlignmentMove propose_and_accept(const AlignmentProblem& problem, ModelState& state, const ForwardTable& fwd,
                                 bool reverse_at_proposal, Rng& rng) {
  AlignmentMove move;
  SampledPath proposal = sample_traceback(fwd, rng);
  move.proposed = true;
  if (proposal.path.match_count() < 3) return move;

  ModelState next = state;
  next.path = std::move(proposal.path);
  if (reverse_at_proposal && next.path == state.path) {
    // Same path, same registration: the ratio is exactly one.
    move.accepted = true;
    move.log_ratio = 0.0;
    return move;
  }
  try {
    next.refresh_registration(problem);
  } catch (const DegenerateError&) {
    return move;
  }

  double log_q_reverse = 0.0;
  if (reverse_at_proposal) {
    const ForwardTable rev = forward(conditional_weights(problem, next, next.reg));
    log_q_reverse = proposal_log_density(state.path, rev);
  } else {
    log_q_reverse = proposal_log_density(state.path, fwd);
  }
  move.log_ratio = path_log_target(problem, next) - path_log_target(problem, state) + log_q_reverse -
                   proposal.log_density;
  if (accept(move.log_ratio, rng)) {
    state = std::move(next);
    move.accepted = true;
  }
  return move;
}

AlignmentPath diagonal_path(int n, int m) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < std::min(n, m); ++i) pairs.emplace_back(i, i);
  return AlignmentPath::from_pairs(n, m, pairs);
}

SampleRecord make_record(long sweep, const AlignmentProblem& problem, const ModelState& state, const Hyperparams& hp,
                         double log_z) {
  SampleRecord r;
  r.sweep = sweep;
  r.path = state.path;
  r.length = state.path.match_count();
  r.sigma2 = state.sigma2;
  r.open_pen = state.gp.open_pen;
  r.ext_pen = state.gp.ext_pen;
  r.angles = euler_angles(state.reg.rotation);
  r.translation = state.reg.translation.transpose();
  r.rmsd = std::sqrt(state.dp2 / r.length);
  r.k_index = state.k_index;
  r.eta_index = state.eta_index;
  r.log_posterior = log_posterior(problem, state, hp, log_z);
  return r;
}

}  // namespace

FragmentLibrary build_fragment_library(const Coords& x, const Coords& y, double delta) {
  FragmentLibrary lib;
  lib.delta = delta;
  if (x.rows() < kFragmentLength || y.rows() < kFragmentLength) {
    lib.too_short = true;
    return lib;
  }
  for (Eigen::Index i = 0; i + kFragmentLength <= x.rows(); ++i) {
    const Coords xw = x.middleRows(i, kFragmentLength);
    for (Eigen::Index j = 0; j + kFragmentLength <= y.rows(); ++j) {
      Superposition sp;
      try {
        sp = superpose(xw, y.middleRows(j, kFragmentLength));
      } catch (const DegenerateError&) {
        continue;
      }
      const double r = std::sqrt(sp.dp2 / kFragmentLength);
      if (r < delta) lib.entries.push_back({sp.reg, static_cast<int>(i), static_cast<int>(j), r});
    }
  }
  return lib;
}

void ChainConfig::validate() const {
  require(iterations > 0 && burn_in >= 0 && iterations > burn_in, "need iterations > burn_in >= 0");
  require(thin >= 1, "thin must be at least 1");
  require(global_move_prob >= 0.0 && global_move_prob <= 1.0, "global move probability must lie in [0, 1]");
  require(rw_step_open > 0.0 && rw_step_ext > 0.0, "random-walk scales must be positive");
}

double draw_inv_gamma(double shape, double scale, Rng& rng) {
  std::gamma_distribution<double> gamma(shape, 1.0 / scale);
  double g = gamma(rng);
  while (g <= 0.0) g = gamma(rng);
  return 1.0 / g;
}

double gibbs_sigma2(const ModelState& state, const Hyperparams& hp, Rng& rng) {
  const int k = state.path.match_count();
  return draw_inv_gamma(hp.a_sigma + 1.5 * k, hp.b_sigma + 0.5 * state.dp2, rng);
}

double gap_log_accept_ratio(const AlignmentPath& path, const GapParams& from, const GapParams& to,
                            const Hyperparams& hp, bool /*allow_simultaneous*/, double log_z_from, double log_z_to) {
  const GapStats stats = gap_stats(path);
  const auto u = [&](const GapParams& gp) { return gp.open_pen * stats.gaps + gp.ext_pen * stats.total_length(); };
  const double lo = std::log(to.open_pen / from.open_pen);
  const double le = std::log(to.ext_pen / from.ext_pen);
  return (-u(to) - log_z_to) - (-u(from) - log_z_from) + lo + le + (hp.a_open - 1.0) * lo -
         hp.b_open * (to.open_pen - from.open_pen) + (hp.a_ext - 1.0) * le - hp.b_ext * (to.ext_pen - from.ext_pen);
}

GapUpdate mh_gap_update(const ModelState& state, const Hyperparams& hp, double step_open, double step_ext,
                        bool allow_simultaneous, double log_z_current, Rng& rng, double* log_z_out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GapParams proposal;
  proposal.open_pen = state.gp.open_pen * std::exp(step_open * normal(rng));
  proposal.ext_pen = state.gp.ext_pen * std::exp(step_ext * normal(rng));
  const double log_z_new = gap_prior_log_Z(state.path.n(), state.path.m(), proposal, allow_simultaneous);

  GapUpdate out;
  out.log_ratio = gap_log_accept_ratio(state.path, state.gp, proposal, hp, allow_simultaneous, log_z_current, log_z_new);
  out.accepted = std::isfinite(out.log_ratio) && accept(out.log_ratio, rng);
  out.gp = out.accepted ? proposal : state.gp;
  if (log_z_out != nullptr) *log_z_out = out.accepted ? log_z_new : log_z_current;
  return out;
}

AlignmentMove mh_alignment_local(const AlignmentProblem& problem, ModelState& state, Rng& rng) {
  const ForwardTable fwd = forward(conditional_weights(problem, state, state.reg));
  return propose_and_accept(problem, state, fwd, /*reverse_at_proposal=*/true, rng);
}

AlignmentMove mh_alignment_at(const AlignmentProblem& problem, ModelState& state, const Registration& reg, Rng& rng) {
  const ForwardTable fwd = forward(conditional_weights(problem, state, reg));
  return propose_and_accept(problem, state, fwd, /*reverse_at_proposal=*/false, rng);
}

AlignmentMove mh_alignment_global(const AlignmentProblem& problem, ModelState& state, const FragmentLibrary& lib,
                                  Rng& rng) {
  if (lib.empty()) return {};
  std::uniform_int_distribution<std::size_t> pick(0, lib.entries.size() - 1);
  return mh_alignment_at(problem, state, lib.entries[pick(rng)].reg, rng);
}

Eigen::MatrixXd k_eta_log_table(const TemperedGrid& grid, const SequenceStats& stats) {
  Eigen::MatrixXd table(grid.num_pam(), grid.num_eta());
  for (int k = 0; k < grid.num_pam(); ++k)
    for (int e = 0; e < grid.num_eta(); ++e) table(k, e) = stats.loglik(grid.at(k, e));
  return table;
}

std::pair<int, int> gibbs_k_eta(const TemperedGrid& grid, const SequenceStats& stats, Rng& rng) {
  const Eigen::MatrixXd table = k_eta_log_table(grid, stats);
  // Row-major flattening: cell index = k * num_eta + eta.
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(table.size()));
  for (int k = 0; k < grid.num_pam(); ++k)
    for (int e = 0; e < grid.num_eta(); ++e) flat.push_back(table(k, e));
  const auto cell = static_cast<int>(sample_log_categorical(flat, rng));
  return {cell / grid.num_eta(), cell % grid.num_eta()};
}

ModelState initial_state(const AlignmentProblem& problem, const Hyperparams& hp, const FragmentLibrary& lib, Rng& rng,
                         bool randomize) {
  require(std::min(problem.n(), problem.m()) >= 3, "both structures need at least three residues");
  ModelState state;
  state.sigma2 = hp.a_sigma > 1.0 ? hp.b_sigma / (hp.a_sigma - 1.0) : hp.b_sigma;
  state.gp = {hp.a_open / hp.b_open, hp.a_ext / hp.b_ext};
  if (problem.sequence_mode()) {
    if (randomize) {
      state.k_index = std::uniform_int_distribution<int>(0, problem.grid->num_pam() - 1)(rng);
      state.eta_index = std::uniform_int_distribution<int>(0, problem.grid->num_eta() - 1)(rng);
    } else {
      state.k_index = problem.grid->num_pam() / 2;
      state.eta_index = problem.grid->num_eta() / 2;
    }
  }

  Registration start;
  if (!lib.empty()) {
    std::size_t best = 0;
    if (randomize) {
      best = std::uniform_int_distribution<std::size_t>(0, lib.entries.size() - 1)(rng);
    } else {
      for (std::size_t e = 1; e < lib.entries.size(); ++e)
        if (lib.entries[e].rmsd < lib.entries[best].rmsd) best = e;
    }
    start = lib.entries[best].reg;
  } else {
    start.translation = problem.y.colwise().mean() - problem.x.colwise().mean();
  }

  state.path = map_traceback(conditional_weights(problem, state, start));
  if (state.path.match_count() < 3) state.path = diagonal_path(problem.n(), problem.m());
  try {
    state.refresh_registration(problem);
  } catch (const DegenerateError&) {
    state.path = diagonal_path(problem.n(), problem.m());
    state.refresh_registration(problem);
  }
  return state;
}

SampleSet run_chain(const AlignmentProblem& problem, const Hyperparams& hp, const ChainConfig& cfg,
                    const FragmentLibrary& lib, std::optional<ModelState> start, ChainStats* stats) {
  problem.validate();
  cfg.validate();
  Rng rng(cfg.seed);
  ModelState state = start ? std::move(*start) : initial_state(problem, hp, lib, rng, cfg.randomize_start);
  require(state.path.match_count() >= 3, "initial state needs at least three matches");

  SampleSet out;
  out.meta.seed = cfg.seed;
  out.meta.iterations = cfg.iterations;
  out.meta.burn_in = cfg.burn_in;
  out.meta.thin = cfg.thin;
  out.meta.n = problem.n();
  out.meta.m = problem.m();
  out.meta.sequence_mode = problem.sequence_mode();
  if (problem.sequence_mode()) {
    out.meta.pam_values = problem.grid->pam_values();
    out.meta.eta_values = problem.grid->eta_values();
  }
  out.records.reserve(static_cast<std::size_t>((cfg.iterations - cfg.burn_in) / cfg.thin));

  ChainStats local_stats;
  double step_open = cfg.rw_step_open;
  double step_ext = cfg.rw_step_ext;
  double log_z = gap_prior_log_Z(problem.n(), problem.m(), state.gp, problem.allow_simultaneous);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr long kAdaptWindow = 100;
  long window_accepted = 0;

  for (long sweep = 0; sweep < cfg.iterations; ++sweep) {
    if (cfg.update_alignment) {
      if (cfg.local_moves) {
        const AlignmentMove mv = mh_alignment_local(problem, state, rng);
        local_stats.local_proposed += mv.proposed;
        local_stats.local_accepted += mv.accepted;
      }
      if (!lib.empty() && cfg.global_move_prob > 0.0 && unif(rng) < cfg.global_move_prob) {
        const AlignmentMove mv = mh_alignment_global(problem, state, lib, rng);
        local_stats.global_proposed += mv.proposed;
        local_stats.global_accepted += mv.accepted;
      }
    }
    if (cfg.update_sigma2) state.sigma2 = gibbs_sigma2(state, hp, rng);
    if (cfg.update_gaps) {
      const GapUpdate gu = mh_gap_update(state, hp, step_open, step_ext, problem.allow_simultaneous, log_z, rng, &log_z);
      state.gp = gu.gp;
      ++local_stats.gap_proposed;
      local_stats.gap_accepted += gu.accepted;
      window_accepted += gu.accepted;
      if (cfg.adapt_during_burn_in && sweep < cfg.burn_in && (sweep + 1) % kAdaptWindow == 0) {
        const double rate = static_cast<double>(window_accepted) / kAdaptWindow;
        const double factor = std::exp(rate - 0.3);
        step_open = std::clamp(step_open * factor, 1e-3, 5.0);
        step_ext = std::clamp(step_ext * factor, 1e-3, 5.0);
        window_accepted = 0;
      }
    }
    if (problem.sequence_mode()) {
      const auto [k, e] = gibbs_k_eta(*problem.grid, SequenceStats::of(problem.ax, problem.ay, state.path), rng);
      state.k_index = k;
      state.eta_index = e;
    }
    if (state.path.match_count() < 3) throw std::logic_error("sampler state lost the |M| >= 3 invariant");

    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in + 1) % cfg.thin == 0) {
      out.records.push_back(make_record(sweep, problem, state, hp, log_z));
    }
  }
  local_stats.final_step_open = step_open;
  local_stats.final_step_ext = step_ext;
  if (stats != nullptr) *stats = local_stats;
  return out;
}

std::vector<SampleSet> run_chains(const AlignmentProblem& problem, const Hyperparams& hp, const ChainConfig& cfg,
                                  const FragmentLibrary& lib, int num_chains, std::vector<ChainStats>* stats) {
  require(num_chains >= 1, "need at least one chain");
  std::vector<SampleSet> out(static_cast<std::size_t>(num_chains));
  std::vector<ChainStats> chain_stats(static_cast<std::size_t>(num_chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(num_chains));
  {
    std::vector<std::jthread> workers;
    for (int c = 0; c < num_chains; ++c) {
      workers.emplace_back([&, c] {
        const auto idx = static_cast<std::size_t>(c);
        try {
          ChainConfig chain_cfg = cfg;
          chain_cfg.seed = cfg.seed + static_cast<std::uint64_t>(c);
          chain_cfg.randomize_start = cfg.randomize_start || c > 0;
          out[idx] = run_chain(problem, hp, chain_cfg, lib, std::nullopt, &chain_stats[idx]);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (stats != nullptr) *stats = std::move(chain_stats);
  return out;
}

}  // namespace bayalign
