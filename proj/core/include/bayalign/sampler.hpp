#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bayalign/posterior.hpp"
#include "bayalign/summaries.hpp"

namespace bayalign {

inline constexpr int kFragmentLength = 6;

/// Registrations of well-fitting window pairs, drawn from by the global move.
struct FragmentLibrary {
  struct Entry {
    Registration reg;
    int x_start = 0;
    int y_start = 0;
    double rmsd = 0.0;
  };
  std::vector<Entry> entries;
  double delta = 1.0;
  /// Set when a chain was too short to form any window.
  bool too_short = false;

  bool empty() const { return entries.empty(); }
};

/// Superposes every pair of 6-residue windows and keeps those with RMSD < delta.
FragmentLibrary build_fragment_library(const Coords& x, const Coords& y, double delta);

struct ChainConfig {
  long iterations = 100000;
  long burn_in = 20000;
  long thin = 1;
  std::uint64_t seed = 1;
  double global_move_prob = 0.1;
  double rw_step_open = 0.1;
  double rw_step_ext = 0.1;
  /// Tune the random-walk scales toward ~30% acceptance during burn-in only.
  bool adapt_during_burn_in = true;
  bool update_sigma2 = true;
  bool update_gaps = true;
  bool update_alignment = true;
  bool local_moves = true;
  /// Start from a random library registration and grid cell instead of the best one.
  bool randomize_start = false;

  void validate() const;
};

/// sigma2 | M ~ IGam(a_sigma + 1.5 |M|, b_sigma + dP2 / 2).
double gibbs_sigma2(const ModelState& state, const Hyperparams& hp, Rng& rng);
/// Draw from IGam(shape, scale).
double draw_inv_gamma(double shape, double scale, Rng& rng);

struct GapUpdate {
  GapParams gp;
  bool accepted = false;
  double log_ratio = 0.0;
};

/// Log acceptance ratio of moving the gap penalties from `from` to `to` with the
/// path held fixed (geometric random-walk proposal, Jacobian included).
double gap_log_accept_ratio(const AlignmentPath& path, const GapParams& from, const GapParams& to,
                            const Hyperparams& hp, bool allow_simultaneous,
                            double log_z_from, double log_z_to);

/// Geometric random walk on (open, ext). `log_z_current` caches log Z at the current values.
GapUpdate mh_gap_update(const ModelState& state, const Hyperparams& hp, double step_open,
                        double step_ext, bool allow_simultaneous, double log_z_current, Rng& rng,
                        double* log_z_out = nullptr);

struct AlignmentMove {
  bool proposed = false;  ///< false when the move could not be attempted
  bool accepted = false;
  double log_ratio = kNegInf;
};

/// Data-driven local move: propose from the DP at the current registration,
/// reverse density at the proposal's own profile registration.
AlignmentMove mh_alignment_local(const AlignmentProblem& problem, ModelState& state, Rng& rng);

/// Metropolised independence move through a registration drawn from the library.
AlignmentMove mh_alignment_global(const AlignmentProblem& problem, ModelState& state,
                                  const FragmentLibrary& lib, Rng& rng);

/// Same as mh_alignment_global with the registration given explicitly.
AlignmentMove mh_alignment_at(const AlignmentProblem& problem, ModelState& state,
                              const Registration& reg, Rng& rng);

/// Log posterior (up to a constant) of every (k, eta) grid cell given the statistics.
Eigen::MatrixXd k_eta_log_table(const TemperedGrid& grid, const SequenceStats& stats);
/// Exact categorical draw of (k_index, eta_index).
std::pair<int, int> gibbs_k_eta(const TemperedGrid& grid, const SequenceStats& stats, Rng& rng);

/// Starting state: best library registration (or centred identity), then MAP traceback.
ModelState initial_state(const AlignmentProblem& problem, const Hyperparams& hp,
                         const FragmentLibrary& lib, Rng& rng, bool randomize);

struct ChainStats {
  long local_proposed = 0;
  long local_accepted = 0;
  long global_proposed = 0;
  long global_accepted = 0;
  long gap_accepted = 0;
  long gap_proposed = 0;
  double final_step_open = 0.0;
  double final_step_ext = 0.0;
};

/// Runs one chain. When `start` is given it replaces the default initial state.
SampleSet run_chain(const AlignmentProblem& problem, const Hyperparams& hp, const ChainConfig& cfg,
                    const FragmentLibrary& lib, std::optional<ModelState> start = std::nullopt,
                    ChainStats* stats = nullptr);

/// Runs `num_chains` independent chains concurrently with seeds seed, seed+1, ...
std::vector<SampleSet> run_chains(const AlignmentProblem& problem, const Hyperparams& hp,
                                  const ChainConfig& cfg, const FragmentLibrary& lib,
                                  int num_chains, std::vector<ChainStats>* stats = nullptr);

}  // namespace bayalign
