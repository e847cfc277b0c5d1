#include "bayalign/posterior.hpp"

#include <cmath>
#include <numbers>

#include "bayalign/errors.hpp"

namespace bayalign {
namespace {

const TemperedModel* active_model(const AlignmentProblem& problem, const ModelState& state) {
  if (!problem.sequence_mode()) return nullptr;
  require(state.k_index >= 0 && state.k_index < problem.grid->num_pam() && state.eta_index >= 0 &&
              state.eta_index < problem.grid->num_eta(),
          "sequence mode state has no valid (k, eta) grid cell");
  return &problem.grid->at(state.k_index, state.eta_index);
}

double log_match_factor(const ErrorModel& em, double d2, double sigma2, double lambda) {
  if (em.kind == ErrorModel::Kind::Gaussian) return match_logweight_gaussian(d2, sigma2, lambda);
  return std::log(lambda) + match_logweight_exp_cauchy(std::sqrt(d2), em.c, em.d0);
}

}  // namespace

void AlignmentProblem::validate() const {
  require(n() >= 1 && m() >= 1, "both structures need at least one residue");
  require(x.allFinite() && y.allFinite(), "non-finite coordinates");
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
  if (error_model.kind == ErrorModel::Kind::ExpCauchy) {
    require(error_model.c > 0.0 && error_model.d0 > 0.0, "exp-Cauchy constants c and d0 must be positive");
  }
  if (sequence_mode()) {
    require(static_cast<int>(ax.size()) == n() && static_cast<int>(ay.size()) == m(),
            "sequence lengths must equal the structure lengths");
  }
}

void ModelState::refresh_registration(const AlignmentProblem& problem) {
  const auto [xm, ym] = matched_coords(problem, path);
  const Superposition sp = superpose(xm, ym);
  reg = sp.reg;
  dp2 = sp.dp2;
}

ModelState make_state(const AlignmentProblem& problem, AlignmentPath path, double sigma2, GapParams gp, int k_index,
                      int eta_index) {
  require(path.n() == problem.n() && path.m() == problem.m(), "path does not fit the problem dimensions");
  ModelState state;
  state.path = std::move(path);
  state.sigma2 = sigma2;
  state.gp = gp;
  state.k_index = k_index;
  state.eta_index = eta_index;
  state.refresh_registration(problem);
  return state;
}

std::pair<Coords, Coords> matched_coords(const AlignmentProblem& problem, const AlignmentPath& path) {
  const auto pairs = path.matched_pairs();
  Coords xm(static_cast<Eigen::Index>(pairs.size()), 3);
  Coords ym(static_cast<Eigen::Index>(pairs.size()), 3);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    xm.row(static_cast<Eigen::Index>(r)) = problem.x.row(pairs[r].first);
    ym.row(static_cast<Eigen::Index>(r)) = problem.y.row(pairs[r].second);
  }
  return {std::move(xm), std::move(ym)};
}

double match_logweight_gaussian(double d2, double sigma2, double lambda) {
  return std::log(lambda) - 1.5 * std::log(2.0 * std::numbers::pi * sigma2) - d2 / (2.0 * sigma2);
}

double match_logweight_exp_cauchy(double d, double c, double d0) {
  const double r = d / d0;
  return c / (1.0 + r * r);
}

SequenceStats SequenceStats::of(const std::vector<AminoAcid>& ax, const std::vector<AminoAcid>& ay,
                                const AlignmentPath& path) {
  require(static_cast<int>(ax.size()) == path.n() && static_cast<int>(ay.size()) == path.m(),
          "sequence lengths do not match the alignment path");
  SequenceStats s;
  std::size_t i = 0, j = 0;
  for (Step st : path.steps()) {
    switch (st) {
      case Step::Match:
        if (is_standard(ax[i]) && is_standard(ay[j])) ++s.pairs(index_of(ax[i]), index_of(ay[j]));
        ++i;
        ++j;
        break;
      case Step::SkipX:
        if (is_standard(ax[i])) ++s.skips(index_of(ax[i]));
        ++i;
        break;
      case Step::SkipY:
        if (is_standard(ay[j])) ++s.skips(index_of(ay[j]));
        ++j;
        break;
    }
  }
  return s;
}

double SequenceStats::loglik(const TemperedModel& tempered) const {
  double total = 0.0;
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b < 20; ++b)
      if (pairs(a, b) != 0) total += static_cast<double>(pairs(a, b)) * tempered.match_logprob(a, b);
    if (skips(a) != 0) total += static_cast<double>(skips(a)) * tempered.skip_logprob(a);
  }
  return total;
}

DpWeights conditional_weights(const AlignmentProblem& problem, const ModelState& state, const Registration& reg) {
  const int n = problem.n();
  const int m = problem.m();
  const Coords moved = apply(reg, problem.x);
  const TemperedModel* tm = active_model(problem, state);

  DpWeights w;
  w.match.resize(n, m);
  w.skip_x = Eigen::VectorXd::Zero(n);
  w.skip_y = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double d2 = (problem.y.row(j) - moved.row(i)).squaredNorm();
      if (!std::isfinite(d2)) throw ContractError("non-finite inter-residue distance");
      double lw = log_match_factor(problem.error_model, d2, state.sigma2, problem.lambda);
      if (tm != nullptr && is_standard(problem.ax[static_cast<std::size_t>(i)]) &&
          is_standard(problem.ay[static_cast<std::size_t>(j)])) {
        lw += tm->match_logprob(index_of(problem.ax[static_cast<std::size_t>(i)]),
                                index_of(problem.ay[static_cast<std::size_t>(j)]));
      }
      w.match(i, j) = lw;
    }
  }
  if (tm != nullptr) {
    for (int i = 0; i < n; ++i)
      if (is_standard(problem.ax[static_cast<std::size_t>(i)])) w.skip_x(i) = tm->skip_logprob(index_of(problem.ax[static_cast<std::size_t>(i)]));
    for (int j = 0; j < m; ++j)
      if (is_standard(problem.ay[static_cast<std::size_t>(j)])) w.skip_y(j) = tm->skip_logprob(index_of(problem.ay[static_cast<std::size_t>(j)]));
  }
  w.set_gap_params(state.gp);
  w.allow_simultaneous = problem.allow_simultaneous;
  return w;
}

double struct_loglik(const AlignmentProblem& problem, const ModelState& state) {
  const int k = state.path.match_count();
  require(k >= 3, "structural likelihood needs at least three matches");
  if (problem.error_model.kind == ErrorModel::Kind::Gaussian) {
    return k * std::log(problem.lambda) - 1.5 * k * std::log(2.0 * std::numbers::pi * state.sigma2) -
           state.dp2 / (2.0 * state.sigma2);
  }
  const auto [xm, ym] = matched_coords(problem, state.path);
  const Coords moved = apply(state.reg, xm);
  double total = 0.0;
  for (Eigen::Index r = 0; r < xm.rows(); ++r) {
    total += log_match_factor(problem.error_model, (ym.row(r) - moved.row(r)).squaredNorm(), state.sigma2,
                              problem.lambda);
  }
  return total;
}

double seq_loglik(const std::vector<AminoAcid>& ax, const std::vector<AminoAcid>& ay, const AlignmentPath& path,
                  const TemperedModel& tempered) {
  return SequenceStats::of(ax, ay, path).loglik(tempered);
}

double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_inv_gamma_density(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

namespace {

double log_prior_given_z(const ModelState& state, const Hyperparams& hp, double log_z) {
  require(state.sigma2 > 0.0, "sigma2 must be positive");
  require(state.gp.open_pen > 0.0 && state.gp.ext_pen > 0.0, "gap penalties must be positive");
  return -gap_penalty(state.path, state.gp) - log_z + log_gamma_density(state.gp.open_pen, hp.a_open, hp.b_open) +
         log_gamma_density(state.gp.ext_pen, hp.a_ext, hp.b_ext) +
         log_inv_gamma_density(state.sigma2, hp.a_sigma, hp.b_sigma);
}

}  // namespace

double log_prior(const ModelState& state, const Hyperparams& hp, bool allow_simultaneous) {
  require(state.gp.open_pen > 0.0 && state.gp.ext_pen > 0.0, "gap penalties must be positive");
  return log_prior_given_z(state, hp, gap_prior_log_Z(state.path.n(), state.path.m(), state.gp, allow_simultaneous));
}

double path_log_target(const AlignmentProblem& problem, const ModelState& state) {
  double total = struct_loglik(problem, state) - gap_penalty(state.path, state.gp);
  if (const TemperedModel* tm = active_model(problem, state)) total += seq_loglik(problem.ax, problem.ay, state.path, *tm);
  return total;
}

double log_posterior(const AlignmentProblem& problem, const ModelState& state, const Hyperparams& hp) {
  require(state.gp.open_pen > 0.0 && state.gp.ext_pen > 0.0, "gap penalties must be positive");
  return log_posterior(problem, state, hp,
                       gap_prior_log_Z(problem.n(), problem.m(), state.gp, problem.allow_simultaneous));
}

double log_posterior(const AlignmentProblem& problem, const ModelState& state, const Hyperparams& hp, double log_z) {
  double total = struct_loglik(problem, state) + log_prior_given_z(state, hp, log_z);
  if (const TemperedModel* tm = active_model(problem, state)) total += seq_loglik(problem.ax, problem.ay, state.path, *tm);
  return total;
}

EffectiveGapPenalties effective_gap_penalties(const ModelState& state, double lambda) {
  const double s2 = state.sigma2;
  EffectiveGapPenalties out;
  out.g_star = 2.0 * s2 * state.gp.open_pen;
  out.h_star = s2 * (2.0 * state.gp.ext_pen + std::log(lambda) - 1.5 * std::log(2.0 * std::numbers::pi * s2));
  out.g_star_printed = s2 * (state.gp.open_pen + 1.5 * std::log(2.0 * std::numbers::pi * std::sqrt(s2)) + std::log(lambda));
  out.h_star_printed = s2 * state.gp.ext_pen;
  return out;
}

}  // namespace bayalign
