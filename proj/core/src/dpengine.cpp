#include "bayalign/dpengine.hpp"

#include <algorithm>
#include <vector>

#include "bayalign/errors.hpp"

namespace bayalign {
namespace {

struct SumOp {
  static double combine(double a, double b) { return log_sum_exp(a, b); }
  static double combine(double a, double b, double c) { return log_sum_exp(a, b, c); }
};

struct MaxOp {
  static double combine(double a, double b) { return std::max(a, b); }
  static double combine(double a, double b, double c) { return std::max({a, b, c}); }
};

void check_weights(const DpWeights& w) {
  require(w.n() >= 1 && w.m() >= 1, "dynamic programming needs two nonempty sequences");
  require(w.skip_x.size() == w.n() && w.skip_y.size() == w.m(), "skip weight vectors do not match the match table");
  require(!w.match.hasNaN() && !w.skip_x.hasNaN() && !w.skip_y.hasNaN(), "non-finite dynamic programming weights");
  require(w.open_logweight == w.open_logweight && w.ext_logweight == w.ext_logweight, "NaN gap weights");
}

template <typename Op>
ForwardTable run_forward(DpWeights w, bool max_product) {
  check_weights(w);
  const int n = w.n();
  const int m = w.m();
  std::array<LogMatrix, 3> v;
  for (auto& t : v) t = LogMatrix::Constant(n + 1, m + 1, kNegInf);
  auto& vm = v[ForwardTable::kMatch];
  auto& vx = v[ForwardTable::kSkipX];
  auto& vy = v[ForwardTable::kSkipY];

  const double open = w.open_logweight;
  const double ext = w.ext_logweight;
  const double ext_xy = w.allow_simultaneous ? ext : kNegInf;

  vm(0, 0) = 0.0;  // the begin state behaves like a match
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (i > 0 && j > 0) {
        vm(i, j) = w.match(i - 1, j - 1) + Op::combine(vm(i - 1, j - 1), vx(i - 1, j - 1), vy(i - 1, j - 1));
      }
      if (i > 0) {
        vx(i, j) = w.skip_x(i - 1) + Op::combine(vm(i - 1, j) + open, vx(i - 1, j) + ext);
      }
      if (j > 0) {
        vy(i, j) = w.skip_y(j - 1) + Op::combine(vm(i, j - 1) + open, vx(i, j - 1) + ext_xy, vy(i, j - 1) + ext);
      }
    }
  }
  const double total = Op::combine(vm(n, m), vx(n, m), vy(n, m));
  return ForwardTable(std::move(w), std::move(v), total, max_product);
}

// Log weights of the predecessor states of `state` at (i, j).
std::array<double, 3> predecessor_logweights(const ForwardTable& t, int i, int j, int state) {
  const DpWeights& w = t.weights();
  std::array<double, 3> out{kNegInf, kNegInf, kNegInf};
  switch (state) {
    case ForwardTable::kMatch:
      for (int l = 0; l < 3; ++l) out[static_cast<std::size_t>(l)] = t.v(i - 1, j - 1, l);
      break;
    case ForwardTable::kSkipX:
      out[0] = t.v(i - 1, j, ForwardTable::kMatch) + w.open_logweight;
      out[1] = t.v(i - 1, j, ForwardTable::kSkipX) + w.ext_logweight;
      break;
    default:
      out[0] = t.v(i, j - 1, ForwardTable::kMatch) + w.open_logweight;
      out[1] = w.allow_simultaneous ? t.v(i, j - 1, ForwardTable::kSkipX) + w.ext_logweight : kNegInf;
      out[2] = t.v(i, j - 1, ForwardTable::kSkipY) + w.ext_logweight;
      break;
  }
  return out;
}

template <typename Choose>
AlignmentPath traceback(const ForwardTable& t, Choose&& choose) {
  int i = t.n();
  int j = t.m();
  std::vector<Step> reversed;
  reversed.reserve(static_cast<std::size_t>(i + j));
  int state = choose(std::array<double, 3>{t.v(i, j, 0), t.v(i, j, 1), t.v(i, j, 2)});
  while (i > 0 || j > 0) {
    const auto pred = predecessor_logweights(t, i, j, state);
    switch (state) {
      case ForwardTable::kMatch:
        reversed.push_back(Step::Match);
        --i;
        --j;
        break;
      case ForwardTable::kSkipX:
        reversed.push_back(Step::SkipX);
        --i;
        break;
      default:
        reversed.push_back(Step::SkipY);
        --j;
        break;
    }
    if (i == 0 && j == 0) break;
    state = choose(pred);
  }
  std::reverse(reversed.begin(), reversed.end());
  return AlignmentPath(t.n(), t.m(), std::move(reversed));
}

int argmax_prefer_first(const std::array<double, 3>& values) {
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (values[static_cast<std::size_t>(k)] > values[static_cast<std::size_t>(best)]) best = k;
  return best;
}

}  // namespace

void DpWeights::set_gap_params(const GapParams& gp) {
  open_logweight = -(gp.open_pen + gp.ext_pen);
  ext_logweight = -gp.ext_pen;
}

DpWeights DpWeights::gap_only(int n, int m, const GapParams& gp, bool allow_simultaneous) {
  DpWeights w;
  w.match = LogMatrix::Zero(n, m);
  w.skip_x = Eigen::VectorXd::Zero(n);
  w.skip_y = Eigen::VectorXd::Zero(m);
  w.set_gap_params(gp);
  w.allow_simultaneous = allow_simultaneous;
  return w;
}

double path_logweight(const AlignmentPath& path, const DpWeights& w) {
  require(path.n() == w.n() && path.m() == w.m(), "path dimensions do not match the weights");
  double total = 0.0;
  int i = 0, j = 0;
  Step prev = Step::Match;
  for (Step s : path.steps()) {
    switch (s) {
      case Step::Match:
        total += w.match(i, j);
        ++i;
        ++j;
        break;
      case Step::SkipX:
        if (prev == Step::SkipY) return kNegInf;
        total += (prev == Step::Match ? w.open_logweight : w.ext_logweight) + w.skip_x(i);
        ++i;
        break;
      case Step::SkipY:
        if (prev == Step::SkipX && !w.allow_simultaneous) return kNegInf;
        total += (prev == Step::Match ? w.open_logweight : w.ext_logweight) + w.skip_y(j);
        ++j;
        break;
    }
    prev = s;
  }
  return total;
}

ForwardTable forward(DpWeights weights) { return run_forward<SumOp>(std::move(weights), false); }

ForwardTable forward_max(DpWeights weights) { return run_forward<MaxOp>(std::move(weights), true); }

SampledPath sample_traceback(const ForwardTable& fwd, Rng& rng) {
  require(!fwd.is_max_product(), "sample_traceback needs a sum-product table");
  require(fwd.total() > kNegInf, "forward table has no path of positive weight");
  AlignmentPath path = traceback(fwd, [&rng](const std::array<double, 3>& logw) {
    return static_cast<int>(sample_log_categorical(logw, rng));
  });
  const double log_density = proposal_log_density(path, fwd);
  return {std::move(path), log_density};
}

AlignmentPath map_traceback(const ForwardTable& max_table) {
  require(max_table.is_max_product(), "map_traceback needs a max-product table");
  return traceback(max_table, argmax_prefer_first);
}

AlignmentPath map_traceback(const DpWeights& weights) { return map_traceback(forward_max(weights)); }

double proposal_log_density(const AlignmentPath& path, const ForwardTable& fwd) {
  require(!fwd.is_max_product(), "proposal densities need a sum-product table");
  return path_logweight(path, fwd.weights()) - fwd.total();
}

double gap_prior_log_Z(int n, int m, const GapParams& gp, bool allow_simultaneous) {
  require(n >= 1 && m >= 1, "gap_prior_log_Z: lengths must be positive");
  const double open = -(gp.open_pen + gp.ext_pen);
  const double ext = -gp.ext_pen;
  const double ext_xy = allow_simultaneous ? ext : kNegInf;
  // Two rolling rows of the gap-only recursion.
  const auto width = static_cast<std::size_t>(m + 1);
  std::vector<double> pm(width, kNegInf), px(width, kNegInf), py(width, kNegInf);
  std::vector<double> cm(width), cx(width), cy(width);
  pm[0] = 0.0;
  for (int j = 1; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    py[ju] = log_sum_exp(pm[ju - 1] + open, py[ju - 1] + ext);
  }
  for (int i = 1; i <= n; ++i) {
    cm[0] = kNegInf;
    cx[0] = log_sum_exp(pm[0] + open, px[0] + ext);
    cy[0] = kNegInf;
    for (std::size_t j = 1; j < width; ++j) {
      cm[j] = log_sum_exp(pm[j - 1], px[j - 1], py[j - 1]);
      cx[j] = log_sum_exp(pm[j] + open, px[j] + ext);
      cy[j] = log_sum_exp(cm[j - 1] + open, cx[j - 1] + ext_xy, cy[j - 1] + ext);
    }
    std::swap(pm, cm);
    std::swap(px, cx);
    std::swap(py, cy);
  }
  return log_sum_exp(pm[width - 1], px[width - 1], py[width - 1]);
}

}  // namespace bayalign
