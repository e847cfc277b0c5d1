#pragma once

// Forward-backward dynamic programming over pairwise alignments.
//
// A path's log weight is the sum of its emission terms (match(i, j) for a
// match, skip_x(i) / skip_y(j) for unmatched residues) plus its transition
// terms: entering a gap run from a match or from the start costs
// `open_logweight`, every further step inside the run costs `ext_logweight`.
// With open_logweight = -(open + ext) and ext_logweight = -ext this is exactly
// -u(M) of the affine gap prior. An x-skip may never follow a y-skip; when
// `allow_simultaneous` is false a y-skip may not follow an x-skip either.

#include <Eigen/Core>
#include <array>

#include "bayalign/alignment.hpp"
#include "bayalign/logspace.hpp"

namespace bayalign {

using LogMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DpWeights {
  LogMatrix match;   ///< n x m log weights of matching x_i with y_j
  Eigen::VectorXd skip_x;  ///< n log weights of leaving x_i unmatched
  Eigen::VectorXd skip_y;  ///< m log weights of leaving y_j unmatched
  double open_logweight = 0.0;
  double ext_logweight = 0.0;
  bool allow_simultaneous = true;

  int n() const { return static_cast<int>(match.rows()); }
  int m() const { return static_cast<int>(match.cols()); }

  /// Zero emissions; only the gap transitions carry weight.
  static DpWeights gap_only(int n, int m, const GapParams& gp, bool allow_simultaneous = true);
  /// Transition log weights for the affine gap prior: -(open + ext) and -ext.
  void set_gap_params(const GapParams& gp);
};

/// Log weight of one path under `w` (kNegInf if the path uses a forbidden transition).
double path_logweight(const AlignmentPath& path, const DpWeights& w);

/// Log-domain forward table v(i, j, state) over prefixes of X and Y.
class ForwardTable {
 public:
  enum State : int { kMatch = 0, kSkipX = 1, kSkipY = 2 };

  ForwardTable(DpWeights weights, std::array<LogMatrix, 3> v, double total, bool max_product)
      : weights_(std::move(weights)), v_(std::move(v)), total_(total), max_product_(max_product) {}

  const DpWeights& weights() const { return weights_; }
  int n() const { return weights_.n(); }
  int m() const { return weights_.m(); }
  double total() const { return total_; }
  double v(int i, int j, int state) const { return v_[state](i, j); }
  bool is_max_product() const { return max_product_; }

 private:
  DpWeights weights_;
  std::array<LogMatrix, 3> v_;
  double total_ = kNegInf;
  bool max_product_ = false;
};

/// Sum-product recursion; total() = log of the summed path weights.
ForwardTable forward(DpWeights weights);
/// Max-product recursion sharing the same code path; total() = best path log weight.
ForwardTable forward_max(DpWeights weights);

struct SampledPath {
  AlignmentPath path;
  double log_density = 0.0;
};

/// Exact draw from P(path) = weight(path) / exp(total) by stochastic traceback.
SampledPath sample_traceback(const ForwardTable& fwd, Rng& rng);

/// Highest-weight path; ties prefer Match, then SkipX, then SkipY at every traceback step.
AlignmentPath map_traceback(const ForwardTable& max_table);
AlignmentPath map_traceback(const DpWeights& weights);

/// log q(path) = path log weight - total under the (sum-product) table.
double proposal_log_density(const AlignmentPath& path, const ForwardTable& fwd);

/// log Z(gp) = log sum over valid paths of exp(-u(path; gp)).
double gap_prior_log_Z(int n, int m, const GapParams& gp, bool allow_simultaneous = true);

}  // namespace bayalign
