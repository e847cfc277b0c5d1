#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bayalign {

/// One consumption step of a pairwise alignment.
enum class Step : std::uint8_t {
  Match,  ///< consumes one residue of X and one of Y
  SkipX,  ///< consumes one residue of X, unmatched
  SkipY,  ///< consumes one residue of Y, unmatched
};

char step_code(Step s);

/// A monotone matching between X (length n) and Y (length m) written as steps.
///
/// Invariants: matches + x-skips = n, matches + y-skips = m, and an x-skip never
/// directly follows a y-skip (within a gap run all x-skips come first).
class AlignmentPath {
 public:
  AlignmentPath() = default;
  /// Validates the invariants; throws ContractError on violation.
  AlignmentPath(int n, int m, std::vector<Step> steps);

  static AlignmentPath all_match(int n);
  /// Matches the given strictly increasing 0-based pairs, canonical gap runs in between.
  static AlignmentPath from_pairs(int n, int m, const std::vector<std::pair<int, int>>& pairs);

  int n() const { return n_; }
  int m() const { return m_; }
  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  int match_count() const;
  bool has_simultaneous_gap() const;

  /// 0-based (i, j) pairs in increasing order.
  std::vector<std::pair<int, int>> matched_pairs() const;
  Eigen::MatrixXi to_match_matrix() const;

  /// Swaps the roles of X and Y and re-canonicalises every gap run.
  AlignmentPath transposed() const;

  /// Compact "MXY..." encoding, handy for hashing and test output.
  std::string code() const;

  bool operator==(const AlignmentPath&) const = default;
  auto operator<=>(const AlignmentPath&) const = default;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<Step> steps_;
};

bool is_valid_path(int n, int m, const std::vector<Step>& steps);

/// Affine gap penalties. `open_pen` is charged once per gap, `ext_pen` per unmatched residue.
struct GapParams {
  double open_pen = 4.0;
  double ext_pen = 0.1;
};

struct GapStats {
  int gaps = 0;
  std::vector<int> lengths;
  int total_length() const;
};

/// Maximal runs of skips; a run mixing x-skips and y-skips is one gap.
GapStats gap_stats(const AlignmentPath& path);

/// u(M) = open_pen * (number of gaps) + ext_pen * (total unmatched residues).
double gap_penalty(const AlignmentPath& path, const GapParams& gp);

/// Every valid path for (n, m). Refuses (RefusalError) when n * m > 36.
/// With `allow_simultaneous` false, a y-skip may not follow an x-skip either.
std::vector<AlignmentPath> enumerate_paths(int n, int m, bool allow_simultaneous = true);

/// Removes the match at step `step_index`, merging the neighbouring gap runs canonically.
AlignmentPath remove_match(const AlignmentPath& path, std::size_t step_index);

}  // namespace bayalign
