#include "bayalign/alignment.hpp"

#include <algorithm>
#include <functional>

#include "bayalign/errors.hpp"

namespace bayalign {

char step_code(Step s) {
  switch (s) {
    case Step::Match: return 'M';
    case Step::SkipX: return 'X';
    case Step::SkipY: return 'Y';
  }
  return '?';
}

bool is_valid_path(int n, int m, const std::vector<Step>& steps) {
  if (n < 0 || m < 0) return false;
  int i = 0, j = 0;
  Step prev = Step::Match;
  for (Step s : steps) {
    if (s == Step::SkipX && prev == Step::SkipY) return false;
    if (s != Step::SkipY) ++i;
    if (s != Step::SkipX) ++j;
    prev = s;
  }
  return i == n && j == m;
}

AlignmentPath::AlignmentPath(int n, int m, std::vector<Step> steps) : n_(n), m_(m), steps_(std::move(steps)) {
  if (!is_valid_path(n, m, steps_)) {
    throw ContractError("invalid alignment path '" + code() + "' for lengths " + std::to_string(n) + " x " +
                        std::to_string(m));
  }
}

AlignmentPath AlignmentPath::all_match(int n) {
  return AlignmentPath(n, n, std::vector<Step>(static_cast<std::size_t>(n), Step::Match));
}

AlignmentPath AlignmentPath::from_pairs(int n, int m, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Step> steps;
  steps.reserve(static_cast<std::size_t>(n + m));
  int i = 0, j = 0;
  auto gap_until = [&](int ii, int jj) {
    for (; i < ii; ++i) steps.push_back(Step::SkipX);
    for (; j < jj; ++j) steps.push_back(Step::SkipY);
  };
  for (const auto& [pi, pj] : pairs) {
    if (pi < i || pj < j || pi >= n || pj >= m) throw ContractError("matched pairs must be strictly increasing and in range");
    gap_until(pi, pj);
    steps.push_back(Step::Match);
    ++i;
    ++j;
  }
  gap_until(n, m);
  return AlignmentPath(n, m, std::move(steps));
}

int AlignmentPath::match_count() const {
  return static_cast<int>(std::count(steps_.begin(), steps_.end(), Step::Match));
}

bool AlignmentPath::has_simultaneous_gap() const {
  for (std::size_t t = 1; t < steps_.size(); ++t)
    if (steps_[t - 1] == Step::SkipX && steps_[t] == Step::SkipY) return true;
  return false;
}

std::vector<std::pair<int, int>> AlignmentPath::matched_pairs() const {
  std::vector<std::pair<int, int>> out;
  int i = 0, j = 0;
  for (Step s : steps_) {
    if (s == Step::Match) out.emplace_back(i, j);
    if (s != Step::SkipY) ++i;
    if (s != Step::SkipX) ++j;
  }
  return out;
}

Eigen::MatrixXi AlignmentPath::to_match_matrix() const {
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(n_, m_);
  for (const auto& [i, j] : matched_pairs()) out(i, j) = 1;
  return out;
}

AlignmentPath AlignmentPath::transposed() const {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [i, j] : matched_pairs()) pairs.emplace_back(j, i);
  return from_pairs(m_, n_, pairs);
}

std::string AlignmentPath::code() const {
  std::string out;
  out.reserve(steps_.size());
  for (Step s : steps_) out += step_code(s);
  return out;
}

int GapStats::total_length() const {
  int total = 0;
  for (int l : lengths) total += l;
  return total;
}

GapStats gap_stats(const AlignmentPath& path) {
  GapStats stats;
  int run = 0;
  for (Step s : path.steps()) {
    if (s == Step::Match) {
      if (run > 0) stats.lengths.push_back(run);
      run = 0;
    } else {
      ++run;
    }
  }
  if (run > 0) stats.lengths.push_back(run);
  stats.gaps = static_cast<int>(stats.lengths.size());
  return stats;
}

double gap_penalty(const AlignmentPath& path, const GapParams& gp) {
  const GapStats stats = gap_stats(path);
  return gp.open_pen * stats.gaps + gp.ext_pen * stats.total_length();
}

std::vector<AlignmentPath> enumerate_paths(int n, int m, bool allow_simultaneous) {
  if (n < 0 || m < 0) throw ContractError("enumerate_paths: negative length");
  if (n * m > 36) {
    throw RefusalError("enumerate_paths: n * m = " + std::to_string(n * m) + " exceeds the limit of 36");
  }
  std::vector<AlignmentPath> out;
  std::vector<Step> steps;
  std::function<void(int, int)> extend = [&](int i, int j) {
    if (i == n && j == m) {
      out.emplace_back(n, m, steps);
      return;
    }
    const Step prev = steps.empty() ? Step::Match : steps.back();
    if (i < n && j < m) {
      steps.push_back(Step::Match);
      extend(i + 1, j + 1);
      steps.pop_back();
    }
    if (i < n && prev != Step::SkipY) {
      steps.push_back(Step::SkipX);
      extend(i + 1, j);
      steps.pop_back();
    }
    if (j < m && (allow_simultaneous || prev != Step::SkipX)) {
      steps.push_back(Step::SkipY);
      extend(i, j + 1);
      steps.pop_back();
    }
  };
  extend(0, 0);
  return out;
}

AlignmentPath remove_match(const AlignmentPath& path, std::size_t step_index) {
  const auto& steps = path.steps();
  if (step_index >= steps.size() || steps[step_index] != Step::Match) {
    throw ContractError("remove_match: step is not a match");
  }
  auto pairs = path.matched_pairs();
  const auto rank = static_cast<std::size_t>(std::count(steps.begin(), steps.begin() + static_cast<long>(step_index), Step::Match));
  pairs.erase(pairs.begin() + static_cast<long>(rank));
  return AlignmentPath::from_pairs(path.n(), path.m(), pairs);
}

}  // namespace bayalign
