#include "bayalign/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bayalign/errors.hpp"

namespace bayalign {
namespace {

void require_nonempty(const SampleSet& samples) { require(!samples.empty(), "empty sample set"); }

void require_sequence(const SampleSet& samples) {
  require_nonempty(samples);
  require(samples.meta.sequence_mode, "grid posteriors need sequence-mode samples");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

const std::vector<std::string>& scalar_names() {
  static const std::vector<std::string> names{"length", "sigma2",  "open",    "ext", "rmsd", "log_posterior", "angle_x",
                                              "angle_y", "angle_z", "tx", "ty", "tz", "k", "eta"};
  return names;
}

std::vector<double> scalar_series(const SampleSet& samples, std::string_view name) {
  const auto& names = scalar_names();
  const auto it = std::find(names.begin(), names.end(), name);
  require(it != names.end(), "unknown monitored scalar '" + std::string(name) + "'");
  const auto which = it - names.begin();
  if (name == "k" || name == "eta") require(samples.meta.sequence_mode, "k and eta are only monitored in sequence mode");

  std::vector<double> out;
  out.reserve(samples.size());
  for (const SampleRecord& r : samples.records) {
    double v = 0.0;
    switch (which) {
      case 0: v = r.length; break;
      case 1: v = r.sigma2; break;
      case 2: v = r.open_pen; break;
      case 3: v = r.ext_pen; break;
      case 4: v = r.rmsd; break;
      case 5: v = r.log_posterior; break;
      case 6: case 7: case 8: v = r.angles(which - 6); break;
      case 9: case 10: case 11: v = r.translation(which - 9); break;
      case 12: v = samples.meta.pam_values.at(static_cast<std::size_t>(r.k_index)); break;
      default: v = samples.meta.eta_values.at(static_cast<std::size_t>(r.eta_index)); break;
    }
    out.push_back(v);
  }
  return out;
}

MapEstimate map_alignment(const SampleSet& samples) {
  require_nonempty(samples);
  std::size_t best = 0;
  for (std::size_t r = 1; r < samples.size(); ++r)
    if (samples.records[r].log_posterior > samples.records[best].log_posterior) best = r;
  return {samples.records[best].path, samples.records[best].log_posterior, best};
}

Eigen::MatrixXd marginal_matrix(const SampleSet& samples) { return marginal_matrix(std::vector<SampleSet>{samples}); }

Eigen::MatrixXd marginal_matrix(const std::vector<SampleSet>& chains) {
  require(!chains.empty(), "no chains");
  const int n = chains.front().meta.n;
  const int m = chains.front().meta.m;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, m);
  std::size_t total = 0;
  for (const SampleSet& s : chains) {
    require_nonempty(s);
    require(s.meta.n == n && s.meta.m == m, "chains disagree on problem dimensions");
    for (const SampleRecord& r : s.records)
      for (const auto& [i, j] : r.path.matched_pairs()) counts(i, j) += 1.0;
    total += s.size();
  }
  return counts / static_cast<double>(total);
}

Eigen::VectorXd row_entropy(const Eigen::MatrixXd& marginal) {
  Eigen::VectorXd h(marginal.rows());
  const auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  for (Eigen::Index i = 0; i < marginal.rows(); ++i) {
    double acc = term(std::max(0.0, 1.0 - marginal.row(i).sum()));
    for (Eigen::Index j = 0; j < marginal.cols(); ++j) acc += term(marginal(i, j));
    h(i) = acc;
  }
  return h;
}

std::pair<double, double> hpd_interval(std::vector<double> values, double mass) {
  require(!values.empty(), "HPD interval of an empty series");
  require(mass > 0.0 && mass <= 1.0, "HPD mass must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const auto width = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) - 1e-9)));
  std::size_t best = 0;
  for (std::size_t i = 1; i + width <= n; ++i)
    if (values[i + width - 1] - values[i] < values[best + width - 1] - values[best]) best = i;
  return {values[best], values[best + width - 1]};
}

ScalarSummary summarize(std::vector<double> values, double mass) {
  require(!values.empty(), "summary of an empty series");
  ScalarSummary s;
  s.mean = mean_of(values);
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  std::tie(s.hpd_lo, s.hpd_hi) = hpd_interval(values, mass);
  // An even-length median can fall just outside a very narrow window.
  s.hpd_lo = std::min(s.hpd_lo, s.median);
  s.hpd_hi = std::max(s.hpd_hi, s.median);
  return s;
}

ScalarSummary scalar_summary(const SampleSet& samples, std::string_view name) {
  require_nonempty(samples);
  return summarize(scalar_series(samples, name));
}

double psrf(const std::vector<std::vector<double>>& chains) {
  require(chains.size() >= 2, "PSRF needs at least two chains");
  const std::size_t len = chains.front().size();
  require(len >= 2, "PSRF needs at least two draws per chain");
  for (const auto& c : chains) require(c.size() == len, "PSRF needs chains of equal length");

  const double l = static_cast<double>(len);
  const double nc = static_cast<double>(chains.size());
  std::vector<double> means;
  double w = 0.0;
  for (const auto& c : chains) {
    const double mu = mean_of(c);
    double ss = 0.0;
    for (double v : c) ss += (v - mu) * (v - mu);
    w += ss / (l - 1.0);
    means.push_back(mu);
  }
  w /= nc;
  const double grand = mean_of(means);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= l / (nc - 1.0);
  if (!(w > 0.0)) throw ContractError("PSRF undefined: zero within-chain variance");
  const double vhat = (l - 1.0) / l * w + b / l;
  return std::sqrt(vhat / w);
}

double psrf(const std::vector<SampleSet>& chains, std::string_view name) {
  std::vector<std::vector<double>> series;
  for (const SampleSet& s : chains) series.push_back(scalar_series(s, name));
  return psrf(series);
}

double batch_means_stderr(const std::vector<double>& values, int num_batches) {
  require(num_batches >= 2, "need at least two batches");
  const std::size_t batch = values.size() / static_cast<std::size_t>(num_batches);
  require(batch >= 1, "too few values for the requested number of batches");
  std::vector<double> means;
  for (int b = 0; b < num_batches; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * batch);
    means.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(batch), 0.0) / static_cast<double>(batch));
  }
  const double mu = mean_of(means);
  double ss = 0.0;
  for (double v : means) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / (num_batches - 1.0) / num_batches);
}

Eigen::MatrixXd k_eta_joint(const std::vector<SampleSet>& chains) {
  require(!chains.empty(), "no chains");
  const SampleMeta& meta = chains.front().meta;
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(meta.pam_values.size()),
                                                static_cast<Eigen::Index>(meta.eta_values.size()));
  std::size_t total = 0;
  for (const SampleSet& s : chains) {
    require_sequence(s);
    require(s.meta.pam_values == meta.pam_values && s.meta.eta_values == meta.eta_values, "chains disagree on the grid");
    for (const SampleRecord& r : s.records) table(r.k_index, r.eta_index) += 1.0;
    total += s.size();
  }
  return table / static_cast<double>(total);
}

Eigen::MatrixXd k_eta_joint(const SampleSet& samples) { return k_eta_joint(std::vector<SampleSet>{samples}); }

Eigen::VectorXd pam_posterior(const SampleSet& samples) { return k_eta_joint(samples).rowwise().sum(); }

Eigen::VectorXd eta_posterior(const SampleSet& samples) { return k_eta_joint(samples).colwise().sum().transpose(); }

std::string traces_csv(const std::vector<SampleSet>& chains) {
  require(!chains.empty(), "no chains");
  const bool seq = chains.front().meta.sequence_mode;
  std::vector<std::string> cols;
  for (const auto& name : scalar_names())
    if (seq || (name != "k" && name != "eta")) cols.push_back(name);

  std::string out = "chain,sweep";
  for (const auto& c : cols) out += "," + c;
  out += '\n';
  for (std::size_t c = 0; c < chains.size(); ++c) {
    std::vector<std::vector<double>> series;
    for (const auto& name : cols) series.push_back(scalar_series(chains[c], name));
    for (std::size_t r = 0; r < chains[c].size(); ++r) {
      out += std::to_string(c) + "," + std::to_string(chains[c].records[r].sweep);
      for (const auto& s : series) out += "," + fmt(s[r]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace bayalign
