#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bayalign/alignment.hpp"

namespace bayalign {

/// Monitored values of one retained sweep.
struct SampleRecord {
  long sweep = 0;
  AlignmentPath path;
  int length = 0;
  double sigma2 = 0.0;
  double open_pen = 0.0;
  double ext_pen = 0.0;
  Eigen::Vector3d angles = Eigen::Vector3d::Zero();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double rmsd = 0.0;
  int k_index = -1;
  int eta_index = -1;
  double log_posterior = 0.0;
};

struct SampleMeta {
  std::uint64_t seed = 0;
  long iterations = 0;
  long burn_in = 0;
  long thin = 1;
  int n = 0;
  int m = 0;
  bool sequence_mode = false;
  std::vector<int> pam_values;
  std::vector<double> eta_values;
};

struct SampleSet {
  std::vector<SampleRecord> records;
  SampleMeta meta;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

/// Names accepted by scalar_series: length, sigma2, open, ext, rmsd,
/// log_posterior, angle_x, angle_y, angle_z, tx, ty, tz, k, eta.
const std::vector<std::string>& scalar_names();
std::vector<double> scalar_series(const SampleSet& samples, std::string_view name);

struct MapEstimate {
  AlignmentPath path;
  double log_posterior = 0.0;
  std::size_t record_index = 0;
};

/// Record with the highest log posterior; the first one wins ties.
MapEstimate map_alignment(const SampleSet& samples);

/// Fraction of records matching each (i, j).
Eigen::MatrixXd marginal_matrix(const SampleSet& samples);
Eigen::MatrixXd marginal_matrix(const std::vector<SampleSet>& chains);

/// Per-row entropy (nats) of the marginal matrix, the unmatched mass included.
Eigen::VectorXd row_entropy(const Eigen::MatrixXd& marginal);

struct ScalarSummary {
  double mean = 0.0;
  double median = 0.0;
  double hpd_lo = 0.0;
  double hpd_hi = 0.0;
};

ScalarSummary summarize(std::vector<double> values, double mass = 0.9);
ScalarSummary scalar_summary(const SampleSet& samples, std::string_view name);

/// Narrowest interval holding ceil(mass * N) of the sorted values.
std::pair<double, double> hpd_interval(std::vector<double> values, double mass);

/// Gelman-Rubin potential scale reduction factor, sqrt(Vhat / W).
double psrf(const std::vector<std::vector<double>>& chains);
double psrf(const std::vector<SampleSet>& chains, std::string_view name);

/// Monte Carlo standard error of the mean by non-overlapping batch means.
double batch_means_stderr(const std::vector<double>& values, int num_batches = 50);

Eigen::VectorXd pam_posterior(const SampleSet& samples);
Eigen::VectorXd eta_posterior(const SampleSet& samples);
Eigen::MatrixXd k_eta_joint(const SampleSet& samples);
Eigen::MatrixXd k_eta_joint(const std::vector<SampleSet>& chains);

/// Per-record scalar traces of one or more chains as CSV (one column per scalar name).
std::string traces_csv(const std::vector<SampleSet>& chains);

}  // namespace bayalign
