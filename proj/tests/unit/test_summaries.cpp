#include <doctest.h>

#include <random>
#include <sstream>

#include "bayalign/errors.hpp"
#include "bayalign/summaries.hpp"

using namespace bayalign;

namespace {

SampleRecord record(long sweep, const AlignmentPath& path, double sigma2, double lp) {
  SampleRecord r;
  r.sweep = sweep;
  r.path = path;
  r.length = path.match_count();
  r.sigma2 = sigma2;
  r.log_posterior = lp;
  return r;
}

SampleSet three_by_three() {
  SampleSet s;
  s.meta.n = 3;
  s.meta.m = 3;
  const AlignmentPath diag = AlignmentPath::all_match(3);
  const AlignmentPath shifted = AlignmentPath::from_pairs(3, 3, {{0, 1}, {1, 2}});
  s.records = {record(0, diag, 1.0, -5.0), record(1, diag, 2.0, -3.0), record(2, shifted, 3.0, -3.0),
               record(3, diag, 4.0, -7.0)};
  return s;
}

}  // namespace

TEST_CASE("scalar series") {
  const SampleSet s = three_by_three();
  CHECK(scalar_series(s, "sigma2") == std::vector<double>{1, 2, 3, 4});
  CHECK(scalar_series(s, "length") == std::vector<double>{3, 3, 2, 3});
  CHECK_THROWS_AS(scalar_series(s, "nonsense"), ContractError);
  CHECK_THROWS_AS(scalar_series(s, "eta"), ContractError);
  CHECK(scalar_names().size() == 14);
}

TEST_CASE("MAP alignment takes the first maximum") {
  const MapEstimate map = map_alignment(three_by_three());
  CHECK(map.record_index == 1);
  CHECK(map.log_posterior == -3.0);
  CHECK_THROWS_AS(map_alignment(SampleSet{}), ContractError);
}

TEST_CASE("marginal matrix and row entropy") {
  const Eigen::MatrixXd p = marginal_matrix(three_by_three());
  CHECK(p(0, 0) == doctest::Approx(0.75));
  CHECK(p(0, 1) == doctest::Approx(0.25));
  CHECK(p(2, 2) == doctest::Approx(0.75));
  CHECK(p(2, 0) == 0.0);
  CHECK(p.rowwise().sum().maxCoeff() <= 1.0 + 1e-12);

  const Eigen::VectorXd h = row_entropy(p);
  const double two_way = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  CHECK(h(0) == doctest::Approx(two_way));
  CHECK(h(2) == doctest::Approx(two_way));  // the unmatched mass counts as an outcome

  SampleSet other = three_by_three();
  other.meta.n = 4;
  CHECK_THROWS_AS(marginal_matrix(std::vector<SampleSet>{three_by_three(), other}), ContractError);
  CHECK(marginal_matrix(std::vector<SampleSet>{three_by_three(), three_by_three()}).isApprox(p));
}

TEST_CASE("HPD intervals and summaries") {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i);
  const auto [lo, hi] = hpd_interval(v, 0.9);
  CHECK(hi - lo == 89.0);

  // Skewed sample: the narrowest window hugs the dense end.
  std::vector<double> skew;
  for (int i = 0; i < 90; ++i) skew.push_back(i * 0.01);
  for (int i = 0; i < 10; ++i) skew.push_back(100.0 + i);
  const auto [slo, shi] = hpd_interval(skew, 0.9);
  CHECK(slo == 0.0);
  CHECK(shi == doctest::Approx(0.89));

  const ScalarSummary s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.hpd_lo <= s.median);
  CHECK(s.median <= s.hpd_hi);
  CHECK_THROWS_AS(summarize({}), ContractError);
  CHECK_THROWS_AS(hpd_interval({1.0}, 0.0), ContractError);
}

TEST_CASE("potential scale reduction") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> same(4, std::vector<double>(5000));
  for (auto& c : same)
    for (double& v : c) v = normal(rng);
  CHECK(psrf(same) == doctest::Approx(1.0).epsilon(0.01));

  auto apart = same;
  for (double& v : apart[0]) v += 5.0;
  CHECK(psrf(apart) > 1.5);

  // Hand value: chains {0, 2} and {2, 4}; W = 2, B = 4, Vhat = 3, R = sqrt(3/2).
  CHECK(psrf({{0, 2}, {2, 4}}) == doctest::Approx(std::sqrt(1.5)));

  CHECK_THROWS_AS(psrf({{1, 2, 3}}), ContractError);
  CHECK_THROWS_AS(psrf({{1, 2, 3}, {1, 2}}), ContractError);
  CHECK_THROWS_AS(psrf({{1, 1}, {1, 1}}), ContractError);
}

TEST_CASE("batch-means standard error") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> iid(100000);
  for (double& v : iid) v = normal(rng);
  CHECK(batch_means_stderr(iid) == doctest::Approx(2.0 / std::sqrt(100000.0)).epsilon(0.3));

  // Strong autocorrelation inflates the error.
  std::vector<double> ar(100000);
  double x = 0.0;
  for (double& v : ar) v = x = 0.99 * x + normal(rng) * std::sqrt(1 - 0.99 * 0.99);
  CHECK(batch_means_stderr(ar) > 5.0 * batch_means_stderr(iid) / 2.0);
  CHECK_THROWS_AS(batch_means_stderr({1.0}, 50), ContractError);
}

TEST_CASE("grid posteriors") {
  SampleSet s = three_by_three();
  CHECK_THROWS_AS(k_eta_joint(s), ContractError);
  s.meta.sequence_mode = true;
  s.meta.pam_values = {100, 200};
  s.meta.eta_values = {0.0, 0.5, 1.0};
  const int cells[4][2] = {{0, 2}, {0, 2}, {1, 1}, {0, 0}};
  for (int r = 0; r < 4; ++r) {
    s.records[r].k_index = cells[r][0];
    s.records[r].eta_index = cells[r][1];
  }
  const Eigen::MatrixXd j = k_eta_joint(s);
  CHECK(j(0, 2) == doctest::Approx(0.5));
  CHECK(j.sum() == doctest::Approx(1.0));
  CHECK(pam_posterior(s)(0) == doctest::Approx(0.75));
  CHECK(eta_posterior(s)(1) == doctest::Approx(0.25));
  CHECK(scalar_series(s, "k") == std::vector<double>{100, 100, 200, 100});
  CHECK(scalar_series(s, "eta") == std::vector<double>{1.0, 1.0, 0.5, 0.0});
}

TEST_CASE("trace CSV") {
  SampleSet s = three_by_three();
  const std::string csv = traces_csv({s, s});
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "chain,sweep,length,sigma2,open,ext,rmsd,log_posterior,angle_x,angle_y,angle_z,tx,ty,tz");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 8);
  CHECK(csv.find("\n1,3,3,4,") != std::string::npos);
}
