#include <doctest.h>

#include "bayalign/errors.hpp"
#include "bayalign/submodel.hpp"

using namespace bayalign;

namespace {

int idx(char c) { return index_of(amino_acid_from_letter(c)); }

}  // namespace

TEST_CASE("embedded PAM1 data") {
  const SubstitutionData& d = dayhoff_pam1();
  for (int r = 0; r < 20; ++r) CHECK(d.transition.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.frequencies.sum() == doctest::Approx(1.0).epsilon(1e-12));
  // About one accepted point mutation per hundred residues.
  double change = 0.0;
  for (int a = 0; a < 20; ++a) change += d.frequencies(a) * (1.0 - d.transition(a, a));
  CHECK(change == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("PAM-k model invariants") {
  for (int k : {1, 100, 250, 500}) {
    const SubstitutionModel s = pam_model(k);
    CHECK((s.joint.array() >= 0.0).all());
    CHECK(std::abs(s.joint.sum() - 1.0) < 1e-12);
    CHECK((s.joint.rowwise().sum() - s.marginal).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((s.joint - s.joint.transpose()).cwiseAbs().maxCoeff() < 1e-6);
  }
  const ReversibleChain rc = make_reversible(dayhoff_pam1());
  for (int k : {100, 250}) CHECK((pam_model(k).marginal - rc.stationary).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(pam_model(0), ContractError);
  CHECK_THROWS_AS(pam_model(501), ContractError);
}

TEST_CASE("long distances converge to independence") {
  const ReversibleChain rc = make_reversible(dayhoff_pam1());
  const Matrix20 joint = rc.stationary.asDiagonal() * transition_power(rc.transition, 5000);
  CHECK((joint - rc.stationary * rc.stationary.transpose()).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("PAM250 log odds against published scores") {
  const Matrix20 psi = log_odds(pam_model(250));
  const std::vector<std::tuple<char, char, int>> table{{'R', 'G', -3}, {'T', 'V', 0},  {'L', 'K', -3}, {'P', 'S', 1},
                                                       {'Q', 'V', -2}, {'A', 'K', -1}, {'E', 'A', 0},  {'A', 'I', -1}};
  for (const auto& [a, b, score] : table) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(std::abs(std::lround(psi(idx(a), idx(b))) - score) <= 1);
  }
  CHECK((psi - psi.transpose()).cwiseAbs().maxCoeff() < 1e-6);
  for (int k : {100, 250})
    for (int a = 0; a < 20; ++a) CHECK(log_odds(pam_model(k))(a, a) > 0.0);
}

TEST_CASE("log odds identities") {
  Vector20 p = Vector20::Constant(1.0 / 20);
  p(0) = 0.1;
  p /= p.sum();
  const SubstitutionModel indep = model_from_joint(p * p.transpose());
  CHECK(log_odds(indep).cwiseAbs().maxCoeff() < 1e-12);

  const SubstitutionModel base = pam_model(100);
  SubstitutionModel doubled = base;
  doubled.joint(3, 5) *= 2.0;
  CHECK(log_odds(doubled)(3, 5) - log_odds(base)(3, 5) == doctest::Approx(3.0103).epsilon(1e-4));
  Matrix20 zero = Matrix20::Identity() / 20.0;
  zero(5, 5) = 0.0;
  CHECK_THROWS_AS(log_odds(model_from_joint(zero)), ContractError);
}

TEST_CASE("tempering") {
  const SubstitutionModel s = pam_model(200);
  const TemperedModel t0 = temper(s, 0.0);
  CHECK((t0.match_logprob.array() - std::log(1.0 / 400)).abs().maxCoeff() < 1e-15);
  CHECK((t0.skip_logprob.array() - std::log(1.0 / 20)).abs().maxCoeff() < 1e-15);
  const TemperedModel t1 = temper(s, 1.0);
  CHECK((t1.match_logprob.array().exp() - s.joint.array()).abs().maxCoeff() < 1e-12);
  CHECK((t1.skip_logprob.array().exp() - s.marginal.array()).abs().maxCoeff() < 1e-12);
  for (double eta : {0.0, 0.3, 0.7, 1.0}) {
    const TemperedModel t = temper(s, eta);
    CHECK(t.match_logprob.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.skip_logprob.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(temper(s, -0.1), ContractError);
  CHECK_THROWS_AS(temper(s, 1.1), ContractError);

  // Two-letter toy joint living on the first two letters.
  Matrix20 toy = Matrix20::Zero();
  toy(0, 0) = 0.4;
  toy(0, 1) = 0.1;
  toy(1, 0) = 0.1;
  toy(1, 1) = 0.4;
  const TemperedModel half = temper(model_from_joint(toy), 0.5);
  const double norm = 2.0 * std::sqrt(0.4) + 2.0 * std::sqrt(0.1);
  CHECK(std::exp(half.match_logprob(0, 0)) == doctest::Approx(std::sqrt(0.4) / norm).epsilon(1e-12));
  CHECK(std::exp(half.match_logprob(0, 1)) == doctest::Approx(std::sqrt(0.1) / norm).epsilon(1e-12));
  CHECK(std::exp(half.match_logprob(0, 0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::exp(half.match_logprob(1, 0)) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("entropy") {
  const SubstitutionModel s100 = pam_model(100);
  CHECK(joint_entropy(temper(s100, 0.0)) == doctest::Approx(std::log(400.0)).epsilon(1e-12));
  Matrix20 point = Matrix20::Zero();
  point(2, 2) = 1.0;
  CHECK(joint_entropy(temper(model_from_joint(point), 1.0)) == doctest::Approx(0.0));

  const double h100 = joint_entropy(temper(s100, 0.8));
  const double h200 = joint_entropy(temper(pam_model(200), 1.0));
  CHECK(std::abs(h100 - h200) / h200 < 0.10);

  const TemperedGrid grid(kDefaultPamGrid.values(), kDefaultEtaGrid.values());
  for (int e = 0; e < grid.num_eta(); ++e)
    for (int k = 1; k < grid.num_pam(); ++k)
      if (e == grid.num_eta() - 1) CHECK(joint_entropy(grid.at(k, e)) >= joint_entropy(grid.at(k - 1, e)));
  for (int k = 0; k < grid.num_pam(); ++k)
    for (int e = 1; e < grid.num_eta(); ++e) CHECK(joint_entropy(grid.at(k, e)) < joint_entropy(grid.at(k, e - 1)));
}

TEST_CASE("grids") {
  CHECK(kDefaultPamGrid.values().size() == 21);
  CHECK(kDefaultEtaGrid.values().size() == 11);
  CHECK(kDefaultEtaGrid.values()[3] == 0.3);
  CHECK(parse_int_grid("100:300:10").values().back() == 300);
  CHECK(parse_real_grid("0:1:0.25").values() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK_THROWS_AS(parse_int_grid("100:300"), ContractError);
  CHECK_THROWS_AS(parse_int_grid("300:100:10"), ContractError);
  CHECK_THROWS_AS(parse_real_grid("0:1:0"), ContractError);
  CHECK_THROWS_AS(parse_real_grid("a:1:0.1"), ContractError);
}

TEST_CASE("substitution data parser") {
  std::string lower = "# toy\nA R N D C Q E G H I L K M F P S T W Y V\n";
  // Uniform symmetric chain: stay with 0.81, move to each other letter with 0.01.
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c <= r; ++c) lower += c == r ? "0.81 " : "0.01 ";
    lower += "\n";
  }
  for (int r = 0; r < 20; ++r) lower += "0.05 ";
  lower += "\n";
  const SubstitutionData d = parse_substitution_data(lower);
  CHECK(d.transition(3, 3) == doctest::Approx(0.81));
  CHECK(d.transition(3, 4) == doctest::Approx(0.01));

  std::string reordered = lower;
  reordered.replace(reordered.find("A R"), 3, "R A");
  CHECK_NOTHROW(parse_substitution_data(reordered));
  CHECK_THROWS_AS(parse_substitution_data("A R N\n"), ParseError);
  std::string not_stochastic = lower;
  not_stochastic.replace(not_stochastic.find("0.81"), 4, "0.91");
  CHECK_THROWS_AS(parse_substitution_data(not_stochastic), ParseError);
  CHECK(parse_substitution_data(dayhoff_pam1_text()).frequencies.isApprox(dayhoff_pam1().frequencies));
}
