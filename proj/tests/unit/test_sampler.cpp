#include <doctest.h>

#include <map>

#include "bayalign/errors.hpp"
#include "bayalign/sampler.hpp"
#include "support/oracles.hpp"

using namespace bayalign;

namespace {

AlignmentProblem identical_problem(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AlignmentProblem p;
  p.x = oracle::random_walk(n, rng);
  p.y = p.x;
  return p;
}

AlignmentProblem noisy_tiny(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.5);
  AlignmentProblem p;
  p.x = oracle::random_walk(n, rng);
  p.y = Coords(m, 3);
  for (int j = 0; j < m; ++j)
    p.y.row(j) = p.x.row(std::min(j, n - 1)) + Eigen::RowVector3d(normal(rng), normal(rng), normal(rng));
  p.lambda = 100.0;
  return p;
}

ChainConfig fixed_parameters(long iterations, long burn_in, std::uint64_t seed) {
  ChainConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.seed = seed;
  cfg.update_sigma2 = false;
  cfg.update_gaps = false;
  return cfg;
}

}  // namespace

TEST_CASE("sigma2 full conditional moments") {
  const AlignmentProblem p = identical_problem(6, 1);
  ModelState s;
  s.path = AlignmentPath::all_match(6);
  s.dp2 = 10.0;
  const Hyperparams hp;
  Rng rng(2);
  const int draws = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double v = gibbs_sigma2(s, hp, rng);
    sum += v;
    sum2 += v * v;
  }
  const double shape = hp.a_sigma + 9.0, scale = hp.b_sigma + 5.0;
  const double mean = scale / (shape - 1.0);
  const double var = mean * mean / (shape - 2.0);
  CHECK(sum / draws == doctest::Approx(mean).epsilon(0.005));
  CHECK(sum2 / draws - (sum / draws) * (sum / draws) == doctest::Approx(var).epsilon(0.03));

  s.path = AlignmentPath::from_pairs(3, 3, {});
  s.dp2 = 0.0;
  sum = 0.0;
  for (int d = 0; d < draws; ++d) sum += gibbs_sigma2(s, hp, rng);
  CHECK(sum / draws == doctest::Approx(hp.b_sigma / (hp.a_sigma - 1.0)).epsilon(0.01));
}

TEST_CASE("gap acceptance ratio") {
  const Hyperparams hp;
  const AlignmentPath path = AlignmentPath::from_pairs(5, 6, {{0, 0}, {2, 1}, {3, 4}});
  const GapParams a{2.0, 0.1}, b{3.5, 0.07};
  const double za = gap_prior_log_Z(5, 6, a), zb = gap_prior_log_Z(5, 6, b);
  CHECK(gap_log_accept_ratio(path, a, a, hp, true, za, za) == 0.0);
  CHECK(gap_log_accept_ratio(path, a, b, hp, true, za, zb) ==
        doctest::Approx(-gap_log_accept_ratio(path, b, a, hp, true, zb, za)));
  // Hand-assembled: three gaps, five skipped residues.
  const double expected = -(3.5 * 3 + 0.07 * 5) - zb + (2.0 * 3 + 0.1 * 5) + za +
                          hp.a_open * std::log(3.5 / 2.0) - hp.b_open * 1.5 + hp.a_ext * std::log(0.07 / 0.1) -
                          hp.b_ext * (0.07 - 0.1);
  CHECK(gap_stats(path).gaps == 3);
  CHECK(gap_log_accept_ratio(path, a, b, hp, true, za, zb) == doctest::Approx(expected));

  ModelState s;
  s.path = path;
  s.gp = a;
  Rng rng(3);
  double z_out = 0.0;
  for (int t = 0; t < 100; ++t) {
    const GapUpdate gu = mh_gap_update(s, hp, 0.3, 0.3, true, za, rng, &z_out);
    CHECK(gu.gp.open_pen > 0.0);
    if (!gu.accepted) CHECK(z_out == za);
    else CHECK(z_out == doctest::Approx(gap_prior_log_Z(5, 6, gu.gp)));
  }
}

TEST_CASE("local moves on identical structures are almost always accepted") {
  const AlignmentProblem p = identical_problem(30, 4);
  ModelState start = make_state(p, AlignmentPath::all_match(30), 0.01, {4.0, 0.1});
  ChainConfig cfg = fixed_parameters(2000, 0, 5);
  cfg.global_move_prob = 0.0;
  ChainStats stats;
  const SampleSet s = run_chain(p, Hyperparams{}, cfg, FragmentLibrary{}, start, &stats);
  CHECK(stats.local_proposed == 2000);
  CHECK(stats.local_accepted >= 0.99 * stats.local_proposed);
  int diagonal = 0;
  for (const auto& r : s.records) diagonal += r.path == AlignmentPath::all_match(30);
  CHECK(diagonal > 0.5 * s.size());
}

TEST_CASE("fragment library") {
  std::mt19937_64 rng(6);
  const Coords x = oracle::random_walk(20, rng);
  const FragmentLibrary self = build_fragment_library(x, x, 1.0);
  for (int i = 0; i + kFragmentLength <= 20; ++i) {
    bool found = false;
    for (const auto& e : self.entries) found |= e.x_start == i && e.y_start == i && e.rmsd < 1e-6;
    CHECK(found);
  }
  CHECK(build_fragment_library(x, x, 0.0).empty());
  const FragmentLibrary tiny = build_fragment_library(x.topRows(5), x, 1.0);
  CHECK(tiny.too_short);
  CHECK(tiny.empty());

  const Coords a = oracle::random_walk(30, rng), b = oracle::random_walk(30, rng);
  const double delta = 2.0;
  int expected = 0;
  for (int i = 0; i + kFragmentLength <= 30; ++i)
    for (int j = 0; j + kFragmentLength <= 30; ++j)
      expected += std::sqrt(oracle::horn_dp2(a.middleRows(i, kFragmentLength), b.middleRows(j, kFragmentLength)) /
                            kFragmentLength) < delta;
  const FragmentLibrary lib = build_fragment_library(a, b, delta);
  CHECK(static_cast<int>(lib.entries.size()) == expected);
  for (const auto& e : lib.entries) CHECK(e.rmsd < delta);
}

TEST_CASE("global moves alone leave the conditional path posterior invariant") {
  const AlignmentProblem p = noisy_tiny(4, 4, 7);
  const double sigma2 = 4.0;
  const GapParams gp{1.0, 0.5};
  FragmentLibrary lib;
  std::mt19937_64 gen(8);
  for (int e = 0; e < 3; ++e) {
    Registration r;
    r.rotation = Eigen::AngleAxisd(0.2 * e, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    r.translation = p.y.colwise().mean() - p.x.colwise().mean() * r.rotation;
    lib.entries.push_back({r, 0, 0, 0.0});
  }

  std::vector<AlignmentPath> support;
  std::vector<double> logw;
  for (const auto& path : enumerate_paths(4, 4)) {
    if (path.match_count() < 3) continue;
    support.push_back(path);
    logw.push_back(path_log_target(p, make_state(p, path, sigma2, gp)));
  }

  ChainConfig cfg = fixed_parameters(300000, 1000, 9);
  cfg.local_moves = false;
  cfg.global_move_prob = 1.0;
  const SampleSet s = run_chain(p, Hyperparams{}, cfg, lib, make_state(p, AlignmentPath::all_match(4), sigma2, gp));
  std::map<AlignmentPath, double> freq;
  for (const auto& r : s.records) freq[r.path] += 1.0 / s.size();
  CHECK(oracle::total_variation(support, logw, freq) < 0.04);
}

TEST_CASE("global moves need a library") {
  const AlignmentProblem p = noisy_tiny(8, 8, 10);
  ModelState s = make_state(p, AlignmentPath::all_match(8), 2.0, {1.0, 0.5});
  const ModelState before = s;
  Rng rng(11);
  const AlignmentMove mv = mh_alignment_global(p, s, FragmentLibrary{}, rng);
  CHECK(!mv.proposed);
  CHECK(s.path == before.path);

  // At the state's own registration the move is an exact Metropolised independence step.
  FragmentLibrary lib;
  lib.entries.push_back({s.reg, 0, 0, 0.0});
  int accepted = 0;
  for (int t = 0; t < 200; ++t) {
    const AlignmentMove m = mh_alignment_global(p, s, lib, rng);
    CHECK(m.proposed);
    accepted += m.accepted;
    CHECK(s.path.match_count() >= 3);
  }
  CHECK(accepted > 0);
}

TEST_CASE("grid parameters are drawn from the exact categorical") {
  const TemperedGrid grid(kDefaultPamGrid.values(), kDefaultEtaGrid.values());
  std::vector<AminoAcid> seq;
  for (int i = 0; i < 40; ++i) seq.push_back(static_cast<AminoAcid>(i % 20));
  const SequenceStats same = SequenceStats::of(seq, seq, AlignmentPath::all_match(40));
  const Eigen::MatrixXd table = k_eta_log_table(grid, same);
  Eigen::Index kb = 0, eb = 0;
  table.maxCoeff(&kb, &eb);
  CHECK(grid.pam_values()[kb] == 100);
  CHECK(grid.eta_values()[eb] == doctest::Approx(1.0));
  CHECK(table(kb, eb) == doctest::Approx(same.loglik(grid.at(kb, eb))));

  const SequenceStats none;
  Rng rng(12);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(grid.num_pam(), grid.num_eta());
  const int draws = 46200;
  for (int d = 0; d < draws; ++d) {
    const auto [k, e] = gibbs_k_eta(grid, none, rng);
    counts(k, e) += 1.0;
  }
  const double expected = draws / double(counts.size());
  CHECK((counts.array() - expected).abs().maxCoeff() < 5.0 * std::sqrt(expected));

  // Two cells: the draw frequency follows the likelihood ratio.
  const TemperedGrid pair({100, 250}, {1.0});
  const Eigen::MatrixXd lt = k_eta_log_table(pair, same);
  const double p0 = 1.0 / (1.0 + std::exp(lt(1, 0) - lt(0, 0)));
  int hits = 0;
  for (int d = 0; d < 100000; ++d) hits += gibbs_k_eta(pair, same, rng).first == 0;
  CHECK(std::abs(hits / 1e5 - p0) < 0.005);
}

TEST_CASE("chains are deterministic under a fixed seed") {
  const AlignmentProblem p = noisy_tiny(12, 10, 13);
  ChainConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 50;
  cfg.seed = 14;
  const FragmentLibrary lib = build_fragment_library(p.x, p.y, 3.0);
  const SampleSet a = run_chain(p, Hyperparams{}, cfg, lib);
  const SampleSet b = run_chain(p, Hyperparams{}, cfg, lib);
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a.records[r].path == b.records[r].path);
    CHECK(a.records[r].sigma2 == b.records[r].sigma2);
    CHECK(a.records[r].log_posterior == b.records[r].log_posterior);
  }
  const auto pair = run_chains(p, Hyperparams{}, cfg, lib, 2);
  CHECK(pair[0].records.back().sigma2 == a.records.back().sigma2);
  CHECK(pair[1].meta.seed == 15);
}

TEST_CASE("identical structures recover the diagonal") {
  const AlignmentProblem p = identical_problem(30, 15);
  ChainConfig cfg;
  cfg.iterations = 3000;
  cfg.burn_in = 500;
  cfg.seed = 16;
  const SampleSet s = run_chain(p, Hyperparams{}, cfg, build_fragment_library(p.x, p.y, 1.0));
  CHECK(map_alignment(s).path == AlignmentPath::all_match(30));
  CHECK(scalar_summary(s, "rmsd").median < 0.1);
  for (const auto& r : s.records) CHECK(r.length >= 3);
}

TEST_CASE("configuration checks") {
  ChainConfig cfg;
  cfg.burn_in = cfg.iterations;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  cfg = ChainConfig{};
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  cfg = ChainConfig{};
  cfg.global_move_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ContractError);
  const AlignmentProblem p = identical_problem(2, 17);
  Rng rng(1);
  CHECK_THROWS_AS(initial_state(p, Hyperparams{}, FragmentLibrary{}, rng, false), ContractError);
}
