#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "bayalign/errors.hpp"
#include "bayalign/sampler.hpp"
#include "bayalign/structio.hpp"
#include "bayalign/submodel.hpp"
#include "bayalign/summaries.hpp"

namespace bayalign::cli {
namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string vector_csv(const std::string& label, const std::vector<std::string>& keys, const Eigen::VectorXd& p) {
  std::string out = label + ",probability\n";
  for (Eigen::Index i = 0; i < p.size(); ++i) out += keys[static_cast<std::size_t>(i)] + "," + fmt(p(i)) + "\n";
  return out;
}

std::string table_csv(const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                      const Eigen::MatrixXd& t) {
  std::string out = "pam";
  for (const auto& c : cols) out += "," + c;
  out += "\n";
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    out += rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < t.cols(); ++c) out += "," + fmt(t(r, c));
    out += "\n";
  }
  return out;
}

template <typename T>
std::vector<std::string> labels(const std::vector<T>& values) {
  std::vector<std::string> out;
  for (const T& v : values) out.push_back(fmt(static_cast<double>(v)));
  return out;
}

json summary_json(const ScalarSummary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"hpd90", {s.hpd_lo, s.hpd_hi}}};
}

json grid_posterior_json(const std::vector<double>& values, const Eigen::VectorXd& p) {
  double mean = 0.0;
  Eigen::Index mode = 0;
  p.maxCoeff(&mode);
  for (Eigen::Index i = 0; i < p.size(); ++i) mean += p(i) * values[static_cast<std::size_t>(i)];
  double cum = 0.0;
  double median = values.back();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    cum += p(i);
    if (cum >= 0.5) {
      median = values[static_cast<std::size_t>(i)];
      break;
    }
  }
  return {{"values", values},
          {"probabilities", std::vector<double>(p.data(), p.data() + p.size())},
          {"mean", mean},
          {"median", median},
          {"mode", values[static_cast<std::size_t>(mode)]}};
}

struct LoadedInputs {
  Chain x;
  Chain y;
};

LoadedInputs load_inputs(const AlignConfig& cfg) {
  for (const auto& p : {cfg.pdb_x, cfg.pdb_y}) {
    if (!std::filesystem::is_regular_file(p)) throw ContractError("cannot read input file " + p.string());
  }
  LoadedInputs in{read_pdb_ca(cfg.pdb_x, cfg.chain_x), read_pdb_ca(cfg.pdb_y, cfg.chain_y)};
  if (cfg.fasta_x) {
    if (!std::filesystem::is_regular_file(*cfg.fasta_x)) throw ContractError("cannot read input file " + cfg.fasta_x->string());
    assign_sequence(in.x, read_fasta(*cfg.fasta_x));
  }
  if (cfg.fasta_y) {
    if (!std::filesystem::is_regular_file(*cfg.fasta_y)) throw ContractError("cannot read input file " + cfg.fasta_y->string());
    assign_sequence(in.y, read_fasta(*cfg.fasta_y));
  }
  return in;
}

json config_json(const AlignConfig& cfg, const ChainConfig& cc, const std::vector<int>& pams,
                 const std::vector<double>& etas) {
  json j;
  j["pdb_x"] = cfg.pdb_x.string();
  j["chain_x"] = std::string(1, cfg.chain_x);
  j["pdb_y"] = cfg.pdb_y.string();
  j["chain_y"] = std::string(1, cfg.chain_y);
  j["fasta_x"] = cfg.fasta_x ? json(cfg.fasta_x->string()) : json(nullptr);
  j["fasta_y"] = cfg.fasta_y ? json(cfg.fasta_y->string()) : json(nullptr);
  j["mode"] = cfg.mode;
  j["lambda"] = cfg.lambda;
  j["hyperparameters"] = {{"a_sigma", cfg.hyper.a_sigma}, {"b_sigma", cfg.hyper.b_sigma},
                          {"a_open", cfg.hyper.a_open},   {"b_open", cfg.hyper.b_open},
                          {"a_ext", cfg.hyper.a_ext},     {"b_ext", cfg.hyper.b_ext}};
  j["iterations"] = cc.iterations;
  j["burn_in"] = cc.burn_in;
  j["thin"] = cc.thin;
  j["chains"] = cfg.chains;
  j["seed"] = cc.seed;
  j["delta"] = cfg.delta;
  j["global_move_prob"] = cc.global_move_prob;
  j["rw_step"] = cfg.rw_step;
  j["adapt_during_burn_in"] = cc.adapt_during_burn_in;
  j["error_model"] = cfg.error_model;
  j["no_simultaneous_gaps"] = cfg.no_simultaneous_gaps;
  j["refine_map"] = cfg.refine_map;
  if (cfg.mode == "seqstruct") {
    j["pam_grid"] = pams;
    j["eta_grid"] = etas;
  }
  j["out"] = cfg.out.string();
  return j;
}

int align_impl(const AlignConfig& cfg, std::ostream& out) {
  require(cfg.mode == "structure" || cfg.mode == "seqstruct", "mode must be 'structure' or 'seqstruct'");
  require(cfg.chains >= 1, "need at least one chain");
  const bool seq = cfg.mode == "seqstruct";
  const LoadedInputs in = load_inputs(cfg);

  std::vector<int> pams = cfg.fixed_pam ? std::vector<int>{*cfg.fixed_pam} : parse_int_grid(cfg.pam_grid).values();
  std::vector<double> etas = cfg.fixed_eta ? std::vector<double>{*cfg.fixed_eta} : parse_real_grid(cfg.eta_grid).values();
  std::optional<TemperedGrid> grid;
  if (seq) grid.emplace(pams, etas);

  AlignmentProblem problem;
  problem.x = in.x.coords();
  problem.y = in.y.coords();
  if (seq) {
    problem.ax = in.x.sequence();
    problem.ay = in.y.sequence();
    problem.grid = &*grid;
  }
  problem.lambda = cfg.lambda;
  problem.error_model = parse_error_model(cfg.error_model);
  problem.allow_simultaneous = !cfg.no_simultaneous_gaps;
  problem.validate();
  require(problem.n() >= 3 && problem.m() >= 3, "both chains need at least three C-alpha atoms");

  ChainConfig cc;
  cc.iterations = cfg.iterations.value_or(seq ? 130000 : 100000);
  cc.burn_in = cfg.burn_in.value_or(seq ? 30000 : 20000);
  cc.thin = cfg.thin;
  cc.seed = cfg.seed;
  cc.global_move_prob = cfg.global_move_prob;
  cc.rw_step_open = cfg.rw_step;
  cc.rw_step_ext = cfg.rw_step;
  cc.validate();

  const FragmentLibrary lib = build_fragment_library(problem.x, problem.y, cfg.delta);
  std::vector<ChainStats> stats;
  const std::vector<SampleSet> chains = run_chains(problem, cfg.hyper, cc, lib, cfg.chains, &stats);

  SampleSet pooled;
  pooled.meta = chains.front().meta;
  for (const auto& c : chains) pooled.records.insert(pooled.records.end(), c.records.begin(), c.records.end());

  // MAP over visited states, optionally refined by a max-product pass at its registration.
  const MapEstimate map = map_alignment(pooled);
  const SampleRecord& best = pooled.records[map.record_index];
  ModelState map_state =
      make_state(problem, best.path, best.sigma2, {best.open_pen, best.ext_pen}, best.k_index, best.eta_index);
  double map_logpost = map.log_posterior;
  bool refined = false;
  if (cfg.refine_map) {
    try {
      ModelState cand = map_state;
      cand.path = map_traceback(conditional_weights(problem, map_state, map_state.reg));
      if (cand.path.match_count() >= 3) {
        cand.refresh_registration(problem);
        const double lp = log_posterior(problem, cand, cfg.hyper);
        if (lp > map_logpost) {
          map_state = std::move(cand);
          map_logpost = lp;
          refined = true;
        }
      }
    } catch (const DegenerateError&) {
    }
  }

  const Eigen::MatrixXd marginal = marginal_matrix(chains);

  json summary;
  summary["config"] = config_json(cfg, cc, pams, etas);
  summary["inputs"] = {{"n", problem.n()}, {"m", problem.m()}};
  summary["fragment_library"] = {{"entries", lib.entries.size()}, {"too_short", lib.too_short}};
  summary["records_per_chain"] = chains.front().size();
  json acc = json::array();
  for (const auto& s : stats) {
    acc.push_back({{"local", s.local_proposed ? double(s.local_accepted) / s.local_proposed : 0.0},
                   {"global", s.global_proposed ? double(s.global_accepted) / s.global_proposed : 0.0},
                   {"gap", s.gap_proposed ? double(s.gap_accepted) / s.gap_proposed : 0.0},
                   {"final_rw_step_open", s.final_step_open},
                   {"final_rw_step_ext", s.final_step_ext}});
  }
  summary["acceptance"] = acc;

  json scalars;
  for (const auto& name : scalar_names()) {
    if (!seq && (name == "k" || name == "eta")) continue;
    scalars[name] = summary_json(scalar_summary(pooled, name));
  }
  summary["scalars"] = scalars;

  const double map_rmsd = std::sqrt(map_state.dp2 / map_state.path.match_count());
  const ScalarSummary rmsd = scalar_summary(pooled, "rmsd");
  summary["rmsd"] = {{"at_map", map_rmsd}, {"posterior_mean", rmsd.mean}, {"posterior_median", rmsd.median}};

  json psrf_json;
  for (const auto& name : scalar_names()) {
    if (!seq && (name == "k" || name == "eta")) continue;
    if (chains.size() < 2) {
      psrf_json[name] = nullptr;
      continue;
    }
    try {
      psrf_json[name] = psrf(chains, name);
    } catch (const ContractError&) {
      psrf_json[name] = nullptr;
    }
  }
  summary["psrf"] = psrf_json;

  ModelState mean_state = map_state;
  mean_state.sigma2 = scalar_summary(pooled, "sigma2").mean;
  mean_state.gp = {scalar_summary(pooled, "open").mean, scalar_summary(pooled, "ext").mean};
  const EffectiveGapPenalties eff = effective_gap_penalties(mean_state, cfg.lambda);
  summary["effective_gap_penalties"] = {{"g_star", eff.g_star},
                                        {"h_star", eff.h_star},
                                        {"g_star_reference_form", eff.g_star_printed},
                                        {"h_star_reference_form", eff.h_star_printed}};

  summary["map"] = {{"file", "map_alignment.tsv"},
                    {"log_posterior", map_logpost},
                    {"length", map_state.path.match_count()},
                    {"rmsd", map_rmsd},
                    {"refined", refined},
                    {"path", map_state.path.code()}};

  if (seq) {
    const Eigen::MatrixXd joint = k_eta_joint(chains);
    const Eigen::VectorXd pk = joint.rowwise().sum();
    const Eigen::VectorXd pe = joint.colwise().sum().transpose();
    std::vector<double> pam_d(pams.begin(), pams.end());
    summary["pam_posterior"] = grid_posterior_json(pam_d, pk);
    summary["eta_posterior"] = grid_posterior_json(etas, pe);
  }

  std::filesystem::create_directories(cfg.out);
  write_file_atomic(cfg.out / "traces.csv", traces_csv(chains));
  write_file_atomic(cfg.out / "marginal.csv", write_marginal_csv(marginal));
  write_file_atomic(cfg.out / "heatmap.svg", write_heatmap_svg(marginal));
  write_file_atomic(cfg.out / "map_alignment.tsv", write_alignment_tsv(map_state.path, in.x, in.y, map_state.reg));
  if (seq) {
    const Eigen::MatrixXd joint = k_eta_joint(chains);
    write_file_atomic(cfg.out / "pam_posterior.csv", vector_csv("pam", labels(pams), joint.rowwise().sum()));
    write_file_atomic(cfg.out / "eta_posterior.csv", vector_csv("eta", labels(etas), joint.colwise().sum().transpose()));
    write_file_atomic(cfg.out / "k_eta_joint.csv", table_csv(labels(pams), labels(etas), joint));
  }
  write_file_atomic(cfg.out / "summary.json", summary.dump(2) + "\n");

  out << "MAP length " << map_state.path.match_count() << ", RMSD " << fmt(map_rmsd) << " A, wrote "
      << cfg.out.string() << "\n";
  return kExitOk;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EmptyChainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RefusalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}

}  // namespace

ErrorModel parse_error_model(const std::string& text) {
  if (text == "gaussian") return ErrorModel::gaussian();
  if (text.starts_with("expcauchy:")) {
    const auto rest = text.substr(10);
    const auto colon = rest.find(':');
    require(colon != std::string::npos, "error model must be 'gaussian' or 'expcauchy:c:d0'");
    try {
      std::size_t p1 = 0, p2 = 0;
      const double c = std::stod(rest.substr(0, colon), &p1);
      const double d0 = std::stod(rest.substr(colon + 1), &p2);
      require(p1 == colon && p2 == rest.size() - colon - 1, "error model must be 'gaussian' or 'expcauchy:c:d0'");
      require(c > 0.0 && d0 > 0.0, "exp-Cauchy constants must be positive");
      return ErrorModel::exp_cauchy(c, d0);
    } catch (const std::logic_error&) {
      throw ContractError("error model must be 'gaussian' or 'expcauchy:c:d0'");
    }
  }
  throw ContractError("error model must be 'gaussian' or 'expcauchy:c:d0'");
}

int cmd_align(const AlignConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return align_impl(cfg, out); });
}

int cmd_entropy(const EntropyConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<int> pams = parse_int_grid(cfg.pam_grid).values();
    const std::vector<double> etas = parse_real_grid(cfg.eta_grid).values();
    for (int k : pams) require(k >= 1 && k <= 500, "PAM distances must lie in [1, 500]");
    for (double e : etas) require(e >= 0.0 && e <= 1.0, "discount factors must lie in [0, 1]");
    const TemperedGrid grid(pams, etas);
    Eigen::MatrixXd table(grid.num_pam(), grid.num_eta());
    for (int k = 0; k < grid.num_pam(); ++k)
      for (int e = 0; e < grid.num_eta(); ++e) table(k, e) = joint_entropy(grid.at(k, e)) / std::log(2.0);
    const std::string csv = table_csv(labels(pams), labels(etas), table);
    if (cfg.out) {
      write_file_atomic(*cfg.out, csv);
    } else {
      out << csv;
    }
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian pairwise protein structure alignment"};
  app.require_subcommand(1);

  AlignConfig align;
  long iters = -1, burnin = -1;
  int fixed_pam = -1;
  double fixed_eta = -1.0;
  std::string fasta_x, fasta_y, chain_x = "A", chain_y = "A", out_dir = "bayalign_out";
  std::string pdb_x, pdb_y;
  auto* a = app.add_subcommand("align", "Sample the alignment posterior of two C-alpha traces");
  a->add_option("--pdb-x", pdb_x, "First structure (PDB)")->required();
  a->add_option("--chain-x", chain_x, "Chain of the first structure");
  a->add_option("--pdb-y", pdb_y, "Second structure (PDB)")->required();
  a->add_option("--chain-y", chain_y, "Chain of the second structure");
  a->add_option("--fasta-x", fasta_x, "Sequence overriding the residues of the first structure");
  a->add_option("--fasta-y", fasta_y, "Sequence overriding the residues of the second structure");
  a->add_option("--mode", align.mode, "structure or seqstruct")->check(CLI::IsMember({"structure", "seqstruct"}));
  a->add_option("--lambda", align.lambda, "Match reward lambda");
  a->add_option("--iters", iters, "Sweeps including burn-in (100000, or 130000 in seqstruct mode)");
  a->add_option("--burnin", burnin, "Burn-in sweeps (20000, or 30000 in seqstruct mode)");
  a->add_option("--thin", align.thin, "Keep every thin-th sweep");
  a->add_option("--chains", align.chains, "Independent chains run concurrently");
  a->add_option("--seed", align.seed, "Seed of the first chain");
  a->add_option("--delta", align.delta, "Fragment RMSD threshold in Angstrom");
  a->add_option("--global-move-prob", align.global_move_prob, "Probability of a library move per sweep");
  a->add_option("--rw-step", align.rw_step, "Initial log-scale random-walk step of the gap penalties");
  a->add_option("--pam-grid", align.pam_grid, "PAM distances lo:hi:step");
  a->add_option("--eta-grid", align.eta_grid, "Discount factors lo:hi:step");
  a->add_option("--fixed-pam", fixed_pam, "Use a single PAM distance");
  a->add_option("--fixed-eta", fixed_eta, "Use a single discount factor");
  a->add_option("--error-model", align.error_model, "gaussian or expcauchy:c:d0");
  a->add_flag("--no-simultaneous-gaps", align.no_simultaneous_gaps, "Forbid an x-gap followed by a y-gap");
  a->add_flag("!--no-refine-map", align.refine_map, "Report the best visited state without refinement");
  a->add_option("--out", out_dir, "Output directory");

  EntropyConfig entropy;
  std::string entropy_out;
  auto* e = app.add_subcommand("entropy", "Entropy (bits) of tempered PAM joint distributions");
  e->add_option("--pam-grid", entropy.pam_grid, "PAM distances lo:hi:step");
  e->add_option("--eta-grid", entropy.eta_grid, "Discount factors lo:hi:step");
  e->add_option("--out", entropy_out, "CSV file (stdout when omitted)");

  OracleConfig oracle;
  int on = -1, om = -1;
  auto* o = app.add_subcommand("oracle", "Check the DP engine and sampler against brute-force enumeration");
  o->add_option("--n", on, "Length of X for the size-specific checks");
  o->add_option("--m", om, "Length of Y for the size-specific checks");
  o->add_option("--seed", oracle.seed, "Random seed");
  o->add_option("--inject-fault", oracle.inject_fault, "Test hook: gap-sign")->check(CLI::IsMember({"", "gap-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    std::ostringstream msg;
    app.exit(ex, msg, msg);
    err << msg.str();
    return kExitUsage;
  }

  if (*a) {
    align.pdb_x = pdb_x;
    align.pdb_y = pdb_y;
    if (chain_x.size() != 1 || chain_y.size() != 1) {
      err << "error: chain identifiers must be single characters\n";
      return kExitUsage;
    }
    align.chain_x = chain_x[0];
    align.chain_y = chain_y[0];
    if (!fasta_x.empty()) align.fasta_x = fasta_x;
    if (!fasta_y.empty()) align.fasta_y = fasta_y;
    if (iters >= 0) align.iterations = iters;
    if (burnin >= 0) align.burn_in = burnin;
    if (fixed_pam >= 0) align.fixed_pam = fixed_pam;
    if (fixed_eta >= 0.0) align.fixed_eta = fixed_eta;
    align.out = out_dir;
    return cmd_align(align, out, err);
  }
  if (*e) {
    if (!entropy_out.empty()) entropy.out = entropy_out;
    return cmd_entropy(entropy, out, err);
  }
  if (on >= 0) oracle.n = on;
  if (om >= 0) oracle.m = om;
  return cmd_oracle(oracle, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("bayalign");
  for (const auto& s : args) argv.push_back(s.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bayalign::cli
