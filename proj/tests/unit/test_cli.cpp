#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "bayalign/structio.hpp"
#include "commands.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace bayalign;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("bayalign_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string ca_pdb(const Coords& c, char chain) {
  static const char* names[] = {"ALA", "GLY", "LEU", "SER", "VAL", "LYS", "GLU", "ASP"};
  std::string out;
  char line[96];
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    std::snprintf(line, sizeof line, "ATOM  %5d  CA  %3s %c%4d    %8.3f%8.3f%8.3f  1.00  0.00           C\n",
                  static_cast<int>(i + 1), names[i % 8], chain, static_cast<int>(i + 1), c(i, 0), c(i, 1), c(i, 2));
    out += line;
  }
  return out + "END\n";
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("missing input is a usage error naming the file") {
  TempDir tmp;
  const std::string missing = (tmp.path / "nope.pdb").string();
  const Result r = run({"align", "--pdb-x", missing, "--pdb-y", missing, "--out", (tmp.path / "o").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find(missing) != std::string::npos);
}

TEST_CASE("self alignment") {
  TempDir tmp;
  std::mt19937_64 rng(3);
  const Coords x = oracle::random_walk(25, rng);
  write_file_atomic(tmp.path / "x.pdb", ca_pdb(x, 'A'));
  const auto args = [&](const std::string& out) {
    return std::vector<std::string>{"align", "--pdb-x", (tmp.path / "x.pdb").string(), "--pdb-y",
                                    (tmp.path / "x.pdb").string(), "--iters", "5000", "--burnin", "1000",
                                    "--seed", "4", "--out", (tmp.path / out).string()};
  };
  const Result r = run(args("a"));
  REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
  for (const char* f : {"traces.csv", "marginal.csv", "heatmap.svg", "map_alignment.tsv", "summary.json"})
    CHECK(fs::exists(tmp.path / "a" / f));
  CHECK(!fs::exists(tmp.path / "a" / "pam_posterior.csv"));

  const auto summary = nlohmann::json::parse(read_file(tmp.path / "a" / "summary.json"));
  CHECK(summary["map"]["length"] == 25);
  CHECK(summary["rmsd"]["posterior_median"].get<double>() < 0.1);
  const Eigen::MatrixXd marginal = read_marginal_csv(read_file(tmp.path / "a" / "marginal.csv"));
  CHECK(marginal.diagonal().minCoeff() > 0.9);

  const Result again = run(args("b"));
  REQUIRE(again.code == cli::kExitOk);
  CHECK(read_file(tmp.path / "a" / "traces.csv") == read_file(tmp.path / "b" / "traces.csv"));
}

TEST_CASE("sequence-structure mode writes grid posteriors") {
  TempDir tmp;
  std::mt19937_64 rng(5);
  const Coords x = oracle::random_walk(15, rng);
  std::normal_distribution<double> normal(0.0, 0.5);
  Coords y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += normal(rng);
  write_file_atomic(tmp.path / "x.pdb", ca_pdb(x, 'A'));
  write_file_atomic(tmp.path / "y.pdb", ca_pdb(y, 'B'));
  const Result r = run({"align", "--pdb-x", (tmp.path / "x.pdb").string(), "--pdb-y", (tmp.path / "y.pdb").string(),
                        "--chain-y", "B", "--mode", "seqstruct", "--iters", "600", "--burnin", "100",
                        "--pam-grid", "100:200:50", "--eta-grid", "0:1:0.5", "--out", (tmp.path / "o").string()});
  REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
  for (const char* f : {"pam_posterior.csv", "eta_posterior.csv", "k_eta_joint.csv"}) CHECK(fs::exists(tmp.path / "o" / f));
  const auto summary = nlohmann::json::parse(read_file(tmp.path / "o" / "summary.json"));
  double total = 0.0;
  for (double p : summary["pam_posterior"]["probabilities"]) total += p;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("entropy subcommand") {
  const Result r = run({"entropy", "--pam-grid", "100:200:50", "--eta-grid", "0:1:0.5"});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "pam,0,0.5,1");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  CHECK(r.out.find("\n100,8.64385619") != std::string::npos);  // log2(400) at eta = 0

  CHECK(run({"entropy", "--pam-grid", "100:50:10"}).code == cli::kExitUsage);
  CHECK(run({"entropy", "--eta-grid", "0:2:0.5"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
}

TEST_CASE("oracle subcommand exit codes") {
  CHECK(run({"oracle", "--n", "3", "--m", "3"}).code == cli::kExitOk);
  CHECK(run({"oracle", "--n", "3", "--m", "3", "--inject-fault", "gap-sign"}).code == cli::kExitFailed);
  CHECK(run({"oracle", "--n", "9", "--m", "9"}).code == cli::kExitUsage);
}
