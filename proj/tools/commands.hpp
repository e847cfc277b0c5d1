#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bayalign/posterior.hpp"

namespace bayalign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct AlignConfig {
  std::filesystem::path pdb_x;
  std::filesystem::path pdb_y;
  char chain_x = 'A';
  char chain_y = 'A';
  std::optional<std::filesystem::path> fasta_x;
  std::optional<std::filesystem::path> fasta_y;
  std::string mode = "structure";  // structure | seqstruct
  double lambda = 7.6;
  Hyperparams hyper;
  std::optional<long> iterations;  // 100000 (structure) / 130000 (seqstruct)
  std::optional<long> burn_in;     // 20000 / 30000
  long thin = 1;
  int chains = 2;
  std::uint64_t seed = 1;
  double delta = 1.0;
  double global_move_prob = 0.1;
  double rw_step = 0.1;
  std::string pam_grid = "100:300:10";
  std::string eta_grid = "0:1:0.1";
  std::optional<int> fixed_pam;
  std::optional<double> fixed_eta;
  std::string error_model = "gaussian";  // gaussian | expcauchy:c:d0
  bool no_simultaneous_gaps = false;
  bool refine_map = true;
  std::filesystem::path out = "bayalign_out";
};

struct EntropyConfig {
  std::string pam_grid = "100:300:10";
  std::string eta_grid = "0:1:0.1";
  std::optional<std::filesystem::path> out;  // stdout when unset
};

struct OracleConfig {
  std::optional<int> n;
  std::optional<int> m;
  std::uint64_t seed = 7;
  std::string inject_fault;  // "" or "gap-sign"
};

ErrorModel parse_error_model(const std::string& text);

int cmd_align(const AlignConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_entropy(const EntropyConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bayalign::cli
