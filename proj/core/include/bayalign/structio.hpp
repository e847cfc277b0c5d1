#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bayalign/alignment.hpp"
#include "bayalign/geometry.hpp"

namespace bayalign {

/// The 20 standard amino acids in Dayhoff/PHYLIP order (A R N D C Q E G H I L K M F P S T W Y V).
enum class AminoAcid : std::uint8_t {
  A, R, N, D, C, Q, E, G, H, I, L, K, M, F, P, S, T, W, Y, V,
  Unknown
};

inline constexpr int kNumAminoAcids = 20;
inline constexpr std::string_view kAminoAcidLetters = "ARNDCQEGHILKMFPSTWYV";

AminoAcid amino_acid_from_three(std::string_view code);
AminoAcid amino_acid_from_letter(char letter);
char amino_acid_letter(AminoAcid aa);

inline int index_of(AminoAcid aa) { return static_cast<int>(aa); }
inline bool is_standard(AminoAcid aa) { return aa != AminoAcid::Unknown; }

struct ResidueId {
  int seq = 0;
  char insertion = ' ';
  char chain = ' ';

  /// "A:12" or "A:12B" with an insertion code.
  std::string str() const;
  bool operator==(const ResidueId&) const = default;
};

struct Residue {
  AminoAcid aa = AminoAcid::Unknown;
  Eigen::RowVector3d coord = Eigen::RowVector3d::Zero();
  ResidueId id;
};

struct Chain {
  std::vector<Residue> residues;
  std::string label;

  std::size_t size() const { return residues.size(); }
  Coords coords() const;
  std::vector<AminoAcid> sequence() const;
};

/// Reads the C-alpha trace of one chain from a PDB document.
///
/// Only the first MODEL is read, HETATM records are ignored and alternate
/// locations other than blank or 'A' are dropped. Throws ParseError (with the
/// offending line number) on malformed numeric columns and EmptyChainError if
/// the chain has no C-alpha atoms.
Chain parse_pdb_ca(std::string_view text, char chain_id, std::string label = {});
Chain read_pdb_ca(const std::filesystem::path& file, char chain_id);

/// Single-record FASTA; returns the residues in order. Unknown letters map to Unknown.
std::vector<AminoAcid> parse_fasta(std::string_view text);
std::vector<AminoAcid> read_fasta(const std::filesystem::path& file);

/// Replaces the chain's residue codes with a FASTA sequence of the same length.
void assign_sequence(Chain& chain, const std::vector<AminoAcid>& sequence);

/// One row per step: type, x id or '-', y id or '-', distance under `reg` (matches only).
std::string write_alignment_tsv(const AlignmentPath& path, const Chain& x, const Chain& y,
                                const Registration& reg);

std::string write_marginal_csv(const Eigen::MatrixXd& matrix);
/// Inverse of write_marginal_csv; used by tests and downstream tooling.
Eigen::MatrixXd read_marginal_csv(std::string_view text);

/// Grayscale heatmap, 0 -> white and 1 -> black, axes labelled by residue index.
std::string write_heatmap_svg(const Eigen::MatrixXd& matrix);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& file, std::string_view contents);
std::string read_file(const std::filesystem::path& file);

}  // namespace bayalign
