#include "bayalign/structio.hpp"

#include <unistd.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "bayalign/errors.hpp"

namespace bayalign {
namespace {

constexpr std::array<std::pair<std::string_view, AminoAcid>, 20> kThreeLetter{{
    {"ALA", AminoAcid::A}, {"ARG", AminoAcid::R}, {"ASN", AminoAcid::N}, {"ASP", AminoAcid::D},
    {"CYS", AminoAcid::C}, {"GLN", AminoAcid::Q}, {"GLU", AminoAcid::E}, {"GLY", AminoAcid::G},
    {"HIS", AminoAcid::H}, {"ILE", AminoAcid::I}, {"LEU", AminoAcid::L}, {"LYS", AminoAcid::K},
    {"MET", AminoAcid::M}, {"PHE", AminoAcid::F}, {"PRO", AminoAcid::P}, {"SER", AminoAcid::S},
    {"THR", AminoAcid::T}, {"TRP", AminoAcid::W}, {"TYR", AminoAcid::Y}, {"VAL", AminoAcid::V},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// 1-based inclusive PDB columns; short lines yield an empty field.
std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  if (line.size() < first) return {};
  const std::size_t len = std::min(last, line.size()) - (first - 1);
  return line.substr(first - 1, len);
}

double parse_real(std::string_view field, std::size_t line_no, const char* what) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": malformed " + what + " field '" +
                     std::string(field) + "'");
  }
  return value;
}

int parse_int(std::string_view field, std::size_t line_no, const char* what) {
  field = trim(field);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": malformed " + what + " field '" +
                     std::string(field) + "'");
  }
  return value;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void require_unit_interval(const Eigen::MatrixXd& matrix) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      const double v = matrix(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ContractError("matrix entry (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                            ") = " + std::to_string(v) + " is outside [0, 1]");
      }
    }
}

}  // namespace

AminoAcid amino_acid_from_three(std::string_view code) {
  code = trim(code);
  for (const auto& [name, aa] : kThreeLetter)
    if (name == code) return aa;
  return AminoAcid::Unknown;
}

AminoAcid amino_acid_from_letter(char letter) {
  const char upper = (letter >= 'a' && letter <= 'z') ? static_cast<char>(letter - 'a' + 'A') : letter;
  const auto pos = kAminoAcidLetters.find(upper);
  return pos == std::string_view::npos ? AminoAcid::Unknown : static_cast<AminoAcid>(pos);
}

char amino_acid_letter(AminoAcid aa) {
  return is_standard(aa) ? kAminoAcidLetters[static_cast<std::size_t>(aa)] : 'X';
}

std::string ResidueId::str() const {
  std::string out;
  out += chain == ' ' ? '_' : chain;
  out += ':';
  out += std::to_string(seq);
  if (insertion != ' ') out += insertion;
  return out;
}

Coords Chain::coords() const {
  Coords out(static_cast<Eigen::Index>(residues.size()), 3);
  for (std::size_t i = 0; i < residues.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = residues[i].coord;
  return out;
}

std::vector<AminoAcid> Chain::sequence() const {
  std::vector<AminoAcid> out;
  out.reserve(residues.size());
  for (const auto& r : residues) out.push_back(r.aa);
  return out;
}

Chain parse_pdb_ca(std::string_view text, char chain_id, std::string label) {
  Chain chain;
  chain.label = label.empty() ? std::string("chain ") + chain_id : std::move(label);

  std::size_t line_no = 0;
  bool seen_model = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto record = columns(line, 1, 6);
    if (record.starts_with("MODEL")) {
      if (seen_model) break;
      seen_model = true;
      continue;
    }
    if (record.starts_with("ENDMDL")) break;
    if (record != "ATOM  " && trim(record) != "ATOM") continue;

    if (trim(columns(line, 13, 16)) != "CA") continue;
    const auto chain_field = columns(line, 22, 22);
    const char this_chain = chain_field.empty() ? ' ' : chain_field[0];
    if (this_chain != chain_id) continue;
    const auto alt_field = columns(line, 17, 17);
    const char alt = alt_field.empty() ? ' ' : alt_field[0];
    if (alt != ' ' && alt != 'A') continue;

    Residue res;
    res.aa = amino_acid_from_three(columns(line, 18, 20));
    res.id.chain = this_chain;
    res.id.seq = parse_int(columns(line, 23, 26), line_no, "residue sequence number");
    const auto icode = columns(line, 27, 27);
    res.id.insertion = icode.empty() ? ' ' : icode[0];
    res.coord = {parse_real(columns(line, 31, 38), line_no, "x coordinate"),
                 parse_real(columns(line, 39, 46), line_no, "y coordinate"),
                 parse_real(columns(line, 47, 54), line_no, "z coordinate")};
    chain.residues.push_back(res);
  }
  if (chain.residues.empty()) {
    throw EmptyChainError("no C-alpha atoms found for chain '" + std::string(1, chain_id) + "' in " + chain.label);
  }
  return chain;
}

Chain read_pdb_ca(const std::filesystem::path& file, char chain_id) {
  return parse_pdb_ca(read_file(file), chain_id, file.filename().string() + ":" + chain_id);
}

std::vector<AminoAcid> parse_fasta(std::string_view text) {
  std::vector<AminoAcid> out;
  int headers = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == ';') continue;
    if (line.front() == '>') {
      if (++headers > 1) throw ParseError("line " + std::to_string(line_no) + ": FASTA input must hold one record");
      continue;
    }
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '*') continue;
      if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) {
        throw ParseError("line " + std::to_string(line_no) + ": unexpected character '" + std::string(1, c) + "'");
      }
      out.push_back(amino_acid_from_letter(c));
    }
  }
  if (out.empty()) throw ParseError("FASTA input holds no residues");
  return out;
}

std::vector<AminoAcid> read_fasta(const std::filesystem::path& file) { return parse_fasta(read_file(file)); }

void assign_sequence(Chain& chain, const std::vector<AminoAcid>& sequence) {
  if (sequence.size() != chain.size()) {
    throw ContractError("sequence length " + std::to_string(sequence.size()) + " does not match the " +
                        std::to_string(chain.size()) + " C-alpha residues of " + chain.label);
  }
  for (std::size_t i = 0; i < sequence.size(); ++i) chain.residues[i].aa = sequence[i];
}

std::string write_alignment_tsv(const AlignmentPath& path, const Chain& x, const Chain& y,
                                const Registration& reg) {
  if (path.size() == 0 || static_cast<std::size_t>(path.n()) != x.size() ||
      static_cast<std::size_t>(path.m()) != y.size()) {
    throw ContractError("alignment path does not fit chains of length " + std::to_string(x.size()) + " and " +
                        std::to_string(y.size()));
  }
  std::string out;
  std::size_t i = 0, j = 0;
  for (Step s : path.steps()) {
    switch (s) {
      case Step::Match: {
        const Eigen::RowVector3d moved = x.residues[i].coord * reg.rotation + reg.translation;
        const double d = (y.residues[j].coord - moved).norm();
        out += "MATCH\t" + x.residues[i].id.str() + "\t" + y.residues[j].id.str() + "\t" + format_fixed(d, 3) + "\n";
        ++i;
        ++j;
        break;
      }
      case Step::SkipX:
        out += "SKIP_X\t" + x.residues[i].id.str() + "\t-\t\n";
        ++i;
        break;
      case Step::SkipY:
        out += "SKIP_Y\t-\t" + y.residues[j].id.str() + "\t\n";
        ++j;
        break;
    }
  }
  return out;
}

std::string write_marginal_csv(const Eigen::MatrixXd& matrix) {
  require_unit_interval(matrix);
  std::string out = "i";
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) out += "," + std::to_string(j + 1);
  out += "\n";
  char buf[32];
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out += std::to_string(i + 1);
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.10g", matrix(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

Eigen::MatrixXd read_marginal_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (line_no == 1) {
      width = fields.size() - 1;
      continue;
    }
    if (fields.size() != width + 1) throw ParseError("line " + std::to_string(line_no) + ": wrong field count");
    std::vector<double> row;
    for (std::size_t f = 1; f < fields.size(); ++f) row.push_back(parse_real(fields[f], line_no, "matrix"));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

std::string write_heatmap_svg(const Eigen::MatrixXd& matrix) {
  require_unit_interval(matrix);
  const int rows = static_cast<int>(matrix.rows());
  const int cols = static_cast<int>(matrix.cols());
  const int cell = rows > 200 || cols > 200 ? 3 : (rows > 80 || cols > 80 ? 5 : 12);
  const int margin = 44;
  const int width = margin + cols * cell + 8;
  const int height = margin + rows * cell + 8;
  const int tick = std::max(1, ((std::max(rows, cols) / 10 + 4) / 5) * 5);

  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << width << R"(" height=")" << height
      << R"(" font-family="sans-serif" font-size="9">)" << "\n";
  svg << R"(<rect x="0" y="0" width=")" << width << R"(" height=")" << height << R"(" fill="#ffffff"/>)" << "\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int level = static_cast<int>(std::lround(255.0 * (1.0 - matrix(i, j))));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", level, level, level);
      svg << R"(<rect x=")" << margin + j * cell << R"(" y=")" << margin + i * cell << R"(" width=")" << cell
          << R"(" height=")" << cell << R"(" fill=")" << color << R"("/>)" << "\n";
    }
  }
  svg << R"(<rect x=")" << margin << R"(" y=")" << margin << R"(" width=")" << cols * cell << R"(" height=")"
      << rows * cell << R"(" fill="none" stroke="#000000" stroke-width="0.5"/>)" << "\n";
  for (int j = 0; j < cols; ++j) {
    if (j != 0 && (j + 1) % tick != 0) continue;
    svg << R"(<text x=")" << margin + j * cell + cell / 2 << R"(" y=")" << margin - 6
        << R"(" text-anchor="middle">)" << j + 1 << "</text>\n";
  }
  for (int i = 0; i < rows; ++i) {
    if (i != 0 && (i + 1) % tick != 0) continue;
    svg << R"(<text x=")" << margin - 4 << R"(" y=")" << margin + i * cell + cell / 2 + 3
        << R"(" text-anchor="end">)" << i + 1 << "</text>\n";
  }
  svg << R"(<text x=")" << margin + cols * cell / 2 << R"(" y="12" text-anchor="middle">Y residue</text>)" << "\n";
  svg << R"(<text x="10" y=")" << margin + rows * cell / 2 << R"(" text-anchor="middle" transform="rotate(-90 10 )"
      << margin + rows * cell / 2 << R"svg()">X residue</text>)svg" << "\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_file_atomic(const std::filesystem::path& file, std::string_view contents) {
  auto tmp = file;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place as " + file.string());
  }
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace bayalign
