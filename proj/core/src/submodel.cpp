#include "bayalign/submodel.hpp"

#include <Eigen/LU>
#include <charconv>
#include <cmath>
#include <sstream>

#include "bayalign/errors.hpp"
#include "bayalign/logspace.hpp"

namespace bayalign {
namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double to_real(const std::string& tok, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v) || v < 0.0) {
    throw ParseError("substitution data line " + std::to_string(line_no) + ": bad value '" + tok + "'");
  }
  return v;
}

Vector20 stationary_distribution(const Matrix20& p) {
  // Solve pi (P - I) = 0 with sum(pi) = 1.
  Matrix20 a = (p - Matrix20::Identity()).transpose();
  a.row(19).setOnes();
  Vector20 rhs = Vector20::Zero();
  rhs(19) = 1.0;
  Vector20 pi = a.fullPivLu().solve(rhs);
  return pi / pi.sum();
}

void renormalize_rows(Matrix20& m) {
  for (int r = 0; r < 20; ++r) m.row(r) /= m.row(r).sum();
}

double round_grid(double v) { return std::round(v * 1e12) / 1e12; }

template <typename T>
T parse_number(std::string_view s, std::string_view full) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ContractError("bad grid specification '" + std::string(full) + "', expected lo:hi:step");
  }
  return v;
}

template <typename T>
GridSpec<T> parse_grid(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw ContractError("bad grid specification '" + std::string(text) + "', expected lo:hi:step");
  }
  GridSpec<T> g{parse_number<T>(text.substr(0, c1), text), parse_number<T>(text.substr(c1 + 1, c2 - c1 - 1), text),
                parse_number<T>(text.substr(c2 + 1), text)};
  if (!(g.step > 0) || g.hi < g.lo) throw ContractError("bad grid specification '" + std::string(text) + "'");
  return g;
}

}  // namespace

SubstitutionData parse_substitution_data(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty() || toks.front().starts_with('#')) continue;
    lines.emplace_back(line_no, std::move(toks));
  }
  if (lines.size() < 22) throw ParseError("substitution data: expected a header, 20 matrix rows and frequencies");

  // Header: file column c holds canonical amino acid order[c].
  std::array<int, 20> order{};
  std::array<bool, 20> seen{};
  const auto& header = lines[0].second;
  if (header.size() != 20) throw ParseError("substitution data: header must list 20 amino-acid letters");
  for (std::size_t c = 0; c < 20; ++c) {
    const AminoAcid aa = header[c].size() == 1 ? amino_acid_from_letter(header[c][0]) : AminoAcid::Unknown;
    if (!is_standard(aa) || seen[static_cast<std::size_t>(aa)]) {
      throw ParseError("substitution data: bad or repeated header letter '" + header[c] + "'");
    }
    seen[static_cast<std::size_t>(aa)] = true;
    order[c] = index_of(aa);
  }

  const bool lower = lines[1].second.size() == 1;
  Matrix20 file_matrix = Matrix20::Zero();
  for (int r = 0; r < 20; ++r) {
    const auto& [ln, toks] = lines[static_cast<std::size_t>(r + 1)];
    const std::size_t expected = lower ? static_cast<std::size_t>(r + 1) : 20;
    if (toks.size() != expected) {
      throw ParseError("substitution data line " + std::to_string(ln) + ": expected " + std::to_string(expected) +
                       " values, found " + std::to_string(toks.size()));
    }
    for (std::size_t c = 0; c < toks.size(); ++c) {
      file_matrix(r, static_cast<int>(c)) = to_real(toks[c], ln);
      if (lower) file_matrix(static_cast<int>(c), r) = file_matrix(r, static_cast<int>(c));
    }
  }

  std::vector<std::string> freq_tokens;
  std::size_t freq_line = lines[21].first;
  for (std::size_t l = 21; l < lines.size(); ++l)
    for (const auto& t : lines[l].second) freq_tokens.push_back(t);
  if (freq_tokens.size() != 20) {
    throw ParseError("substitution data line " + std::to_string(freq_line) + ": expected 20 frequencies");
  }

  SubstitutionData data;
  for (int r = 0; r < 20; ++r) {
    const double sum = file_matrix.row(r).sum();
    if (std::abs(sum - 1.0) > 1e-3) {
      throw ParseError("substitution data: row " + header[static_cast<std::size_t>(r)] +
                       " is not row-stochastic (sum " + std::to_string(sum) + ")");
    }
    for (int c = 0; c < 20; ++c) data.transition(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(c)]) = file_matrix(r, c);
    data.frequencies(order[static_cast<std::size_t>(r)]) = to_real(freq_tokens[static_cast<std::size_t>(r)], freq_line);
  }
  renormalize_rows(data.transition);
  const double fsum = data.frequencies.sum();
  if (std::abs(fsum - 1.0) > 1e-3) throw ParseError("substitution data: frequencies sum to " + std::to_string(fsum));
  data.frequencies /= fsum;

  const Vector20 pi = stationary_distribution(data.transition);
  if ((pi - data.frequencies).cwiseAbs().maxCoeff() > 5e-3) {
    throw ParseError("substitution data: frequencies disagree with the stationary distribution of the matrix");
  }
  return data;
}

const SubstitutionData& dayhoff_pam1() {
  static const SubstitutionData data = parse_substitution_data(dayhoff_pam1_text());
  return data;
}

ReversibleChain make_reversible(const SubstitutionData& data) {
  ReversibleChain out;
  out.stationary = stationary_distribution(data.transition);
  Matrix20 flux = out.stationary.asDiagonal() * data.transition;
  flux = 0.5 * (flux + flux.transpose()).eval();
  out.transition = out.stationary.cwiseInverse().asDiagonal() * flux;
  renormalize_rows(out.transition);
  return out;
}

Matrix20 transition_power(const Matrix20& transition, long k) {
  require(k >= 0, "transition_power: negative exponent");
  Matrix20 result = Matrix20::Identity();
  Matrix20 base = transition;
  while (k > 0) {
    if (k & 1) {
      result = (result * base).eval();
      renormalize_rows(result);
    }
    k >>= 1;
    if (k > 0) {
      base = (base * base).eval();
      renormalize_rows(base);
    }
  }
  return result;
}

SubstitutionModel model_from_joint(const Matrix20& joint, int k) {
  require((joint.array() >= 0.0).all() && joint.sum() > 0.0, "joint table must be nonnegative with positive mass");
  SubstitutionModel model;
  model.k = k;
  model.joint = joint / joint.sum();
  model.marginal = model.joint.rowwise().sum();
  return model;
}

SubstitutionModel pam_model(int k, const SubstitutionData& data) {
  require(k >= 1 && k <= 500, "PAM distance must lie in [1, 500], got " + std::to_string(k));
  const ReversibleChain chain = make_reversible(data);
  Matrix20 joint = chain.stationary.asDiagonal() * transition_power(chain.transition, k);
  joint = 0.5 * (joint + joint.transpose()).eval();
  return model_from_joint(joint, k);
}

Matrix20 log_odds(const SubstitutionModel& model) {
  require((model.marginal.array() > 0.0).all(), "log_odds: zero marginal probability");
  Matrix20 out;
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b)
      out(a, b) = 10.0 * std::log10(model.joint(a, b) / (model.marginal(a) * model.marginal(b)));
  return out;
}

TemperedModel temper(const SubstitutionModel& model, double eta) {
  require(eta >= 0.0 && eta <= 1.0, "discount factor must lie in [0, 1], got " + std::to_string(eta));
  TemperedModel t;
  t.eta = eta;
  if (eta == 0.0) {
    t.match_logprob.setConstant(-std::log(400.0));
    t.skip_logprob.setConstant(-std::log(20.0));
    return t;
  }
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b < 20; ++b) t.match_logprob(a, b) = model.joint(a, b) > 0.0 ? eta * std::log(model.joint(a, b)) : kNegInf;
    t.skip_logprob(a) = model.marginal(a) > 0.0 ? eta * std::log(model.marginal(a)) : kNegInf;
  }
  const double zm = log_sum_exp(std::span<const double>(t.match_logprob.data(), 400));
  const double zs = log_sum_exp(std::span<const double>(t.skip_logprob.data(), 20));
  t.match_logprob.array() -= zm;
  t.skip_logprob.array() -= zs;
  return t;
}

double joint_entropy(const TemperedModel& tempered) {
  double h = 0.0;
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) {
      const double lp = tempered.match_logprob(a, b);
      if (lp > kNegInf) h -= std::exp(lp) * lp;
    }
  return std::max(h, 0.0);
}

template <typename T>
std::vector<T> GridSpec<T>::values() const {
  std::vector<T> out;
  const long count = static_cast<long>(std::floor(static_cast<double>(hi - lo) / static_cast<double>(step) + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) {
    if constexpr (std::is_integral_v<T>) {
      out.push_back(static_cast<T>(lo + i * step));
    } else {
      out.push_back(round_grid(lo + static_cast<double>(i) * step));
    }
  }
  return out;
}

template struct GridSpec<int>;
template struct GridSpec<double>;

GridSpec<int> parse_int_grid(std::string_view text) { return parse_grid<int>(text); }
GridSpec<double> parse_real_grid(std::string_view text) { return parse_grid<double>(text); }

TemperedGrid::TemperedGrid(std::vector<int> pam_values, std::vector<double> eta_values, const SubstitutionData& data)
    : pam_values_(std::move(pam_values)), eta_values_(std::move(eta_values)) {
  require(!pam_values_.empty() && !eta_values_.empty(), "tempered grid needs at least one PAM distance and one discount factor");
  models_.reserve(pam_values_.size());
  cells_.reserve(pam_values_.size() * eta_values_.size());
  for (int k : pam_values_) {
    models_.push_back(pam_model(k, data));
    for (double eta : eta_values_) cells_.push_back(temper(models_.back(), eta));
  }
}

}  // namespace bayalign
