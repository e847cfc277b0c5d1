#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "bayalign/structio.hpp"

namespace bayalign {

using Matrix20 = Eigen::Matrix<double, 20, 20>;
using Vector20 = Eigen::Matrix<double, 20, 1>;

/// PAM1 transition data: P(a -> b) rows and equilibrium frequencies, indexed
/// in kAminoAcidLetters order regardless of the order used in the source file.
struct SubstitutionData {
  Matrix20 transition;
  Vector20 frequencies;
};

/// Parses the plain-text substitution data format.
///
///   # comments allowed
///   A R N D C Q E G H I L K M F P S T W Y V      (header: 20 distinct letters)
///   <20 rows, full (20 values) or lower-triangular (row r holds r+1 values)>
///   <20 equilibrium frequencies>
///
/// Rows must be row-stochastic within 1e-3 and are renormalised. A
/// lower-triangular matrix is mirrored before renormalisation. Frequencies must
/// sum to 1 within 1e-3.
SubstitutionData parse_substitution_data(std::string_view text);

/// Dayhoff (1978) PAM1 mutation probabilities and amino-acid frequencies.
const SubstitutionData& dayhoff_pam1();
/// The embedded asset as text, in the parse_substitution_data format.
std::string_view dayhoff_pam1_text();

/// Reversible PAM1 chain built from `data`: its exact stationary distribution
/// and the flux-symmetrised transition matrix.
struct ReversibleChain {
  Matrix20 transition;
  Vector20 stationary;
};
ReversibleChain make_reversible(const SubstitutionData& data);

/// transition^k by repeated squaring with row renormalisation; no range check.
Matrix20 transition_power(const Matrix20& transition, long k);

struct SubstitutionModel {
  int k = 0;
  Matrix20 joint;     ///< Theta_k(a, b), sums to one
  Vector20 marginal;  ///< Theta_k(a, .)
};

/// Theta_k(a, b) = pi_a (P^k)_{ab}. Requires 1 <= k <= 500.
SubstitutionModel pam_model(int k, const SubstitutionData& data = dayhoff_pam1());
/// Builds a model from an arbitrary joint table (used for toy alphabets in tests).
SubstitutionModel model_from_joint(const Matrix20& joint, int k = 0);

/// Psi(a, b) = 10 log10(Theta(a, b) / (Theta(a, .) Theta(., b))).
Matrix20 log_odds(const SubstitutionModel& model);

struct TemperedModel {
  double eta = 1.0;
  Matrix20 match_logprob;  ///< log of Theta(a, b)^eta / sum Theta^eta
  Vector20 skip_logprob;   ///< log of Theta(a, .)^eta / sum Theta(., .)^eta
};

TemperedModel temper(const SubstitutionModel& model, double eta);

/// Shannon entropy (nats) of the tempered 400-cell match distribution.
double joint_entropy(const TemperedModel& tempered);

/// Inclusive arithmetic grid lo:hi:step.
template <typename T>
struct GridSpec {
  T lo;
  T hi;
  T step;
  std::vector<T> values() const;
};

GridSpec<int> parse_int_grid(std::string_view text);
GridSpec<double> parse_real_grid(std::string_view text);

inline constexpr GridSpec<int> kDefaultPamGrid{100, 300, 10};
inline constexpr GridSpec<double> kDefaultEtaGrid{0.0, 1.0, 0.1};

/// Tempered models for every (k, eta) cell, built once and shared read-only.
class TemperedGrid {
 public:
  TemperedGrid(std::vector<int> pam_values, std::vector<double> eta_values,
               const SubstitutionData& data = dayhoff_pam1());

  const std::vector<int>& pam_values() const { return pam_values_; }
  const std::vector<double>& eta_values() const { return eta_values_; }
  int num_pam() const { return static_cast<int>(pam_values_.size()); }
  int num_eta() const { return static_cast<int>(eta_values_.size()); }
  const TemperedModel& at(int k_index, int eta_index) const {
    return cells_[static_cast<std::size_t>(k_index * num_eta() + eta_index)];
  }
  const SubstitutionModel& model(int k_index) const { return models_[static_cast<std::size_t>(k_index)]; }

 private:
  std::vector<int> pam_values_;
  std::vector<double> eta_values_;
  std::vector<SubstitutionModel> models_;
  std::vector<TemperedModel> cells_;
};

}  // namespace bayalign
