#pragma once

#include "hmgh/criteria.hpp"
#include "hmgh/errors.hpp"
#include "hmgh/tensorcore.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace hmgh {

// Labels 0..3 per qubit. sigma_2 here is i|0><1| - i|1><0|, the sign
// convention under which the expansions below are written.
struct PauliString {
  std::vector<int> labels;
  auto operator<=>(const PauliString&) const = default;
  std::string to_string() const;  // "[012]"
  bool diagonal_only() const;      // only identity and sigma_3
};

Matrix pauli_factor(int k);
Matrix pauli_operator(const PauliString& s);

using PauliExpansion = std::map<PauliString, Complex>;
using PauliExpectations = std::map<PauliString, double>;

// <bra|rho|ket> = sum_s c_s tr(rho sigma_s) for every rho.
PauliExpansion pauli_expansion(const MultiIndex& bra, const MultiIndex& ket);
double pauli_expectation(const DensityMatrix& rho, const PauliString& s);
PauliExpectations pauli_expectations(const DensityMatrix& rho, const std::vector<PauliString>& strings);
Complex reconstruct_element(const PauliExpansion& expansion, const PauliExpectations& values);

// --- tripartite secret sharing ---

enum class QssBasis { x, y };

struct QssLabel {
  QssBasis basis;
  int sign;  // +1 or -1
  auto operator<=>(const QssLabel&) const = default;
  std::string to_string() const;  // "x+", "y-"
};

// Order used by the table: x+, x-, y+, y-.
const std::array<QssLabel, 4>& qss_labels();
Vector qss_ket(const QssLabel& label);

// Alice's normalised conditional state after Bob (qubit 2) and Charlie
// (qubit 3) project the GHZ resource onto the given eigenstates.
Vector qss_conditional_state(const DensityMatrix& resource, const QssLabel& bob, const QssLabel& charlie);
// table[bob][charlie] = Alice's state label, identified by fidelity.
std::array<std::array<QssLabel, 4>, 4> qss_table();

struct QssRound {
  std::array<QssBasis, 3> bases;  // Alice, Bob, Charlie
  std::array<int, 3> outcomes;     // +1 / -1
  bool sifted;                     // Alice's basis matches the one the table predicts
  QssLabel predicted;              // Alice's state implied by Bob's and Charlie's results
  bool agrees;                     // sifted and Alice's outcome matches the prediction
};

// One round on `resource`: every party picks x or y uniformly and measures.
QssRound qss_round(std::mt19937_64& rng, const DensityMatrix& resource);
QssRound qss_round(std::uint64_t seed);

struct QssSummary {
  std::uint64_t rounds = 0;
  std::uint64_t sifted = 0;
  std::uint64_t errors = 0;  // sifted rounds where Alice disagrees with the prediction
  bool eavesdrop = false;
  PauliExpectations expectations;
  CriterionReport verification;
};

// Runs `rounds` rounds on GHZ_3 (or on a product state when eavesdropping)
// and evaluates the verification inequality from the resource's expectations.
// shots > 0 replaces exact expectations by binomial estimates.
QssSummary qss_simulate(std::uint64_t rounds, std::uint64_t seed, bool eavesdrop, std::uint64_t shots = 0);

// The sixteen strings the seven elements of the verification inequality expand into.
std::vector<PauliString> qss_required_strings();
CriterionReport qss_verification_value(const PauliExpectations& expectations);
PauliExpectations sampled_expectations(const DensityMatrix& rho, const std::vector<PauliString>& strings,
                                       std::uint64_t shots, std::mt19937_64& rng);

// --- error propagation ---

struct ErrorBudget {
  double o, delta;
  int n, k;
  double xi;
};

ErrorBudget error_bound(double o, double delta, int n, int k);

// --- continuous-variable thresholds ---

template <class T>
struct CvThresholdsT {
  T gme_p;
  T ent_p;
  bool always_detected;
};
using CvThresholds = CvThresholdsT<double>;

// When d > delta every p > 0 is detected and both thresholds are 0.
template <class T>
CvThresholdsT<T> cv_thresholds_formula(const T& d, const T& delta, const T& alpha) {
  if (!(d > 0) || !(delta > 0) || !(alpha > 0)) throw DomainError("cv thresholds need positive inputs");
  if (d > delta) return {T(0), T(0), true};
  const T a = d * d * d * alpha * alpha;
  return {T(3) * a / (T(3) * a + T(2) * delta), a / (a + T(2) * delta), false};
}

CvThresholds cv_detection_thresholds(double d, double delta, double alpha);

}  // namespace hmgh
