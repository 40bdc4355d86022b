#pragma once

#include "hmgh/criteria.hpp"
#include "hmgh/tensorcore.hpp"

#include <string>
#include <vector>

namespace hmgh {

struct MeasureResult {
  std::string name;
  double value = 0.0;
  bool exact = false;  // false for lower bounds
};

// min over bipartitions of sqrt(2 (1 - tr rho_A^2)); pure states only.
MeasureResult cgme_pure(const StateVector& psi);

// max(0, 2 * gme_value): a lower bound on the convex-roof gme-concurrence.
// The mixed-state gme-concurrence itself is not computed.
MeasureResult cgme_lower_bound(const ElementProvider& rho, const ProbePair& probe);

// Number of singular values above 1e-9 of the amplitude matrix across
// `block` versus the rest.
int schmidt_rank(const StateVector& psi, const std::vector<int>& block);

// Amplitude matrix with rows labelled by `block` and columns by the rest.
Matrix cut_matrix(const StateVector& psi, const std::vector<int>& block);

}  // namespace hmgh
