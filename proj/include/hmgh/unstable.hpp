#pragma once

#include "hmgh/tensorcore.hpp"

#include <array>

namespace hmgh {

// Measurement direction (alpha, phi) read out at time t (units of 1/Gamma)
// on a two-level system whose sigma_z eigenstates decay with widths gamma1, gamma2.
struct EffectiveOpParams {
  double alpha = 0.0;
  double phi = 0.0;
  double t = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;

  void validate() const;
};

std::array<double, 3> bloch_vector(const EffectiveOpParams& p);
// (1 - |n|) 1 + n . sigma
Matrix effective_operator(const EffectiveOpParams& p);

struct ChshSettings {
  EffectiveOpParams a1, a2, b1, b2;

  // A1 = sigma_3, A2 = sigma_1, B1/B2 at alpha = 3pi/4 with phi = pi / 0:
  // the singlet reaches 2 sqrt 2 at t = 0.
  static ChshSettings standard(double t = 0.0, double gamma1 = 1.0, double gamma2 = 1.0);
};

// A1 (x) (B1 + B2) + A2 (x) (B1 - B2)
Matrix chsh_operator(const ChshSettings& s);
double singlet_value(const ChshSettings& s);

struct ChshBoundOptions {
  int theta_steps = 64;
  int phi_steps = 128;
  bool refine = true;
  double refine_tol = 1e-14;
  int max_iterations = 5000;
};

struct ChshBound {
  double b_minus;
  double b_plus;
  double grid_minus;
  double grid_plus;
  bool converged;
};

// Extrema of <a,b| B |a,b> over pure product states. Party A is scanned on a
// Bloch-sphere grid and refined by Nelder-Mead; party B enters linearly and is
// optimised in closed form for every A.
ChshBound chsh_bound(const ChshSettings& s, const ChshBoundOptions& opts = {});

// Product-state value for explicit Bloch vectors of A and B.
double product_value(const ChshSettings& s, const std::array<double, 3>& ra, const std::array<double, 3>& rb);

}  // namespace hmgh
