#pragma once

#include "hmgh/partitions.hpp"
#include "hmgh/tensorcore.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hmgh {

struct Lattice {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  static Lattice chain(int n);
  static Lattice ring(int n);
  void validate() const;
};

struct HeisenbergParams {
  double jx = 1.0;
  double jy = 1.0;
  double jz = 1.0;
  double h = 0.0;

  // Jx = 1, Jy = 1 - gamma, Jz = 1 - 2 gamma.
  static HeisenbergParams anisotropic(double gamma, double h);
};

inline constexpr int kMaxSpinSites = 14;

// 1/2 sum_<ij> (Jx XX + Jy YY + Jz ZZ) + h sum_i Z_i on n qubits.
Matrix heisenberg_hamiltonian(const Lattice& lattice, const HeisenbergParams& params);

struct Spectrum {
  std::vector<double> energies;  // ascending
  Matrix vectors;                // columns
};
Spectrum diagonalise(const Matrix& h);

struct ThermalState {
  DensityMatrix state;
  double partition_function;      // sum_i exp(-E_i / kT), may overflow to inf
  double log_partition_function;  // always finite
};

ThermalState thermal_state(const Matrix& h, double kT);

struct GroundState {
  DensityMatrix state;  // uniform mixture over the ground manifold
  double energy;
  int degeneracy;
  std::optional<StateVector> vector;  // set when nondegenerate
};

GroundState ground_state(const Matrix& h, double degeneracy_tol = 1e-9);

struct KsepEnergyOptions {
  int restarts = 32;
  double tol = 1e-10;
  int max_sweeps = 1000;
  std::uint64_t seed = 0;
};

struct KsepEnergy {
  double energy = 0.0;
  bool converged = true;
  std::optional<Partition> partition;  // best block structure found
};

// Minimum of <psi|H|psi> over product states across some k-partition, by
// alternating block-wise diagonalisation. A local search: the result is an
// upper bound on the true k-separable minimum.
KsepEnergy min_ksep_energy(const Matrix& h, int n, int k, const KsepEnergyOptions& opts = {});

struct GapReport {
  int n = 0;
  double e0 = 0.0;
  std::vector<double> e_ksep;  // index k-1, k = 1..n; e_ksep[0] = E0
  std::vector<double> gaps;    // e_ksep - e0
  std::vector<bool> converged;
  Matrix hamiltonian;

  double ksep(int k) const { return e_ksep.at(k - 1); }
};

// E_k for every k, enforcing E_k <= E_{k+1} (a (k+1)-separable state is k-separable).
GapReport entanglement_gaps(const Matrix& h, int n, const KsepEnergyOptions& opts = {});

// True when tr(rho H) < E_ksep - slack.
bool gap_witness_detects(const DensityMatrix& rho, const GapReport& report, int k, double slack = 1e-6);

// Largest k with tr(rho H) below E_ksep - slack, or 0 when nothing is detected.
int detected_k(const DensityMatrix& rho, const GapReport& report, double slack = 1e-6);

}  // namespace hmgh
