#include "hmgh/manybody.hpp"

#include "hmgh/errors.hpp"
#include "hmgh/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace hmgh {

Lattice Lattice::chain(int n) {
  Lattice l{n, {}};
  for (int i = 0; i + 1 < n; ++i) l.edges.emplace_back(i, i + 1);
  l.validate();
  return l;
}

Lattice Lattice::ring(int n) {
  if (n < 3) throw DomainError("a ring needs at least 3 sites");
  Lattice l = chain(n);
  l.edges.emplace_back(n - 1, 0);
  l.validate();
  return l;
}

void Lattice::validate() const {
  if (n < 1) throw DomainError("lattice needs at least one site");
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw DomainError("lattice edge references invalid sites");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) throw DomainError("duplicate lattice edge");
  }
}

HeisenbergParams HeisenbergParams::anisotropic(double gamma, double h) {
  return {1.0, 1.0 - gamma, 1.0 - 2.0 * gamma, h};
}

Matrix heisenberg_hamiltonian(const Lattice& lattice, const HeisenbergParams& p) {
  lattice.validate();
  const int n = lattice.n;
  if (n > kMaxSpinSites)
    throw ResourceError("Heisenberg model on " + std::to_string(n) + " sites exceeds the dense cap",
                        std::uint64_t{1} << std::min(n, 62));
  const Eigen::Index total = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(total, total);
  auto bit = [n](Eigen::Index x, int site) { return static_cast<int>((x >> (n - 1 - site)) & 1); };
  for (Eigen::Index x = 0; x < total; ++x) {
    double diag = 0.0;
    for (int s = 0; s < n; ++s) diag += p.h * (1 - 2 * bit(x, s));
    for (auto [i, j] : lattice.edges) {
      const int bi = bit(x, i), bj = bit(x, j);
      diag += 0.5 * p.jz * (1 - 2 * bi) * (1 - 2 * bj);
      const Eigen::Index y = x ^ (Eigen::Index{1} << (n - 1 - i)) ^ (Eigen::Index{1} << (n - 1 - j));
      // <y|XX|x> = 1, <y|YY|x> = -1 for equal bits and +1 otherwise.
      h(y, x) += 0.5 * (p.jx + (bi == bj ? -p.jy : p.jy));
    }
    h(x, x) += diag;
  }
  return h;
}

Spectrum diagonalise(const Matrix& h) {
  if (h.rows() != h.cols()) throw DomainError("Hamiltonian must be square");
  if (h.size() && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw DomainError("Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& ev = es.eigenvalues();
  return {std::vector<double>(ev.data(), ev.data() + ev.size()), es.eigenvectors()};
}

namespace {

SystemShape qubit_shape(const Matrix& h) {
  int n = 0;
  while ((Eigen::Index{1} << n) < h.rows()) ++n;
  if ((Eigen::Index{1} << n) != h.rows() || n < 1) throw DomainError("Hamiltonian dimension is not a power of 2");
  return SystemShape::uniform(n, 2);
}

}  // namespace

ThermalState thermal_state(const Matrix& h, double kT) {
  if (!(kT > 0.0)) throw DomainError("thermal state needs kT > 0");
  Spectrum sp = diagonalise(h);
  const double e0 = sp.energies.front();
  Eigen::VectorXd w(static_cast<Eigen::Index>(sp.energies.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(-(sp.energies[i] - e0) / kT);
  const double zs = w.sum();
  Matrix rho = sp.vectors * (w / zs).cast<Complex>().asDiagonal() * sp.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double log_z = std::log(zs) - e0 / kT;
  return {DensityMatrix(qubit_shape(h), std::move(rho), Validation::skip), std::exp(log_z), log_z};
}

GroundState ground_state(const Matrix& h, double degeneracy_tol) {
  Spectrum sp = diagonalise(h);
  const double e0 = sp.energies.front();
  int g = 0;
  while (g < static_cast<int>(sp.energies.size()) && sp.energies[g] - e0 <= degeneracy_tol) ++g;
  Matrix v = sp.vectors.leftCols(g);
  Matrix rho = v * v.adjoint() / static_cast<double>(g);
  SystemShape shape = qubit_shape(h);
  std::optional<StateVector> vec;
  if (g == 1) vec.emplace(shape, sp.vectors.col(0));
  return {DensityMatrix(shape, std::move(rho), Validation::skip), e0, g, std::move(vec)};
}

namespace {

struct SparseEntry {
  Eigen::Index row, col;
  Complex value;
};

// Alternating optimisation of one block structure from one starting point.
struct BlockSearch {
  const std::vector<SparseEntry>& entries;
  const std::vector<std::vector<int>>& local;  // local[b][x]: block-b index of flat x
  std::vector<int> dims;                        // block dimensions
  Eigen::Index total;

  // Product amplitude over all blocks except `skip` (or all when skip = -1).
  Complex env(const std::vector<Vector>& v, Eigen::Index x, int skip) const {
    Complex a = 1.0;
    for (std::size_t b = 0; b < v.size(); ++b)
      if (static_cast<int>(b) != skip) a *= v[b](local[b][x]);
    return a;
  }

  std::pair<double, bool> run(std::vector<Vector>& v, double tol, int max_sweeps) const {
    const int k = static_cast<int>(v.size());
    double energy = std::numeric_limits<double>::infinity();
    std::vector<Complex> phi(static_cast<std::size_t>(total));
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double last = energy;
      for (int b = 0; b < k; ++b) {
        for (Eigen::Index x = 0; x < total; ++x) phi[x] = env(v, x, b);
        Matrix heff = Matrix::Zero(dims[b], dims[b]);
        for (const auto& e : entries) {
          const Complex c = std::conj(phi[e.row]) * e.value * phi[e.col];
          if (c != Complex(0.0)) heff(local[b][e.row], local[b][e.col]) += c;
        }
        heff = 0.5 * (heff + heff.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(heff);
        v[b] = es.eigenvectors().col(0);
        energy = es.eigenvalues()(0);
      }
      if (std::abs(last - energy) < tol) return {energy, true};
    }
    return {energy, false};
  }
};

}  // namespace

KsepEnergy min_ksep_energy(const Matrix& h, int n, int k, const KsepEnergyOptions& opts) {
  SystemShape shape = qubit_shape(h);
  if (shape.size() != n) throw DomainError("Hamiltonian dimension does not match n qubits");
  if (k < 1 || k > n) throw DomainError("k-separable energy needs 1 <= k <= n");
  if (opts.restarts < 1) throw DomainError("need at least one restart");
  if (k == 1) return {diagonalise(h).energies.front(), true, std::nullopt};
  require_partition_count(n, k);

  std::vector<SparseEntry> entries;
  for (Eigen::Index c = 0; c < h.cols(); ++c)
    for (Eigen::Index r = 0; r < h.rows(); ++r)
      if (h(r, c) != Complex(0.0)) entries.push_back({r, c, h(r, c)});

  KsepEnergy best{std::numeric_limits<double>::infinity(), false, std::nullopt};
  std::uint64_t part_index = 0;
  for_each_k_partition(n, k, [&](const Partition& p) {
    std::vector<std::vector<int>> local(k, std::vector<int>(static_cast<std::size_t>(shape.total())));
    std::vector<int> dims(k);
    for (int b = 0; b < k; ++b) {
      auto offs = block_offsets(shape, p.block(b));
      auto rest = block_offsets(shape, complement(p.block(b), n));
      dims[b] = static_cast<int>(offs.size());
      for (std::size_t i = 0; i < offs.size(); ++i)
        for (std::uint64_t r : rest) local[b][offs[i] + r] = static_cast<int>(i);
    }
    BlockSearch search{entries, local, dims, static_cast<Eigen::Index>(shape.total())};
    for (int r = 0; r < opts.restarts; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                        static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(part_index),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      std::vector<Vector> v;
      for (int b = 0; b < k; ++b)
        v.push_back(random_pure_state(SystemShape::uniform(static_cast<int>(p.block(b).size()), 2), rng).amplitudes());
      auto [e, ok] = search.run(v, opts.tol, opts.max_sweeps);
      if (e < best.energy) {
        best.energy = e;
        best.converged = ok;
        best.partition = p;
      }
    }
    ++part_index;
  });
  return best;
}

GapReport entanglement_gaps(const Matrix& h, int n, const KsepEnergyOptions& opts) {
  GapReport rep;
  rep.n = n;
  rep.hamiltonian = h;
  rep.e0 = diagonalise(h).energies.front();
  rep.e_ksep.assign(n, rep.e0);
  rep.converged.assign(n, true);
  for (int k = n; k >= 2; --k) {
    KsepEnergy e = min_ksep_energy(h, n, k, opts);
    double v = std::max(e.energy, rep.e0);
    if (k < n) v = std::min(v, rep.e_ksep[k]);
    rep.e_ksep[k - 1] = v;
    rep.converged[k - 1] = e.converged;
  }
  for (double e : rep.e_ksep) rep.gaps.push_back(e - rep.e0);
  return rep;
}

bool gap_witness_detects(const DensityMatrix& rho, const GapReport& report, int k, double slack) {
  if (rho.matrix().rows() != report.hamiltonian.rows()) throw DomainError("state and Hamiltonian shapes differ");
  if (k < 1 || k > report.n) throw DomainError("k out of range for this gap report");
  return expectation(rho, report.hamiltonian) < report.ksep(k) - slack;
}

int detected_k(const DensityMatrix& rho, const GapReport& report, double slack) {
  int best = 0;
  for (int k = 2; k <= report.n; ++k)
    if (gap_witness_detects(rho, report, k, slack)) best = k;
  return best;
}

}  // namespace hmgh
