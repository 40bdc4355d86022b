#pragma once

#include "hmgh/tensorcore.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace hmgh {

// Pure state stored as flat index -> amplitude, for shapes far beyond dense range.
class SparseState {
 public:
  SparseState(SystemShape shape, std::vector<std::pair<std::uint64_t, Complex>> terms);

  const SystemShape& shape() const { return shape_; }
  const std::vector<std::pair<std::uint64_t, Complex>>& terms() const { return terms_; }
  Complex amplitude(std::uint64_t index) const;
  StateVector to_dense() const;

 private:
  SystemShape shape_;
  std::vector<std::pair<std::uint64_t, Complex>> terms_;
  std::unordered_map<std::uint64_t, Complex> lookup_;
};

// sum_i w_i |psi_i><psi_i| + noise * 1/total, with closed-form entries.
class MixtureProvider final : public ElementProvider {
 public:
  struct Term {
    double weight;
    SparseState state;
  };

  MixtureProvider(SystemShape shape, std::vector<Term> terms, double noise);

  const SystemShape& shape() const override { return shape_; }
  Complex at(std::uint64_t row, std::uint64_t col) const override;
  DensityMatrix to_dense(std::uint64_t max_dim = kDefaultMaxDim) const;

 private:
  SystemShape shape_;
  std::vector<Term> terms_;
  double noise_;
};

// View that relabels every site j -> d-1-j.
class FlippedView final : public ElementProvider {
 public:
  explicit FlippedView(const ElementProvider& inner);
  const SystemShape& shape() const override { return inner_.shape(); }
  Complex at(std::uint64_t row, std::uint64_t col) const override {
    return inner_.at(last_ - row, last_ - col);
  }

 private:
  const ElementProvider& inner_;
  std::uint64_t last_;
};

enum class StateKind { ghz, w, dicke, smolin, bell, basis_product };

struct StateSpec {
  StateKind kind = StateKind::ghz;
  int n = 3;
  int d = 2;
  int m = 1;
  std::string bell = "phi+";  // phi+, phi-, psi+, psi-
  MultiIndex basis;           // for basis_product
};

StateKind parse_state_kind(const std::string& name);

// Pure kinds as sparse amplitude maps; throws DomainError for smolin.
SparseState make_sparse_state(const StateSpec& spec);
std::variant<StateVector, DensityMatrix> make_state(const StateSpec& spec);
DensityMatrix make_density(const StateSpec& spec);

// Individual constructors. Qudit Dicke sums excitation levels j = 0..d-2.
SparseState ghz_state(int n, int d = 2);
SparseState w_state(int n, int d = 2);
SparseState dicke_state(int n, int m, int d = 2);
SparseState bell_state(const std::string& label);
DensityMatrix smolin_state();

DensityMatrix mix_white_noise(const DensityMatrix& rho, double p);

enum class Family { ghz_iso, dicke_iso, ghz_w, gmd };

struct FamilySpec {
  Family family = Family::ghz_iso;
  int n = 3;
  int d = 2;
  int m = 1;          // dicke_iso
  double alpha = 1.0; // weight of GHZ (or of the Dicke state for dicke_iso)
  double beta = 0.0;  // weight of W (ghz_w, gmd)
};

Family parse_family(const std::string& name);
std::string family_name(Family f);

// alpha |GHZ><GHZ| (+ beta |W><W|) + rest * 1/total; weights must lie in the simplex.
MixtureProvider family_state(const FamilySpec& spec);

// Haar-random pure state and unitary, for property tests and sampling.
StateVector random_pure_state(const SystemShape& shape, std::mt19937_64& rng);
Matrix random_unitary(int d, std::mt19937_64& rng);
// Random mixed state: a random number of Haar pure states with Dirichlet-like weights.
DensityMatrix random_density(const SystemShape& shape, std::mt19937_64& rng, int rank = 0);

}  // namespace hmgh
