#pragma once

#include <Eigen/Dense>

#include <compare>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmgh {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::uint64_t kDefaultMaxDim = std::uint64_t{1} << 14;
inline constexpr double kStateTol = 1e-9;

// Per-subsystem local dimensions. Subsystem 0 is the most significant digit
// of the flat basis index.
class SystemShape {
 public:
  explicit SystemShape(std::vector<int> dims);
  static SystemShape uniform(int n, int d);

  int size() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(i); }
  const std::vector<int>& dims() const { return dims_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t stride(int i) const { return strides_.at(i); }
  bool is_uniform() const;
  // Common local dimension; throws DomainError for mixed dimensions.
  int local_dim() const;
  SystemShape select(const std::vector<int>& systems) const;

  bool operator==(const SystemShape& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t total_ = 1;
};

// Throws ResourceError when a dense total x total object would exceed max_dim.
void require_dense(const SystemShape& shape, std::uint64_t max_dim = kDefaultMaxDim);

class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> labels) : labels_(labels) {}
  explicit MultiIndex(std::vector<int> labels) : labels_(std::move(labels)) {}

  int size() const { return static_cast<int>(labels_.size()); }
  int operator[](int i) const { return labels_[i]; }
  int& operator[](int i) { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  // "0011" when every label is a single digit, otherwise "0.1.10".
  std::string to_string() const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> labels_;
};

// Accepts "0011" (one digit per site) or dot-separated labels "0.1.10".
MultiIndex parse_multiindex(std::string_view text);
MultiIndex uniform_index(int n, int label);

void validate(const MultiIndex& mi, const SystemShape& shape);
std::uint64_t encode(const MultiIndex& mi, const SystemShape& shape);
MultiIndex decode(std::uint64_t index, const SystemShape& shape);

// Flat-index contribution of every label combination on `systems`,
// enumerated with the first listed system most significant.
std::vector<std::uint64_t> block_offsets(const SystemShape& shape, const std::vector<int>& systems);
std::vector<int> complement(const std::vector<int>& systems, int n);

// Read access to density-matrix entries, dense or closed form.
class ElementProvider {
 public:
  virtual ~ElementProvider() = default;
  virtual const SystemShape& shape() const = 0;
  // Entry at flat row/column; callers guarantee the range.
  virtual Complex at(std::uint64_t row, std::uint64_t col) const = 0;

  Complex element(const MultiIndex& bra, const MultiIndex& ket) const;
  // Real part of a diagonal entry, clamped at zero against rounding.
  double population(const MultiIndex& mi) const;

 protected:
  ElementProvider() = default;
  ElementProvider(const ElementProvider&) = default;
  ElementProvider& operator=(const ElementProvider&) = default;
};

Complex matrix_element(const ElementProvider& rho, const MultiIndex& bra, const MultiIndex& ket);

enum class Validation { check, skip };

class DensityMatrix final : public ElementProvider {
 public:
  DensityMatrix(SystemShape shape, Matrix entries, Validation validation = Validation::check,
                double tol = kStateTol);
  static DensityMatrix maximally_mixed(const SystemShape& shape);

  const SystemShape& shape() const override { return shape_; }
  Complex at(std::uint64_t row, std::uint64_t col) const override {
    return m_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }
  const Matrix& matrix() const { return m_; }

 private:
  SystemShape shape_;
  Matrix m_;
};

class StateVector {
 public:
  StateVector(SystemShape shape, Vector amplitudes, double tol = kStateTol);
  static StateVector basis(const SystemShape& shape, const MultiIndex& mi);

  const SystemShape& shape() const { return shape_; }
  const Vector& amplitudes() const { return amps_; }
  Complex amplitude(const MultiIndex& mi) const;

 private:
  SystemShape shape_;
  Vector amps_;
};

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);
Matrix kron_all(std::initializer_list<Matrix> factors);
StateVector kron(const StateVector& a, const StateVector& b);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& systems);
Matrix partial_transpose(const SystemShape& shape, const Matrix& m, const std::vector<int>& block);
Matrix partial_transpose(const DensityMatrix& rho, const std::vector<int>& block);

// Ascending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_spectrum(const Matrix& m, double tol = kStateTol);

StateVector flip_all(const StateVector& psi);
DensityMatrix flip_all(const DensityMatrix& rho);

DensityMatrix vec_to_dm(const StateVector& psi);

// U rho U^dagger with U the tensor product of one unitary per subsystem.
DensityMatrix apply_local_unitaries(const DensityMatrix& rho, std::span<const Matrix> unitaries);
StateVector apply_local_unitaries(const StateVector& psi, std::span<const Matrix> unitaries);

// Real part of tr(rho * op).
double expectation(const DensityMatrix& rho, const Matrix& op);

// Textbook Pauli matrices, k = 0..3 (identity, x, y, z).
Matrix pauli(int k);

}  // namespace hmgh
