#include "hmgh/tensorcore.hpp"

#include "hmgh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmgh {

namespace {

// Matrices above this size skip the (cubic) positivity check on construction.
constexpr std::uint64_t kPsdCheckLimit = 1024;

double max_hermitian_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void check_systems(const std::vector<int>& systems, int n, const char* what) {
  std::vector<bool> seen(n, false);
  for (int s : systems) {
    if (s < 0 || s >= n) throw DomainError(std::string(what) + ": subsystem label out of range");
    if (seen[s]) throw DomainError(std::string(what) + ": repeated subsystem label");
    seen[s] = true;
  }
}

}  // namespace

SystemShape::SystemShape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("shape needs at least one subsystem");
  strides_.assign(dims_.size(), 1);
  total_ = 1;
  for (int i = size() - 1; i >= 0; --i) {
    if (dims_[i] < 2) throw DomainError("local dimensions must be at least 2");
    strides_[i] = total_;
    if (total_ > (std::numeric_limits<std::uint64_t>::max() >> 2) / static_cast<std::uint64_t>(dims_[i]))
      throw ResourceError("total dimension overflows 64-bit indices", std::numeric_limits<std::uint64_t>::max());
    total_ *= static_cast<std::uint64_t>(dims_[i]);
  }
}

SystemShape SystemShape::uniform(int n, int d) {
  if (n < 1) throw DomainError("need n >= 1");
  return SystemShape(std::vector<int>(n, d));
}

bool SystemShape::is_uniform() const {
  return std::all_of(dims_.begin(), dims_.end(), [&](int d) { return d == dims_.front(); });
}

int SystemShape::local_dim() const {
  if (!is_uniform()) throw DomainError("operation needs a uniform local dimension");
  return dims_.front();
}

SystemShape SystemShape::select(const std::vector<int>& systems) const {
  check_systems(systems, size(), "select");
  std::vector<int> d;
  for (int s : systems) d.push_back(dims_[s]);
  return SystemShape(std::move(d));
}

void require_dense(const SystemShape& shape, std::uint64_t max_dim) {
  if (shape.total() > max_dim)
    throw ResourceError("dense dimension " + std::to_string(shape.total()) + " exceeds cap " +
                            std::to_string(max_dim),
                        shape.total());
}

std::string MultiIndex::to_string() const {
  bool digits = std::all_of(labels_.begin(), labels_.end(), [](int l) { return l >= 0 && l < 10; });
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!digits && i > 0) out += '.';
    out += std::to_string(labels_[i]);
  }
  return out;
}

MultiIndex parse_multiindex(std::string_view text) {
  std::vector<int> labels;
  if (text.empty()) throw DomainError("empty multi-index");
  if (text.find('.') == std::string_view::npos) {
    for (char c : text) {
      if (c < '0' || c > '9') throw DomainError("bad multi-index '" + std::string(text) + "'");
      labels.push_back(c - '0');
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t next = text.find('.', pos);
      if (next == std::string_view::npos) next = text.size();
      std::string_view part = text.substr(pos, next - pos);
      if (part.empty()) throw DomainError("bad multi-index '" + std::string(text) + "'");
      int v = 0;
      for (char c : part) {
        if (c < '0' || c > '9') throw DomainError("bad multi-index '" + std::string(text) + "'");
        v = v * 10 + (c - '0');
      }
      labels.push_back(v);
      pos = next + 1;
    }
  }
  return MultiIndex(std::move(labels));
}

MultiIndex uniform_index(int n, int label) { return MultiIndex(std::vector<int>(n, label)); }

void validate(const MultiIndex& mi, const SystemShape& shape) {
  if (mi.size() != shape.size())
    throw DomainError("multi-index length " + std::to_string(mi.size()) + " does not match " +
                      std::to_string(shape.size()) + " subsystems");
  for (int i = 0; i < mi.size(); ++i)
    if (mi[i] < 0 || mi[i] >= shape.dim(i))
      throw DomainError("label " + std::to_string(mi[i]) + " out of range on subsystem " + std::to_string(i + 1));
}

std::uint64_t encode(const MultiIndex& mi, const SystemShape& shape) {
  validate(mi, shape);
  std::uint64_t x = 0;
  for (int i = 0; i < mi.size(); ++i) x += static_cast<std::uint64_t>(mi[i]) * shape.stride(i);
  return x;
}

MultiIndex decode(std::uint64_t index, const SystemShape& shape) {
  if (index >= shape.total()) throw DomainError("flat index out of range");
  std::vector<int> labels(shape.size());
  for (int i = shape.size() - 1; i >= 0; --i) {
    labels[i] = static_cast<int>(index % static_cast<std::uint64_t>(shape.dim(i)));
    index /= static_cast<std::uint64_t>(shape.dim(i));
  }
  return MultiIndex(std::move(labels));
}

std::vector<std::uint64_t> block_offsets(const SystemShape& shape, const std::vector<int>& systems) {
  check_systems(systems, shape.size(), "block_offsets");
  std::vector<std::uint64_t> out{0};
  for (int s : systems) {
    std::vector<std::uint64_t> next;
    next.reserve(out.size() * shape.dim(s));
    for (std::uint64_t base : out)
      for (int l = 0; l < shape.dim(s); ++l) next.push_back(base + static_cast<std::uint64_t>(l) * shape.stride(s));
    out.swap(next);
  }
  return out;
}

std::vector<int> complement(const std::vector<int>& systems, int n) {
  std::vector<bool> in(n, false);
  for (int s : systems) {
    if (s < 0 || s >= n) throw DomainError("subsystem label out of range");
    in[s] = true;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

Complex ElementProvider::element(const MultiIndex& bra, const MultiIndex& ket) const {
  return at(encode(bra, shape()), encode(ket, shape()));
}

double ElementProvider::population(const MultiIndex& mi) const {
  std::uint64_t x = encode(mi, shape());
  return std::max(0.0, at(x, x).real());
}

Complex matrix_element(const ElementProvider& rho, const MultiIndex& bra, const MultiIndex& ket) {
  return rho.element(bra, ket);
}

DensityMatrix::DensityMatrix(SystemShape shape, Matrix entries, Validation validation, double tol)
    : shape_(std::move(shape)), m_(std::move(entries)) {
  const auto total = static_cast<Eigen::Index>(shape_.total());
  if (m_.rows() != total || m_.cols() != total)
    throw DomainError("density matrix size does not match its shape");
  if (validation == Validation::skip) return;
  if (max_hermitian_defect(m_) > tol) throw DomainError("density matrix is not Hermitian");
  if (std::abs(m_.trace() - Complex(1.0)) > tol) throw DomainError("density matrix trace is not 1");
  if (shape_.total() <= kPsdCheckLimit) {
    Matrix shifted = m_;
    shifted.diagonal().array() += tol;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) throw DomainError("density matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(const SystemShape& shape) {
  require_dense(shape);
  const auto total = static_cast<Eigen::Index>(shape.total());
  return DensityMatrix(shape, Matrix::Identity(total, total) / static_cast<double>(total), Validation::skip);
}

StateVector::StateVector(SystemShape shape, Vector amplitudes, double tol)
    : shape_(std::move(shape)), amps_(std::move(amplitudes)) {
  if (amps_.size() != static_cast<Eigen::Index>(shape_.total()))
    throw DomainError("state vector length does not match its shape");
  double norm = amps_.norm();
  if (norm == 0.0) throw DomainError("zero state vector");
  if (std::abs(norm - 1.0) > tol) throw DomainError("state vector is not normalised");
}

StateVector StateVector::basis(const SystemShape& shape, const MultiIndex& mi) {
  require_dense(shape);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(shape.total()));
  v(static_cast<Eigen::Index>(encode(mi, shape))) = 1.0;
  return StateVector(shape, std::move(v));
}

Complex StateVector::amplitude(const MultiIndex& mi) const {
  return amps_(static_cast<Eigen::Index>(encode(mi, shape_)));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_all(std::span<const Matrix> factors) {
  if (factors.empty()) throw DomainError("kron_all needs at least one factor");
  Matrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

Matrix kron_all(std::initializer_list<Matrix> factors) {
  return kron_all(std::span<const Matrix>(factors.begin(), factors.size()));
}

StateVector kron(const StateVector& a, const StateVector& b) {
  std::vector<int> dims = a.shape().dims();
  dims.insert(dims.end(), b.shape().dims().begin(), b.shape().dims().end());
  SystemShape shape(std::move(dims));
  require_dense(shape);
  Vector v(static_cast<Eigen::Index>(shape.total()));
  const Eigen::Index nb = b.amplitudes().size();
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) v.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  return StateVector(std::move(shape), std::move(v));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& systems) {
  const SystemShape& shape = rho.shape();
  check_systems(systems, shape.size(), "partial_trace");
  if (static_cast<int>(systems.size()) == shape.size())
    throw DomainError("partial_trace over all subsystems; use the scalar trace");
  std::vector<int> kept = complement(systems, shape.size());
  auto ko = block_offsets(shape, kept);
  auto to = block_offsets(shape, systems);
  const Matrix& m = rho.matrix();
  const auto dk = static_cast<Eigen::Index>(ko.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex s = 0.0;
      for (std::uint64_t t : to)
        s += m(static_cast<Eigen::Index>(ko[i] + t), static_cast<Eigen::Index>(ko[j] + t));
      out(i, j) = s;
    }
  return DensityMatrix(shape.select(kept), std::move(out), Validation::skip);
}

Matrix partial_transpose(const SystemShape& shape, const Matrix& m, const std::vector<int>& block) {
  check_systems(block, shape.size(), "partial_transpose");
  if (block.empty() || static_cast<int>(block.size()) == shape.size())
    throw DomainError("partial_transpose needs a non-empty proper block");
  if (m.rows() != static_cast<Eigen::Index>(shape.total()) || m.cols() != m.rows())
    throw DomainError("matrix size does not match shape");
  auto bo = block_offsets(shape, block);
  auto ro = block_offsets(shape, complement(block, shape.size()));
  Matrix out(m.rows(), m.cols());
  for (std::uint64_t bi : bo)
    for (std::uint64_t bj : bo)
      for (std::uint64_t x : ro)
        for (std::uint64_t y : ro)
          out(static_cast<Eigen::Index>(bi + x), static_cast<Eigen::Index>(bj + y)) =
              m(static_cast<Eigen::Index>(bj + x), static_cast<Eigen::Index>(bi + y));
  return out;
}

Matrix partial_transpose(const DensityMatrix& rho, const std::vector<int>& block) {
  return partial_transpose(rho.shape(), rho.matrix(), block);
}

std::vector<double> hermitian_spectrum(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw DomainError("spectrum of a non-square matrix");
  if (m.size() > 0 && max_hermitian_defect(m) > tol) throw DomainError("spectrum input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

StateVector flip_all(const StateVector& psi) {
  psi.shape().local_dim();
  return StateVector(psi.shape(), psi.amplitudes().reverse());
}

DensityMatrix flip_all(const DensityMatrix& rho) {
  rho.shape().local_dim();
  // Flipping every digit maps flat index x to total - 1 - x.
  Matrix m = rho.matrix().reverse();
  return DensityMatrix(rho.shape(), std::move(m), Validation::skip);
}

DensityMatrix vec_to_dm(const StateVector& psi) {
  require_dense(psi.shape());
  Matrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityMatrix(psi.shape(), std::move(m), Validation::skip);
}

namespace {

Matrix local_product(const SystemShape& shape, std::span<const Matrix> unitaries) {
  if (static_cast<int>(unitaries.size()) != shape.size())
    throw DomainError("need one local unitary per subsystem");
  for (int i = 0; i < shape.size(); ++i) {
    const Matrix& u = unitaries[i];
    if (u.rows() != shape.dim(i) || u.cols() != shape.dim(i))
      throw DomainError("local unitary " + std::to_string(i + 1) + " has the wrong size");
    if ((u * u.adjoint() - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-9)
      throw DomainError("local operator " + std::to_string(i + 1) + " is not unitary");
  }
  return kron_all(unitaries);
}

}  // namespace

DensityMatrix apply_local_unitaries(const DensityMatrix& rho, std::span<const Matrix> unitaries) {
  require_dense(rho.shape());
  Matrix u = local_product(rho.shape(), unitaries);
  Matrix m = u * rho.matrix() * u.adjoint();
  return DensityMatrix(rho.shape(), std::move(m), Validation::skip);
}

StateVector apply_local_unitaries(const StateVector& psi, std::span<const Matrix> unitaries) {
  require_dense(psi.shape());
  Matrix u = local_product(psi.shape(), unitaries);
  Vector v = u * psi.amplitudes();
  return StateVector(psi.shape(), std::move(v));
}

double expectation(const DensityMatrix& rho, const Matrix& op) {
  if (op.rows() != rho.matrix().rows() || op.cols() != rho.matrix().cols())
    throw DomainError("operator size does not match state");
  return rho.matrix().cwiseProduct(op.transpose()).sum().real();
}

Matrix pauli(int k) {
  using namespace std::complex_literals;
  Matrix s(2, 2);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -1i, 1i, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DomainError("Pauli index must be 0..3");
  }
  return s;
}

}  // namespace hmgh
