#include "hmgh/states.hpp"

#include "hmgh/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hmgh {

SparseState::SparseState(SystemShape shape, std::vector<std::pair<std::uint64_t, Complex>> terms)
    : shape_(std::move(shape)) {
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double norm2 = 0.0;
  for (const auto& [index, amp] : terms) {
    if (index >= shape_.total()) throw DomainError("sparse amplitude index out of range");
    if (amp == Complex(0.0)) continue;
    if (!terms_.empty() && terms_.back().first == index)
      terms_.back().second += amp;
    else
      terms_.emplace_back(index, amp);
  }
  for (const auto& t : terms_) norm2 += std::norm(t.second);
  if (norm2 == 0.0) throw DomainError("zero state vector");
  if (std::abs(std::sqrt(norm2) - 1.0) > kStateTol) throw DomainError("sparse state is not normalised");
  lookup_.reserve(terms_.size());
  for (const auto& t : terms_) lookup_.emplace(t.first, t.second);
}

Complex SparseState::amplitude(std::uint64_t index) const {
  auto it = lookup_.find(index);
  return it == lookup_.end() ? Complex(0.0) : it->second;
}

StateVector SparseState::to_dense() const {
  require_dense(shape_);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(shape_.total()));
  for (const auto& [index, amp] : terms_) v(static_cast<Eigen::Index>(index)) = amp;
  return StateVector(shape_, std::move(v));
}

MixtureProvider::MixtureProvider(SystemShape shape, std::vector<Term> terms, double noise)
    : shape_(std::move(shape)), terms_(std::move(terms)), noise_(noise) {
  double total = noise_;
  if (noise_ < -1e-15) throw DomainError("negative noise weight");
  for (const auto& t : terms_) {
    if (!(t.state.shape() == shape_)) throw DomainError("mixture term has the wrong shape");
    if (t.weight < -1e-15) throw DomainError("negative mixture weight");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("mixture weights must sum to 1");
}

Complex MixtureProvider::at(std::uint64_t row, std::uint64_t col) const {
  Complex v = 0.0;
  for (const auto& t : terms_) {
    if (t.weight == 0.0) continue;
    Complex a = t.state.amplitude(row);
    if (a == Complex(0.0)) continue;
    v += t.weight * a * std::conj(t.state.amplitude(col));
  }
  if (row == col) v += noise_ / static_cast<double>(shape_.total());
  return v;
}

DensityMatrix MixtureProvider::to_dense(std::uint64_t max_dim) const {
  require_dense(shape_, max_dim);
  const auto total = static_cast<Eigen::Index>(shape_.total());
  Matrix m = Matrix::Zero(total, total);
  m.diagonal().setConstant(noise_ / static_cast<double>(total));
  for (const auto& t : terms_)
    for (const auto& [r, ar] : t.state.terms())
      for (const auto& [c, ac] : t.state.terms())
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += t.weight * ar * std::conj(ac);
  return DensityMatrix(shape_, std::move(m), Validation::skip);
}

FlippedView::FlippedView(const ElementProvider& inner) : inner_(inner), last_(inner.shape().total() - 1) {
  inner.shape().local_dim();
}

StateKind parse_state_kind(const std::string& name) {
  if (name == "ghz") return StateKind::ghz;
  if (name == "w") return StateKind::w;
  if (name == "dicke") return StateKind::dicke;
  if (name == "smolin") return StateKind::smolin;
  if (name == "bell") return StateKind::bell;
  if (name == "basis" || name == "basis-product") return StateKind::basis_product;
  throw DomainError("unknown state kind '" + name + "'");
}

SparseState ghz_state(int n, int d) {
  SystemShape shape = SystemShape::uniform(n, d);
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) terms.emplace_back(encode(uniform_index(n, i), shape), amp);
  return SparseState(shape, std::move(terms));
}

SparseState dicke_state(int n, int m, int d) {
  if (n < 2 || m < 1 || m > n - 1) throw DomainError("Dicke state needs 1 <= m <= n-1");
  if (n > 62) throw DomainError("Dicke state supports n <= 62");
  SystemShape shape = SystemShape::uniform(n, d);
  std::vector<std::pair<std::uint64_t, Complex>> terms;
  // Enumerate m-subsets as bit masks in increasing order (Gosper's hack).
  std::vector<std::uint64_t> masks;
  for (std::uint64_t s = (std::uint64_t{1} << m) - 1; s < (std::uint64_t{1} << n);) {
    masks.push_back(s);
    std::uint64_t c = s & (~s + 1), r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  const double amp = 1.0 / std::sqrt(static_cast<double>(masks.size()) * (d - 1));
  for (int j = 0; j + 1 < d; ++j)
    for (std::uint64_t mask : masks) {
      std::vector<int> labels(n, j);
      for (int site = 0; site < n; ++site)
        if (mask >> site & 1) labels[site] = j + 1;
      terms.emplace_back(encode(MultiIndex(std::move(labels)), shape), amp);
    }
  return SparseState(shape, std::move(terms));
}

SparseState w_state(int n, int d) { return dicke_state(n, 1, d); }

SparseState bell_state(const std::string& label) {
  SystemShape shape = SystemShape::uniform(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  if (label == "phi+") return SparseState(shape, {{0, r}, {3, r}});
  if (label == "phi-") return SparseState(shape, {{0, r}, {3, -r}});
  if (label == "psi+") return SparseState(shape, {{1, r}, {2, r}});
  if (label == "psi-") return SparseState(shape, {{1, r}, {2, -r}});
  throw DomainError("unknown Bell label '" + label + "' (phi+, phi-, psi+, psi-)");
}

DensityMatrix smolin_state() {
  Matrix m = Matrix::Zero(16, 16);
  for (const char* label : {"phi+", "phi-", "psi+", "psi-"}) {
    DensityMatrix b = vec_to_dm(bell_state(label).to_dense());
    m += 0.25 * kron(b.matrix(), b.matrix());
  }
  return DensityMatrix(SystemShape::uniform(4, 2), std::move(m));
}

SparseState make_sparse_state(const StateSpec& spec) {
  switch (spec.kind) {
    case StateKind::ghz: return ghz_state(spec.n, spec.d);
    case StateKind::w: return w_state(spec.n, spec.d);
    case StateKind::dicke: return dicke_state(spec.n, spec.m, spec.d);
    case StateKind::bell: return bell_state(spec.bell);
    case StateKind::basis_product: {
      SystemShape shape = SystemShape::uniform(spec.basis.size() ? spec.basis.size() : spec.n, spec.d);
      return SparseState(shape, {{encode(spec.basis, shape), 1.0}});
    }
    case StateKind::smolin: break;
  }
  throw DomainError("the Smolin state is mixed; use make_density");
}

std::variant<StateVector, DensityMatrix> make_state(const StateSpec& spec) {
  if (spec.kind == StateKind::smolin) return smolin_state();
  return make_sparse_state(spec).to_dense();
}

DensityMatrix make_density(const StateSpec& spec) {
  if (spec.kind == StateKind::smolin) return smolin_state();
  return vec_to_dm(make_sparse_state(spec).to_dense());
}

DensityMatrix mix_white_noise(const DensityMatrix& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("noise mixing weight must lie in [0, 1]");
  const auto total = static_cast<Eigen::Index>(rho.shape().total());
  Matrix m = p * rho.matrix();
  m.diagonal().array() += (1.0 - p) / static_cast<double>(total);
  return DensityMatrix(rho.shape(), std::move(m), Validation::skip);
}

Family parse_family(const std::string& name) {
  if (name == "ghz-iso") return Family::ghz_iso;
  if (name == "dicke-iso") return Family::dicke_iso;
  if (name == "ghz-w") return Family::ghz_w;
  if (name == "gmd") return Family::gmd;
  throw DomainError("unknown family '" + name + "' (ghz-iso, dicke-iso, ghz-w, gmd)");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::ghz_iso: return "ghz-iso";
    case Family::dicke_iso: return "dicke-iso";
    case Family::ghz_w: return "ghz-w";
    case Family::gmd: return "gmd";
  }
  return "?";
}

MixtureProvider family_state(const FamilySpec& spec) {
  const double a = spec.alpha, b = spec.beta;
  const bool two_weights = spec.family == Family::ghz_w || spec.family == Family::gmd;
  const double used = two_weights ? a + b : a;
  if (!(a >= 0.0) || !(b >= 0.0) || !(used <= 1.0 + 1e-15))
    throw DomainError("family weights must satisfy alpha, beta >= 0 and alpha + beta <= 1");
  if (!two_weights && b != 0.0) throw DomainError("family " + family_name(spec.family) + " takes no beta");
  const double noise = std::max(0.0, 1.0 - used);
  switch (spec.family) {
    case Family::ghz_iso:
      return MixtureProvider(SystemShape::uniform(spec.n, spec.d), {{a, ghz_state(spec.n, spec.d)}}, noise);
    case Family::dicke_iso:
      return MixtureProvider(SystemShape::uniform(spec.n, spec.d), {{a, dicke_state(spec.n, spec.m, spec.d)}},
                             noise);
    case Family::ghz_w:
      if (spec.d != 2) throw DomainError("ghz-w is a qubit family; use gmd for qudits");
      [[fallthrough]];
    case Family::gmd:
      return MixtureProvider(SystemShape::uniform(spec.n, spec.d),
                             {{a, ghz_state(spec.n, spec.d)}, {b, w_state(spec.n, spec.d)}}, noise);
  }
  throw DomainError("unknown family");
}

StateVector random_pure_state(const SystemShape& shape, std::mt19937_64& rng) {
  require_dense(shape);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(shape.total()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), g(rng));
  v /= v.norm();
  return StateVector(shape, std::move(v));
}

Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = Complex(g(rng), g(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (int j = 0; j < d; ++j) {
    Complex diag = r(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

DensityMatrix random_density(const SystemShape& shape, std::mt19937_64& rng, int rank) {
  require_dense(shape);
  const auto total = static_cast<Eigen::Index>(shape.total());
  if (rank <= 0) rank = static_cast<int>(total);
  std::exponential_distribution<double> expo(1.0);
  Matrix m = Matrix::Zero(total, total);
  double wsum = 0.0;
  std::vector<double> w(rank);
  for (double& x : w) wsum += (x = expo(rng));
  for (int i = 0; i < rank; ++i) {
    StateVector psi = random_pure_state(shape, rng);
    m += (w[i] / wsum) * psi.amplitudes() * psi.amplitudes().adjoint();
  }
  return DensityMatrix(shape, std::move(m), Validation::skip);
}

}  // namespace hmgh
