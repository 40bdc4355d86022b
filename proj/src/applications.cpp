#include "hmgh/applications.hpp"

#include "hmgh/partitions.hpp"
#include "hmgh/states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace hmgh {

using namespace std::complex_literals;

std::string PauliString::to_string() const {
  std::string s = "[";
  for (int l : labels) s += static_cast<char>('0' + l);
  return s + "]";
}

bool PauliString::diagonal_only() const {
  return std::all_of(labels.begin(), labels.end(), [](int l) { return l == 0 || l == 3; });
}

Matrix pauli_factor(int k) {
  if (k == 2) {
    Matrix s(2, 2);
    s << 0, 1i, -1i, 0;
    return s;
  }
  return pauli(k);
}

Matrix pauli_operator(const PauliString& s) {
  std::vector<Matrix> f;
  for (int l : s.labels) f.push_back(pauli_factor(l));
  return kron_all(f);
}

PauliExpansion pauli_expansion(const MultiIndex& bra, const MultiIndex& ket) {
  if (bra.size() != ket.size() || bra.size() == 0) throw DomainError("bra and ket need the same qubit count");
  for (int i = 0; i < bra.size(); ++i)
    if (bra[i] < 0 || bra[i] > 1 || ket[i] < 0 || ket[i] > 1) throw DomainError("Pauli expansion needs qubit labels");
  // <bra|rho|ket> = tr(rho (x)_i |ket_i><bra_i|); expand each factor.
  std::vector<std::vector<std::pair<int, Complex>>> factors;
  for (int i = 0; i < bra.size(); ++i) {
    const int k = ket[i], b = bra[i];
    if (k == b)
      factors.push_back({{0, 0.5}, {3, k == 0 ? 0.5 : -0.5}});
    else if (k == 1)  // |1><0| = (s1 + i s2)/2
      factors.push_back({{1, 0.5}, {2, 0.5i}});
    else  // |0><1| = (s1 - i s2)/2
      factors.push_back({{1, 0.5}, {2, -0.5i}});
  }
  PauliExpansion out;
  std::vector<int> labels(bra.size());
  std::function<void(int, Complex)> rec = [&](int site, Complex c) {
    if (site == bra.size()) {
      out[PauliString{labels}] += c;
      return;
    }
    for (auto [l, v] : factors[site]) {
      labels[site] = l;
      rec(site + 1, c * v);
    }
  };
  rec(0, 1.0);
  return out;
}

double pauli_expectation(const DensityMatrix& rho, const PauliString& s) {
  const SystemShape& shape = rho.shape();
  if (!shape.is_uniform() || shape.dim(0) != 2) throw DomainError("Pauli expectations need qubits");
  const int n = shape.size();
  if (static_cast<int>(s.labels.size()) != n) throw DomainError("Pauli string length does not match the state");
  Complex sum = 0.0;
  for (std::uint64_t x = 0; x < shape.total(); ++x) {
    std::uint64_t y = x;
    Complex phase = 1.0;
    for (int i = 0; i < n; ++i) {
      const int bit = static_cast<int>((x >> (n - 1 - i)) & 1);
      const std::uint64_t m = std::uint64_t{1} << (n - 1 - i);
      switch (s.labels[i]) {
        case 0: break;
        case 1: y ^= m; break;
        case 2: y ^= m; phase *= bit ? 1i : -1i; break;  // s2|1> = i|0>, s2|0> = -i|1>
        case 3: if (bit) phase = -phase; break;
        default: throw DomainError("Pauli labels must be 0..3");
      }
    }
    // S|x> = phase |y>, so <x|rho S|x> = phase rho(x, y).
    sum += phase * rho.at(x, y);
  }
  return sum.real();
}

PauliExpectations pauli_expectations(const DensityMatrix& rho, const std::vector<PauliString>& strings) {
  PauliExpectations out;
  for (const auto& s : strings) out[s] = pauli_expectation(rho, s);
  return out;
}

Complex reconstruct_element(const PauliExpansion& expansion, const PauliExpectations& values) {
  Complex v = 0.0;
  std::vector<std::string> missing;
  for (const auto& [s, c] : expansion) {
    auto it = values.find(s);
    if (it == values.end()) {
      missing.push_back(s.to_string());
      continue;
    }
    v += c * it->second;
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : " ") + m;
    throw DomainError("missing Pauli expectations: " + list);
  }
  return v;
}

std::string QssLabel::to_string() const {
  return std::string(basis == QssBasis::x ? "x" : "y") + (sign > 0 ? "+" : "-");
}

const std::array<QssLabel, 4>& qss_labels() {
  static const std::array<QssLabel, 4> labels{
      QssLabel{QssBasis::x, 1}, QssLabel{QssBasis::x, -1}, QssLabel{QssBasis::y, 1}, QssLabel{QssBasis::y, -1}};
  return labels;
}

Vector qss_ket(const QssLabel& label) {
  Vector v(2);
  const double r = 1.0 / std::sqrt(2.0);
  v(0) = r;
  v(1) = label.basis == QssBasis::x ? Complex(label.sign * r) : Complex(0.0, label.sign * r);
  return v;
}

namespace {

Matrix alice_block(const DensityMatrix& resource, const Vector& b, const Vector& c) {
  if (!(resource.shape() == SystemShape::uniform(3, 2))) throw DomainError("secret sharing needs three qubits");
  Matrix out = Matrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s)
              out(i, j) += std::conj(b(p)) * std::conj(c(q)) * resource.at(4 * i + 2 * p + q, 4 * j + 2 * r + s) *
                           b(r) * c(s);
  return out;
}

QssLabel identify(const Vector& v) {
  QssLabel best = qss_labels()[0];
  double fid = -1.0;
  for (const auto& l : qss_labels()) {
    double f = std::norm(qss_ket(l).dot(v));
    if (f > fid + 1e-12) {
      fid = f;
      best = l;
    }
  }
  return best;
}

int label_slot(const QssLabel& l) { return (l.basis == QssBasis::x ? 0 : 2) + (l.sign > 0 ? 0 : 1); }

}  // namespace

Vector qss_conditional_state(const DensityMatrix& resource, const QssLabel& bob, const QssLabel& charlie) {
  Matrix a = alice_block(resource, qss_ket(bob), qss_ket(charlie));
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()));
  if (es.eigenvalues()(1) <= 0.0) throw DomainError("outcome pair has zero probability on this resource");
  return es.eigenvectors().col(1);
}

std::array<std::array<QssLabel, 4>, 4> qss_table() {
  DensityMatrix ghz = vec_to_dm(ghz_state(3, 2).to_dense());
  std::array<std::array<QssLabel, 4>, 4> t{};
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) t[b][c] = identify(qss_conditional_state(ghz, qss_labels()[b], qss_labels()[c]));
  return t;
}

namespace {

const std::array<std::array<QssLabel, 4>, 4>& cached_table() {
  static const auto t = qss_table();
  return t;
}

// Joint outcome distribution for fixed bases, outcomes indexed by 4a + 2b + c (0 = '+').
std::array<double, 8> outcome_probabilities(const DensityMatrix& rho, const std::array<QssBasis, 3>& bases) {
  std::array<double, 8> p{};
  for (int o = 0; o < 8; ++o) {
    std::vector<Matrix> kets;
    for (int party = 0; party < 3; ++party) {
      const int sign = (o >> (2 - party) & 1) ? -1 : 1;
      kets.push_back(qss_ket({bases[party], sign}));
    }
    Matrix v = kron_all(kets);
    p[o] = std::max(0.0, (v.adjoint() * rho.matrix() * v)(0, 0).real());
  }
  return p;
}

QssRound play(std::mt19937_64& rng, const std::array<std::array<double, 8>, 8>& table) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QssRound r{};
  int config = 0;
  for (int party = 0; party < 3; ++party) {
    r.bases[party] = coin(rng) ? QssBasis::y : QssBasis::x;
    config = 2 * config + (r.bases[party] == QssBasis::y);
  }
  const auto& p = table[config];
  double x = u(rng), acc = 0.0;
  int o = 7;
  for (int i = 0; i < 8; ++i) {
    acc += p[i];
    if (x < acc) {
      o = i;
      break;
    }
  }
  for (int party = 0; party < 3; ++party) r.outcomes[party] = (o >> (2 - party) & 1) ? -1 : 1;
  QssLabel bob{r.bases[1], r.outcomes[1]}, charlie{r.bases[2], r.outcomes[2]};
  r.predicted = cached_table()[label_slot(bob)][label_slot(charlie)];
  r.sifted = r.bases[0] == r.predicted.basis;
  r.agrees = r.sifted && r.outcomes[0] == r.predicted.sign;
  return r;
}

std::array<std::array<double, 8>, 8> all_probabilities(const DensityMatrix& rho) {
  std::array<std::array<double, 8>, 8> t{};
  for (int config = 0; config < 8; ++config) {
    std::array<QssBasis, 3> bases{};
    for (int party = 0; party < 3; ++party) bases[party] = (config >> (2 - party) & 1) ? QssBasis::y : QssBasis::x;
    t[config] = outcome_probabilities(rho, bases);
  }
  return t;
}

DensityMatrix product_plus_state() {
  const double r = 1.0 / std::sqrt(2.0);
  Vector plus(2);
  plus << r, r;
  Matrix v = kron_all({Matrix(plus), Matrix(plus), Matrix(plus)});
  return DensityMatrix(SystemShape::uniform(3, 2), v * v.adjoint());
}

}  // namespace

QssRound qss_round(std::mt19937_64& rng, const DensityMatrix& resource) {
  if (!(resource.shape() == SystemShape::uniform(3, 2))) throw DomainError("secret sharing needs three qubits");
  return play(rng, all_probabilities(resource));
}

QssRound qss_round(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return qss_round(rng, vec_to_dm(ghz_state(3, 2).to_dense()));
}

std::vector<PauliString> qss_required_strings() {
  std::set<PauliString> all;
  auto add = [&](const MultiIndex& bra, const MultiIndex& ket) {
    for (const auto& [s, c] : pauli_expansion(bra, ket))
      if (std::abs(c) > 0) all.insert(s);
  };
  add({0, 0, 0}, {1, 1, 1});
  for (int site = 0; site < 3; ++site) {
    MultiIndex a{0, 0, 0}, b{1, 1, 1};
    a[site] = 1;
    b[site] = 0;
    add(a, a);
    add(b, b);
  }
  return {all.begin(), all.end()};
}

CriterionReport qss_verification_value(const PauliExpectations& e) {
  std::vector<std::string> missing;
  for (const auto& s : qss_required_strings())
    if (!e.count(s)) missing.push_back(s.to_string());
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : " ") + m;
    throw DomainError("missing Pauli expectations: " + list);
  }
  auto element = [&](const MultiIndex& bra, const MultiIndex& ket) {
    return reconstruct_element(pauli_expansion(bra, ket), e);
  };
  double v = std::abs(element({0, 0, 0}, {1, 1, 1}));
  // Cuts {1|23}, {2|13}, {3|12}: one site flipped against the rest.
  for (int site = 2; site >= 0; --site) {
    MultiIndex a{0, 0, 0}, b{1, 1, 1};
    a[site] = 1;
    b[site] = 0;
    v -= std::sqrt(std::max(0.0, element(a, a).real()) * std::max(0.0, element(b, b).real()));
  }
  CriterionReport r = make_report("qss_verification", v);
  r.probe = ProbePair{{0, 0, 0}, {1, 1, 1}};
  return r;
}

PauliExpectations sampled_expectations(const DensityMatrix& rho, const std::vector<PauliString>& strings,
                                       std::uint64_t shots, std::mt19937_64& rng) {
  if (shots == 0) throw DomainError("sampling needs at least one shot");
  PauliExpectations out;
  for (const auto& s : strings) {
    const double exact = pauli_expectation(rho, s);
    const double p = std::clamp(0.5 * (1.0 + exact), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> bin(shots, p);
    out[s] = 2.0 * static_cast<double>(bin(rng)) / static_cast<double>(shots) - 1.0;
  }
  return out;
}

QssSummary qss_simulate(std::uint64_t rounds, std::uint64_t seed, bool eavesdrop, std::uint64_t shots) {
  const DensityMatrix resource = eavesdrop ? product_plus_state() : vec_to_dm(ghz_state(3, 2).to_dense());
  const auto probs = all_probabilities(resource);
  std::mt19937_64 rng(seed);
  QssSummary out;
  out.rounds = rounds;
  out.eavesdrop = eavesdrop;
  for (std::uint64_t i = 0; i < rounds; ++i) {
    QssRound r = play(rng, probs);
    if (r.sifted) {
      ++out.sifted;
      if (!r.agrees) ++out.errors;
    }
  }
  const auto strings = qss_required_strings();
  out.expectations = shots ? sampled_expectations(resource, strings, shots, rng) : pauli_expectations(resource, strings);
  out.verification = qss_verification_value(out.expectations);
  return out;
}

ErrorBudget error_bound(double o, double delta, int n, int k) {
  if (!(o >= 0.0) || !(delta >= 0.0)) throw DomainError("error bound needs o, delta >= 0");
  if (k < 2 || k > n) throw DomainError("error bound needs 2 <= k <= n");
  const double gamma = stirling2(n, k).convert_to<double>();
  const double xi = std::sqrt(o * o + delta * delta * gamma / (8.0 * k * k * k));
  return {o, delta, n, k, xi};
}

CvThresholds cv_detection_thresholds(double d, double delta, double alpha) {
  return cv_thresholds_formula<double>(d, delta, alpha);
}

}  // namespace hmgh
