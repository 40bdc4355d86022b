// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include "hmgh/applications.hpp"
#include "hmgh/criteria.hpp"
#include "hmgh/density_io.hpp"
#include "hmgh/manybody.hpp"
#include "hmgh/measures.hpp"
#include "hmgh/partitions.hpp"
#include "hmgh/states.hpp"
#include "hmgh/sweep.hpp"
#include "hmgh/unstable.hpp"
#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>

using namespace hmgh;
using Rational = boost::multiprecision::cpp_rational;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o{false, ""};
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

DensityMatrix dense(int n, const Matrix& m) { return DensityMatrix(SystemShape::uniform(n, 2), m, Validation::skip); }

ProbePair probe_of(const std::pair<std::vector<int>, std::vector<int>>& p) {
  return {MultiIndex(p.first), MultiIndex(p.second)};
}

double family_threshold(Family fam, int n, int d, int m, const CriterionSpec& c) {
  ThresholdSpec t;
  t.family = {fam, n, d, m, 0.0, 0.0};
  t.criterion = c;
  return threshold(t).value;
}

CriterionSpec crit(const std::string& name, int k = 2, int f = 2) {
  CriterionSpec c;
  c.name = name;
  c.k = k;
  c.f = f;
  return c;
}

Outcome ghz_thresholds() {
  struct Row {
    const char* label;
    CriterionSpec c;
    double expect;
  };
  const std::vector<Row> rows{{"Q0 f=4", crit("q0", 2, 4), 149.0 / 213},
                              {"Q0 f=3", crit("q0", 2, 3), 85.0 / 213},
                              {"Q0 f=2", crit("q0", 2, 2), 7.0 / 71},
                              {"ksep k=3", crit("ksep", 3), 3.0 / 35},
                              {"ksep k=4", crit("ksep", 4), 1.0 / 65},
                              {"ppt 1v3", crit("ppt"), 1.0 / 65}};
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const double x = family_threshold(Family::ghz_iso, 4, 4, 1, r.c);
    const double err = std::abs(x - r.expect);
    ok = ok && err < 1e-6;
    detail += std::string(r.label) + "=" + num(x) + " ";
  }
  // Every 1v3 cut gives the same PPT threshold.
  for (int site = 1; site < 4; ++site) {
    CriterionSpec c = crit("ppt");
    c.block = {site};
    ok = ok && std::abs(family_threshold(Family::ghz_iso, 4, 4, 1, c) - 1.0 / 65) < 1e-6;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, detail + "within 1e-6, " + num(secs) + " s"};
}

Outcome stirling() {
  bool ok = stirling2(4, 2) == 7 && stirling2(10, 3) == 9330;
  const double s208 = stirling2(20, 8).convert_to<double>();
  ok = ok && std::abs(s208 - 1.5e13) / 1.5e13 < 0.05;
  for (int n = 1; n <= 10; ++n)
    for (int k = 1; k <= n; ++k) {
      std::uint64_t count = 0;
      for_each_k_partition(n, k, [&](const Partition&) { ++count; });
      ok = ok && BigInt(count) == stirling2(n, k) && BigInt(count) == oracle::stirling_recurrence(n, k);
    }
  return {ok, "S(4,2)=7, S(10,3)=9330, S(20,8)=" + num(s208) + ", enumeration counts n<=10"};
}

Outcome dicke_anchor() {
  bool ok = true;
  std::string detail;
  for (auto [n, m] : {std::pair{3, 1}, {4, 1}, {4, 2}, {6, 3}, {8, 4}}) {
    const double v = dicke_gme_value(vec_to_dm(dicke_state(n, m).to_dense()), m).value;
    ok = ok && std::abs(v - m) < 1e-10;
  }
  detail += "anchors (3,1),(4,1),(4,2),(6,3),(8,4) = m; ";
  double worst = 0.0;
  for (int n = 3; n <= 8; ++n)
    for (int m = 1; m < n; ++m) {
      const auto p = family_state({Family::dicke_iso, n, 2, m, 0.7, 0.0});
      worst = std::max(worst, std::abs(dicke_gme_value(p, m).value - dicke_gme_value(p.to_dense(), m).value));
    }
  ok = ok && worst < 1e-12;
  detail += "provider vs dense max diff " + num(worst) + "; ";
  const auto t0 = Clock::now();
  const auto big = family_state({Family::dicke_iso, 20, 2, 1, 0.5, 0.0});
  const double v20 = dicke_gme_value(big, 1).value;
  const double secs = seconds_since(t0);
  const double expect20 = 0.5 - 0.5 * 20 * (2.0 * 20 - 3) / std::pow(2.0, 20);
  ok = ok && secs < 10.0 && std::abs(v20 - expect20) < 1e-12;
  detail += "n=20 value " + num(v20) + " in " + num(secs) + " s; ";
  // Threshold p decreases with n at m = 1, and matches n(2n-3)/(2^n + n(2n-3)).
  double prev = 2.0;
  for (int n : {4, 6, 8}) {
    const double p = family_threshold(Family::dicke_iso, n, 2, 1, crit("dicke"));
    const double pn = n * (2.0 * n - 3);
    ok = ok && p < prev && std::abs(p - pn / (std::pow(2.0, n) + pn)) < 1e-6;
    detail += "p*(" + std::to_string(n) + ")=" + num(p) + " ";
    prev = p;
  }
  return {ok, detail};
}

Outcome fidelity() {
  const double g = fidelity_witness_value(vec_to_dm(ghz_state(3, 2).to_dense()), ghz3_witness()).value;
  const double mixed =
      fidelity_witness_value(DensityMatrix::maximally_mixed(SystemShape::uniform(3, 2)), ghz3_witness()).value;
  const double w = fidelity_witness_value(vec_to_dm(w_state(3).to_dense()), w3_witness()).value;
  const bool ok = ghz3_witness().alpha == 0.75 && std::abs(w3_witness().alpha - 2.0 / 3) < 1e-15 &&
                  std::abs(g - 0.25) < 1e-12 && std::abs(mixed + 0.625) < 1e-12 && std::abs(w - 1.0 / 3) < 1e-12;
  return {ok, "alpha 3/4 and 2/3; GHZ3 " + num(g) + ", 1/8 " + num(mixed) + ", W3 " + num(w)};
}

Outcome soundness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> terms(1, 4);
  double worst = -1e300;
  int samples = 0;
  for (int n : {3, 4}) {
    for (int t = 0; t < 500; ++t, ++samples) {
      const DensityMatrix rho = dense(n, oracle::random_k_separable(std::vector<int>(n, 2), 2, terms(rng), rng));
      worst = std::max({worst, gme_value(rho, probe_of(oracle::random_qubit_probe(n, rng))).value,
                        dicke_gme_value(rho, 1).value, q0_value(rho, 2).value});
      const Matrix g = oracle::rotate_locally(oracle::random_ghz_class(n, rng), n, rng);
      const Matrix w = oracle::rotate_locally(oracle::random_w_class(n, rng), n, rng);
      worst = std::max({worst, double_class_value(dense(n, g)).value, ntuple_class_value(dense(n, w)).value});
    }
  }
  double worst_k = -1e300;
  int ksamples = 0;
  for (int t = 0; t < 500; ++t, ++ksamples) {
    const int n = 3 + t % 2;
    const int k = 2 + t % (n - 1);
    const Matrix m = oracle::random_k_separable(std::vector<int>(n, 2), k, terms(rng), rng);
    worst_k = std::max(worst_k, ksep_value(dense(n, m), k, probe_of(oracle::random_qubit_probe(n, rng))).value);
  }
  const double secs = seconds_since(t0);
  const bool ok = worst <= 1e-9 && worst_k <= 1e-9 && secs < 120.0;
  return {ok, std::to_string(samples) + " biseparable + class samples, max value " + num(worst) + "; " +
                  std::to_string(ksamples) + " k-separable samples, max " + num(worst_k)};
}

Outcome convexity() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CriterionSpec> specs;
  for (const char* name : {"ppt", "gme", "dicke", "q0", "qm", "double", "ntuple", "fidelity-ghz3", "fidelity-w3"})
    specs.push_back(crit(name));
  specs.push_back(crit("ksep", 3));
  double worst = -1e300;
  for (int t = 0; t < 200; ++t) {
    const Matrix a = oracle::random_mixed(8, 1 + t % 3, rng), b = oracle::random_mixed(8, 1 + t % 2, rng);
    const double l = u(rng);
    const DensityMatrix ra = dense(3, a), rb = dense(3, b), mix = dense(3, l * a + (1 - l) * b);
    for (const auto& c : specs) {
      const double gap = evaluate_criterion(c, mix).value -
                         (l * evaluate_criterion(c, ra).value + (1 - l) * evaluate_criterion(c, rb).value);
      worst = std::max(worst, gap);
    }
  }
  // Bipartite two-qutrit criterion on 3x3 states.
  for (int t = 0; t < 200; ++t) {
    const Matrix a = oracle::random_mixed(9, 2, rng), b = oracle::random_mixed(9, 2, rng);
    const double l = u(rng);
    auto v = [](const Matrix& m) {
      return hmgh_bipartite_value(DensityMatrix(SystemShape({3, 3}), m, Validation::skip), parse_probe("01,20")).value;
    };
    worst = std::max(worst, v(l * a + (1 - l) * b) - (l * v(a) + (1 - l) * v(b)));
  }
  return {worst <= 1e-9, "200 pairs x 11 criteria, max excess " + num(worst)};
}

Outcome cgme_bound() {
  std::mt19937_64 rng(99);
  const ProbePair probe = parse_probe("000,111");
  double worst = -1e300;
  for (int t = 0; t < 200; ++t) {
    const StateVector psi = random_pure_state(SystemShape::uniform(3, 2), rng);
    worst = std::max(worst, 2 * gme_value(vec_to_dm(psi), probe).value - cgme_pure(psi).value);
  }
  const StateVector ghz = ghz_state(3, 2).to_dense();
  const double eq = std::abs(2 * gme_value(vec_to_dm(ghz), probe).value - cgme_pure(ghz).value);
  return {worst <= 1e-9 && eq < 1e-9, "max(2 gme - cgme) " + num(worst) + ", GHZ3 gap " + num(eq)};
}

Outcome ppt_coincidence() {
  bool ok = true;
  std::string detail;
  for (auto [n, d] : {std::pair{3, 2}, {3, 3}, {3, 4}, {4, 2}, {4, 3}, {4, 4}}) {
    const double k = family_threshold(Family::ghz_iso, n, d, 1, crit("ksep", n));
    const double p = family_threshold(Family::ghz_iso, n, d, 1, crit("ppt"));
    ok = ok && std::abs(k - p) < 1e-6;
    detail += "(" + std::to_string(n) + "," + std::to_string(d) + ") " + num(k) + "/" + num(p) + " ";
  }
  return {ok, detail};
}

Outcome qss() {
  const char* reference[4][4] = {{"x+", "x-", "y+", "y-"},
                                 {"x-", "x+", "y-", "y+"},
                                 {"y-", "y+", "x-", "x+"},
                                 {"y+", "y-", "x+", "x-"}};
  const auto table = qss_table();
  int match = 0;
  std::string diff;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) {
      if (table[b][c].to_string() == reference[b][c]) {
        ++match;
      } else {
        diff += " B" + qss_labels()[b].to_string() + "/C" + qss_labels()[c].to_string() + "->" +
                table[b][c].to_string();
      }
    }
  const auto strings = qss_required_strings();
  const auto diag = std::count_if(strings.begin(), strings.end(), [](const PauliString& s) { return s.diagonal_only(); });

  // Term-for-term comparison of the seven tabulated expansions.
  using namespace std::complex_literals;
  auto ex = [](std::initializer_list<std::pair<const char*, Complex>> terms) {
    PauliExpansion out;
    for (auto [l, c] : terms) {
      PauliString s;
      for (const char* p = l; *p; ++p) s.labels.push_back(*p - '0');
      out[s] = c / 8.0;
    }
    return out;
  };
  auto diag_ex = [&](const int (&signs)[8]) {
    const char* order[8] = {"000", "003", "030", "300", "330", "303", "033", "333"};
    PauliExpansion out;
    for (int i = 0; i < 8; ++i) {
      PauliString s;
      for (const char* p = order[i]; *p; ++p) s.labels.push_back(*p - '0');
      out[s] = signs[i] / 8.0;
    }
    return out;
  };
  struct El {
    MultiIndex bra, ket;
    PauliExpansion ref;
  };
  const int s001[8] = {1, -1, 1, 1, 1, -1, -1, -1}, s110[8] = {1, 1, -1, -1, 1, 1, -1, 1},
            s010[8] = {1, 1, -1, 1, -1, 1, -1, -1}, s101[8] = {1, -1, 1, -1, -1, 1, -1, 1},
            s100[8] = {1, 1, 1, -1, -1, -1, 1, -1}, s011[8] = {1, -1, -1, 1, -1, -1, 1, 1};
  const std::vector<El> els{
      {{0, 0, 0}, {1, 1, 1}, ex({{"111", 1}, {"221", -1}, {"212", -1}, {"122", -1}, {"222", -1i}, {"112", 1i},
                                 {"121", 1i}, {"211", 1i}})},
      {{0, 0, 1}, {0, 0, 1}, diag_ex(s001)},
      {{1, 1, 0}, {1, 1, 0}, diag_ex(s110)},
      {{0, 1, 0}, {0, 1, 0}, diag_ex(s010)},
      {{1, 0, 1}, {1, 0, 1}, diag_ex(s101)},
      {{1, 0, 0}, {1, 0, 0}, diag_ex(s100)},
      {{0, 1, 1}, {0, 1, 1}, diag_ex(s011)}};
  int el_match = 0;
  std::string el_diff;
  for (const auto& e : els) {
    const auto mine = pauli_expansion(e.bra, e.ket);
    bool same = mine.size() == e.ref.size();
    for (const auto& [s, c] : e.ref) {
      auto it = mine.find(s);
      same = same && it != mine.end() && std::abs(it->second - c) < 1e-15;
      if (it != mine.end() && std::abs(it->second - c) >= 1e-15) el_diff += " " + e.bra.to_string() + s.to_string();
    }
    el_match += same;
  }
  const bool ok = match == 16 && diag == 8 && strings.size() == 16 && el_match == 7;
  return {ok, "table " + std::to_string(match) + "/16 (differs at" + diff + "); " + std::to_string(diag) + "/" +
                  std::to_string(strings.size()) + " strings diagonal-only; expansions " + std::to_string(el_match) +
                  "/7 (differs at" + el_diff + ")"};
}

Outcome manybody() {
  const auto t0 = Clock::now();
  const Lattice ring = Lattice::ring(6);
  bool ok = true;
  std::string detail;
  {
    const Matrix h = heisenberg_hamiltonian(ring, HeisenbergParams::anisotropic(0.0, 0.0));
    const auto rep = entanglement_gaps(h, 6);
    bool ordered = true;
    for (int k = 1; k < 6; ++k) ordered = ordered && rep.ksep(k) <= rep.ksep(k + 1) + 1e-12;
    const double gap2 = rep.ksep(2) - rep.e0;
    ok = ok && ordered && gap2 > 0;
    detail += "h=0: ordered=" + std::string(ordered ? "yes" : "no") + " E2sep-E0=" + num(gap2) + "; ";
  }
  for (double field : {3.0, -3.0}) {
    const Matrix h = heisenberg_hamiltonian(ring, HeisenbergParams::anisotropic(0.0, field));
    const auto rep = entanglement_gaps(h, 6);
    const auto gs = ground_state(h);
    const double diff = std::abs(rep.ksep(2) - rep.e0);
    const double c = gs.vector ? cgme_pure(*gs.vector).value : 1.0;
    ok = ok && diff < 1e-6 && c < 0.05;
    detail += "h=" + num(field) + ": |E2sep-E0|=" + num(diff) + " cgme=" + num(c) + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  return {ok, detail + "32 restarts"};
}

Outcome cv() {
  bool ok = true;
  int checked = 0;
  const Rational grid[10][3] = {{Rational(1), Rational(1), Rational(1)},   {Rational(1, 2), Rational(1), Rational(2)},
                                {Rational(2), Rational(3), Rational(1, 3)}, {Rational(3), Rational(2), Rational(1)},
                                {Rational(1, 3), Rational(5), Rational(7)}, {Rational(5, 2), Rational(5, 2), Rational(1, 2)},
                                {Rational(4), Rational(1), Rational(9)},    {Rational(1, 10), Rational(1, 10), Rational(3)},
                                {Rational(7, 3), Rational(9, 2), Rational(2, 5)}, {Rational(6), Rational(7), Rational(1, 7)}};
  for (const auto& g : grid) {
    const Rational d = g[0], delta = g[1], alpha = g[2];
    const auto r = cv_thresholds_formula<Rational>(d, delta, alpha);
    const bool always = d > delta;
    ok = ok && r.always_detected == always;
    if (!always) {
      const Rational gme = 3 * d * d * d * alpha * alpha / (3 * d * d * d * alpha * alpha + 2 * delta);
      const Rational ent = d * d * d * alpha * alpha / (d * d * d * alpha * alpha + 2 * delta);
      ok = ok && r.gme_p == gme && r.ent_p == ent && r.gme_p >= r.ent_p;
    }
    const auto f = cv_detection_thresholds(d.convert_to<double>(), delta.convert_to<double>(), alpha.convert_to<double>());
    ok = ok && f.always_detected == always;
    ++checked;
  }
  const auto one = cv_thresholds_formula<Rational>(Rational(1), Rational(1), Rational(1));
  ok = ok && one.gme_p == Rational(3, 5) && one.ent_p == Rational(1, 3);
  return {ok, std::to_string(checked) + "-point exact rational grid; d=delta=alpha=1 gives 3/5, 1/3"};
}

Outcome unstable() {
  bool ok = true;
  for (double alpha : {0.0, 0.4, 1.3, 2.9})
    for (double phi : {0.0, 1.1, 4.0}) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(effective_operator({alpha, phi, 0.0, 0.8, 1.7}));
      ok = ok && std::abs(es.eigenvalues()(0) + 1) < 1e-12 && std::abs(es.eigenvalues()(1) - 1) < 1e-12;
    }
  const bool reduces = ok;
  const auto s = ChshSettings::standard(0.0);
  const double singlet = singlet_value(s);
  const auto b = chsh_bound(s);
  const bool singlet_ok = std::abs(singlet - 2 * std::sqrt(2.0)) < 1e-9;
  const bool bound_ok = std::abs(b.b_plus - 2.0) < 1e-6;
  return {reduces && singlet_ok && bound_ok,
          std::string("t=0 eigenvalues +-1: ") + (reduces ? "yes" : "no") + "; singlet " + num(singlet) +
              "; B_plus " + num(b.b_plus) + " (target 2), B_minus " + num(b.b_minus)};
}

}  // namespace

int main() {
  run(1, "ghz-isotropic thresholds n=4 d=4", ghz_thresholds);
  run(2, "stirling counts", stirling);
  run(3, "dicke anchor and provider scaling", dicke_anchor);
  run(4, "fidelity witness constants", fidelity);
  run(5, "soundness on separable samples", soundness);
  run(6, "convexity", convexity);
  run(7, "gme-concurrence lower bound", cgme_bound);
  run(8, "ppt and k=n thresholds coincide", ppt_coincidence);
  run(9, "secret sharing table and expansions", qss);
  run(10, "many-body entanglement gaps", manybody);
  run(11, "continuous-variable thresholds", cv);
  run(12, "unstable-particle chsh", unstable);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
