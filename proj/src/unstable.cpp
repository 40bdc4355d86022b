#include "hmgh/unstable.hpp"

#include "hmgh/errors.hpp"
#include "hmgh/states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace hmgh {

void EffectiveOpParams::validate() const {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) throw DomainError("decay widths must be non-negative");
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
}

std::array<double, 3> bloch_vector(const EffectiveOpParams& p) {
  p.validate();
  const double g = 0.5 * (p.gamma1 + p.gamma2);
  const double dg = 0.5 * (p.gamma1 - p.gamma2);
  const double decay = std::exp(-g * p.t);
  return {decay * std::cos(p.t + p.phi) * std::sin(p.alpha), decay * std::sin(p.t + p.phi) * std::sin(p.alpha),
          decay * (std::sinh(dg * p.t) + std::cosh(dg * p.t) * std::cos(p.alpha))};
}

namespace {

double norm3(const std::array<double, 3>& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// <r| O |r> for a pure qubit state with Bloch vector r.
struct Affine {
  double offset;
  std::array<double, 3> n;
  explicit Affine(const EffectiveOpParams& p) : n(bloch_vector(p)) { offset = 1.0 - norm3(n); }
  double at(const std::array<double, 3>& r) const { return offset + dot3(n, r); }
};

std::array<double, 3> sphere(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Minimises f over R^2 from `start`; returns {argmin, value, converged}.
struct NmResult {
  std::array<double, 2> x;
  double value;
  bool converged;
};

NmResult nelder_mead(const std::function<double(const std::array<double, 2>&)>& f, std::array<double, 2> start,
                     double step, double tol, int max_iter) {
  std::array<std::array<double, 2>, 3> p{start, start, start};
  p[1][0] += step;
  p[2][1] += step;
  std::array<double, 3> v{f(p[0]), f(p[1]), f(p[2])};
  auto lerp = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double t) {
    return std::array<double, 2>{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return v[a] < v[b]; });
    const int best = o[0], mid = o[1], worst = o[2];
    const double size = std::max(std::hypot(p[mid][0] - p[best][0], p[mid][1] - p[best][1]),
                                 std::hypot(p[worst][0] - p[best][0], p[worst][1] - p[best][1]));
    if (v[worst] - v[best] <= tol && size <= 1e-9) return {p[best], v[best], true};
    const std::array<double, 2> c{0.5 * (p[best][0] + p[mid][0]), 0.5 * (p[best][1] + p[mid][1])};
    auto xr = lerp(c, p[worst], -1.0);
    double fr = f(xr);
    if (fr < v[best]) {
      auto xe = lerp(c, p[worst], -2.0);
      double fe = f(xe);
      if (fe < fr) { p[worst] = xe; v[worst] = fe; }
      else { p[worst] = xr; v[worst] = fr; }
    } else if (fr < v[mid]) {
      p[worst] = xr;
      v[worst] = fr;
    } else {
      auto xc = fr < v[worst] ? lerp(c, p[worst], -0.5) : lerp(c, p[worst], 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, v[worst])) {
        p[worst] = xc;
        v[worst] = fc;
      } else {
        for (int i : {mid, worst}) {
          p[i] = lerp(p[best], p[i], 0.5);
          v[i] = f(p[i]);
        }
      }
    }
  }
  int b = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  return {p[b], v[b], false};
}

}  // namespace

Matrix effective_operator(const EffectiveOpParams& p) {
  const auto n = bloch_vector(p);
  Matrix o = (1.0 - norm3(n)) * pauli(0);
  for (int i = 0; i < 3; ++i) o += n[i] * pauli(i + 1);
  return o;
}

ChshSettings ChshSettings::standard(double t, double gamma1, double gamma2) {
  const double pi = std::numbers::pi;
  return {{0.0, 0.0, t, gamma1, gamma2},
          {pi / 2, 0.0, t, gamma1, gamma2},
          {3 * pi / 4, pi, t, gamma1, gamma2},
          {3 * pi / 4, 0.0, t, gamma1, gamma2}};
}

Matrix chsh_operator(const ChshSettings& s) {
  const Matrix a1 = effective_operator(s.a1), a2 = effective_operator(s.a2);
  const Matrix b1 = effective_operator(s.b1), b2 = effective_operator(s.b2);
  return kron(a1, b1 + b2) + kron(a2, b1 - b2);
}

double singlet_value(const ChshSettings& s) {
  DensityMatrix rho = vec_to_dm(bell_state("psi-").to_dense());
  return expectation(rho, chsh_operator(s));
}

double product_value(const ChshSettings& s, const std::array<double, 3>& ra, const std::array<double, 3>& rb) {
  Affine a1(s.a1), a2(s.a2), b1(s.b1), b2(s.b2);
  return a1.at(ra) * (b1.at(rb) + b2.at(rb)) + a2.at(ra) * (b1.at(rb) - b2.at(rb));
}

ChshBound chsh_bound(const ChshSettings& s, const ChshBoundOptions& opts) {
  if (opts.theta_steps < 2 || opts.phi_steps < 1) throw DomainError("grid needs at least 2 x 1 points");
  Affine a1(s.a1), a2(s.a2), b1(s.b1), b2(s.b2);
  // For fixed r_A the value is c0 + c . r_B.
  auto coeffs = [&](const std::array<double, 3>& ra, double& c0, double& cn) {
    const double p = a1.at(ra) + a2.at(ra), q = a1.at(ra) - a2.at(ra);
    c0 = p * b1.offset + q * b2.offset;
    std::array<double, 3> c{};
    for (int i = 0; i < 3; ++i) c[i] = p * b1.n[i] + q * b2.n[i];
    cn = norm3(c);
  };
  auto upper = [&](const std::array<double, 2>& x) {
    double c0, cn;
    coeffs(sphere(x[0], x[1]), c0, cn);
    return c0 + cn;
  };
  auto lower = [&](const std::array<double, 2>& x) {
    double c0, cn;
    coeffs(sphere(x[0], x[1]), c0, cn);
    return c0 - cn;
  };
  const double pi = std::numbers::pi;
  double gmax = -INFINITY, gmin = INFINITY;
  std::array<double, 2> amax{}, amin{};
  for (int i = 0; i < opts.theta_steps; ++i) {
    const double theta = pi * i / (opts.theta_steps - 1);
    for (int j = 0; j < opts.phi_steps; ++j) {
      const std::array<double, 2> x{theta, 2 * pi * j / opts.phi_steps};
      const double hi = upper(x), lo = lower(x);
      if (hi > gmax) { gmax = hi; amax = x; }
      if (lo < gmin) { gmin = lo; amin = x; }
    }
  }
  ChshBound out{gmin, gmax, gmin, gmax, true};
  if (!opts.refine) return out;
  const double step = pi / opts.theta_steps;
  auto rmax = nelder_mead([&](const std::array<double, 2>& x) { return -upper(x); }, amax, step, opts.refine_tol,
                          opts.max_iterations);
  auto rmin = nelder_mead(lower, amin, step, opts.refine_tol, opts.max_iterations);
  out.b_plus = std::max(gmax, -rmax.value);
  out.b_minus = std::min(gmin, rmin.value);
  out.converged = rmax.converged && rmin.converged;
  return out;
}

}  // namespace hmgh
