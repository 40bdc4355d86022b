#include "hmgh/criteria.hpp"

#include "hmgh/density_io.hpp"
#include "hmgh/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>

namespace hmgh {

namespace {

double pop(const ElementProvider& rho, std::uint64_t x) { return std::max(0.0, rho.at(x, x).real()); }

// Flat index of the product state that takes `a`'s label where pick(site) is
// true and `b`'s label elsewhere.
template <class Pick>
std::uint64_t mix_index(const SystemShape& shape, const MultiIndex& a, const MultiIndex& b, Pick pick) {
  std::uint64_t x = 0;
  for (int s = 0; s < shape.size(); ++s) x += static_cast<std::uint64_t>(pick(s) ? a[s] : b[s]) * shape.stride(s);
  return x;
}

// Pairwise summation in fixed order; reproducible and tighter than a running sum.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

void finish(CriterionReport& r) { r.violated = r.value > r.tol; }

void require_qubits(const SystemShape& shape, const char* what) {
  if (!shape.is_uniform() || shape.dim(0) != 2) throw DomainError(std::string(what) + " needs a qubit system");
}

std::string fmt(double x) { return format_double(x); }

// All m-subsets of n sites as bit masks, increasing.
std::vector<std::uint64_t> subsets_of_size(int n, int m) {
  std::vector<std::uint64_t> out;
  if (m == 0) return {0};
  for (std::uint64_t s = (std::uint64_t{1} << m) - 1; s < (std::uint64_t{1} << n);) {
    out.push_back(s);
    std::uint64_t c = s & (~s + 1), r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return out;
}

// Flat index of the uniform-d product state with `hi` on mask sites and `lo` elsewhere.
std::uint64_t level_index(const SystemShape& shape, std::uint64_t mask, int hi, int lo) {
  std::uint64_t x = 0;
  for (int s = 0; s < shape.size(); ++s) x += static_cast<std::uint64_t>((mask >> s & 1) ? hi : lo) * shape.stride(s);
  return x;
}

}  // namespace

void validate(const ProbePair& probe, const SystemShape& shape) {
  validate(probe.a, shape);
  validate(probe.b, shape);
  for (int i = 0; i < shape.size(); ++i)
    if (probe.a[i] == probe.b[i])
      throw DomainError("probe labels must differ on every subsystem (site " + std::to_string(i + 1) + ")");
}

ProbePair parse_probe(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw DomainError("probe must look like 000,111");
  return {parse_multiindex(text.substr(0, comma)), parse_multiindex(text.substr(comma + 1))};
}

ProbePair uniform_probe(int n, int k, int l) { return {uniform_index(n, k), uniform_index(n, l)}; }

CriterionReport make_report(std::string name, double value, double tol) {
  CriterionReport r;
  r.name = std::move(name);
  r.value = value;
  r.tol = tol;
  finish(r);
  return r;
}

std::string report_to_json(const CriterionReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  if (r.probe)
    j["probe"] = {r.probe->a.to_string(), r.probe->b.to_string()};
  else
    j["probe"] = nullptr;
  // Keep 17 significant digits: emit the number through a raw string.
  j["value"] = "__VALUE__";
  j["violated"] = r.violated;
  j["tol"] = "__TOL__";
  if (!r.flags.empty()) j["flags"] = r.flags;
  std::string s = j.dump();
  auto put = [&](const std::string& key, double v) {
    auto pos = s.find("\"" + key + "\"");
    s.replace(pos, key.size() + 2, fmt(v));
  };
  put("__VALUE__", r.value);
  put("__TOL__", r.tol);
  return s;
}

CriterionReport ppt_check(const DensityMatrix& rho, const std::vector<int>& block) {
  require_dense(rho.shape());
  Matrix pt = partial_transpose(rho, block);
  auto spec = hermitian_spectrum(pt, 1e-8);
  CriterionReport r = make_report("ppt", -spec.front());
  std::string b;
  for (std::size_t i = 0; i < block.size(); ++i) b += (i ? "," : "") + std::to_string(block[i] + 1);
  r.params["block"] = b;
  r.params["min_eigenvalue"] = fmt(spec.front());
  return r;
}

CriterionReport hmgh_bipartite_value(const ElementProvider& rho, const ProbePair& probe) {
  if (rho.shape().size() != 2) throw DomainError("bipartite criterion needs exactly two subsystems");
  CriterionReport r = gme_value(rho, probe);
  r.name = "bipartite";
  return r;
}

CriterionReport gme_value(const ElementProvider& rho, const ProbePair& probe) {
  const SystemShape& shape = rho.shape();
  validate(probe, shape);
  const int n = shape.size();
  if (n < 2) throw DomainError("gme criterion needs at least two subsystems");
  require_partition_count(n, 2);
  const double coherence = std::abs(rho.at(encode(probe.a, shape), encode(probe.b, shape)));
  std::vector<double> terms;
  for_each_k_partition(n, 2, [&](const Partition& p) {
    auto g = p.assignment();
    double x = pop(rho, mix_index(shape, probe.a, probe.b, [&](int s) { return g[s] == 0; }));
    double y = pop(rho, mix_index(shape, probe.b, probe.a, [&](int s) { return g[s] == 0; }));
    terms.push_back(std::sqrt(x * y));
  });
  CriterionReport r = make_report("gme", coherence - pairwise_sum(terms));
  r.probe = probe;
  r.params["coherence"] = fmt(coherence);
  return r;
}

CriterionReport ksep_value(const ElementProvider& rho, int k, const ProbePair& probe, const KsepOptions& opts) {
  const SystemShape& shape = rho.shape();
  validate(probe, shape);
  const int n = shape.size();
  if (k < 2 || k > n) throw DomainError("ksep needs 2 <= k <= n");
  require_partition_count(n, k, opts.partition_cap);
  const double coherence = std::abs(rho.at(encode(probe.a, shape), encode(probe.b, shape)));
  const double root = 1.0 / (2.0 * k);
  std::vector<double> terms;
  for_each_k_partition(n, k, [&](const Partition& p) {
    auto g = p.assignment();
    double prod = 1.0;
    for (int blk = 0; blk < k && prod != 0.0; ++blk) {
      double x = pop(rho, mix_index(shape, probe.a, probe.b, [&](int s) { return g[s] == blk; }));
      double y = pop(rho, mix_index(shape, probe.b, probe.a, [&](int s) { return g[s] == blk; }));
      prod *= std::pow(x * y, root);
    }
    terms.push_back(prod);
  });
  const double lead = opts.normalisation == KsepNormalisation::doubled_coherence ? 2.0 * coherence : coherence;
  CriterionReport r = make_report("ksep", lead - pairwise_sum(terms));
  r.probe = probe;
  r.params["k"] = std::to_string(k);
  r.params["normalisation"] =
      opts.normalisation == KsepNormalisation::standard ? "standard" : "doubled_coherence";
  return r;
}

namespace {

// Shared body of the Dicke inequality and Qm. Returns the unnormalised sum
// for excitation size mu on a (possibly flipped) provider.
double dicke_sum(const ElementProvider& rho, int mu, int levels) {
  const SystemShape& shape = rho.shape();
  const int n = shape.size();
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  auto sets = subsets_of_size(n, mu);
  std::vector<double> terms;
  for (std::uint64_t a : sets) {
    for (std::uint64_t xs = a; xs; xs &= xs - 1) {
      const std::uint64_t x = xs & (~xs + 1);
      for (std::uint64_t ys = all & ~a; ys; ys &= ys - 1) {
        const std::uint64_t y = ys & (~ys + 1);
        const std::uint64_t b = (a & ~x) | y;
        for (int k = 0; k + 1 <= levels; ++k) {
          double coh = std::abs(rho.at(level_index(shape, a, k + 1, k), level_index(shape, b, k + 1, k)));
          double p1 = pop(rho, level_index(shape, a & b, k + 1, k));
          double p2 = pop(rho, level_index(shape, a | b, k + 1, k));
          terms.push_back(coh - std::sqrt(p1 * p2));
        }
        if (levels < 2) continue;
        // Cross-level terms, delta over subsets of comp(b) | a with 1..n-2 sites.
        const std::uint64_t u = (all & ~b) | a;
        std::vector<std::uint64_t> deltas;
        for (std::uint64_t d = u; d; d = (d - 1) & u) {
          int c = std::popcount(d);
          if (c >= 1 && c <= n - 2) deltas.push_back(d);
        }
        std::sort(deltas.begin(), deltas.end());
        for (int k = 0; k < levels; ++k)
          for (int l = 0; l < k; ++l) {
            auto label = [&](int s, std::uint64_t set, int lev) { return (set >> s & 1) ? lev + 1 : lev; };
            auto index = [&](auto f) {
              std::uint64_t idx = 0;
              for (int s = 0; s < n; ++s) idx += static_cast<std::uint64_t>(f(s)) * shape.stride(s);
              return idx;
            };
            std::uint64_t ra = index([&](int s) { return label(s, a, k); });
            std::uint64_t rb = index([&](int s) { return label(s, b, l); });
            double cross = std::abs(rho.at(ra, rb));
            for (std::uint64_t d : deltas) {
              std::uint64_t i1 = index([&](int s) { return (d >> s & 1) ? label(s, b, l) : label(s, a, k); });
              std::uint64_t i2 = index([&](int s) { return (d >> s & 1) ? label(s, a, k) : label(s, b, l); });
              cross -= std::sqrt(pop(rho, i1) * pop(rho, i2));
            }
            terms.push_back(2.0 * cross);
          }
      }
    }
  }
  double diag = 0.0;
  std::vector<double> pops;
  for (std::uint64_t a : sets)
    for (int k = 0; k < levels; ++k) pops.push_back(pop(rho, level_index(shape, a, k + 1, k)));
  diag = pairwise_sum(pops);
  return pairwise_sum(terms) - static_cast<double>(mu) * (n - mu - 1) * levels * diag;
}

}  // namespace

CriterionReport dicke_gme_value(const ElementProvider& rho, int m) {
  const SystemShape& shape = rho.shape();
  require_qubits(shape, "dicke criterion");
  const int n = shape.size();
  if (n > 62) throw DomainError("dicke criterion supports n <= 62");
  if (m < 1 || m > n - 1) throw DomainError("dicke criterion needs 1 <= m <= n-1");
  CriterionReport r;
  if (2 * m > n) {
    FlippedView flipped(rho);
    r = make_report("dicke", dicke_sum(flipped, n - m, 1));
    r.flags.push_back("flipped");
  } else {
    r = make_report("dicke", dicke_sum(rho, m, 1));
  }
  r.params["m"] = std::to_string(m);
  return r;
}

CriterionReport q0_value(const ElementProvider& rho, int f) {
  const SystemShape& shape = rho.shape();
  const int d = shape.local_dim();
  const int n = shape.size();
  if (f < 2 || f > d) throw DomainError("q0 needs 2 <= f <= d");
  require_partition_count(n, 2);
  std::vector<std::vector<int>> cuts;
  for_each_k_partition(n, 2, [&](const Partition& p) { cuts.push_back(p.assignment()); });
  std::vector<double> terms;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      if (k == l) continue;
      MultiIndex ak = uniform_index(n, k), bl = uniform_index(n, l);
      double t = std::abs(rho.at(encode(bl, shape), encode(ak, shape)));
      for (const auto& g : cuts) {
        double x = pop(rho, mix_index(shape, bl, ak, [&](int s) { return g[s] == 0; }));
        double y = pop(rho, mix_index(shape, ak, bl, [&](int s) { return g[s] == 0; }));
        t -= std::sqrt(x * y);
      }
      terms.push_back(t);
    }
  const double q0 = pairwise_sum(terms);
  CriterionReport r = make_report("q0", q0 - (f - 2));
  int best = 0;
  for (int g = 2; g <= d; ++g)
    if (q0 - (g - 2) > r.tol) best = g;
  r.params["f"] = std::to_string(f);
  r.params["Q0"] = fmt(q0);
  r.params["max_detected_f"] = std::to_string(best);
  return r;
}

CriterionReport qm_value(const ElementProvider& rho, int m, int f) {
  const SystemShape& shape = rho.shape();
  const int d = shape.local_dim();
  const int n = shape.size();
  if (n > 62) throw DomainError("qm supports n <= 62");
  if (m < 1 || m > n - 1) throw DomainError("qm needs 1 <= m <= n-1");
  if (f < 2 || f > d) throw DomainError("qm needs 2 <= f <= d");
  double qm;
  const bool flip = 2 * m > n;
  const int mu = flip ? n - m : m;
  if (flip) {
    FlippedView flipped(rho);
    qm = dicke_sum(flipped, mu, d - 1) / mu;
  } else {
    qm = dicke_sum(rho, mu, d - 1) / mu;
  }
  CriterionReport r = make_report("qm", qm - (f - 2));
  if (flip) r.flags.push_back("flipped");
  int best = 0;
  for (int g = 2; g <= d; ++g)
    if (qm - (g - 2) > r.tol) best = g;
  r.params["m"] = std::to_string(m);
  r.params["f"] = std::to_string(f);
  r.params["Qm"] = fmt(qm);
  r.params["max_detected_f"] = std::to_string(best);
  return r;
}

CriterionReport double_class_value(const ElementProvider& rho) {
  const SystemShape& shape = rho.shape();
  require_qubits(shape, "double-class inequality");
  const int n = shape.size();
  if (n < 3) throw DomainError("double-class inequality needs n >= 3");
  if (n > 62) throw DomainError("double-class inequality supports n <= 62");
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  auto idx = [&](std::uint64_t mask) { return level_index(shape, mask, 1, 0); };
  const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
  std::vector<double> terms;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::uint64_t wi = std::uint64_t{1} << i, wj = std::uint64_t{1} << j;
      if (i != j) {
        double coh = (rho.at(idx(wi), idx(wj)) + sign * rho.at(idx(all ^ wi), idx(all ^ wj))).real();
        terms.push_back(coh - (pop(rho, idx(wi | wj)) + pop(rho, idx(all ^ (wi | wj)))));
      } else {
        terms.push_back(-(n - 2) * (pop(rho, idx(wi)) + pop(rho, idx(all ^ wi))));
      }
    }
  terms.push_back(-0.5 * n * (n - 1) * (pop(rho, idx(0)) + pop(rho, idx(all))));
  return make_report("double_class", pairwise_sum(terms));
}

double ntuple_alpha(int n) {
  if (n < 3) throw DomainError("n-tuple inequality needs n >= 3");
  return n == 3 ? 1.5 : n == 4 ? 1.0 : 0.5;
}

CriterionReport ntuple_class_value(const ElementProvider& rho) {
  const SystemShape& shape = rho.shape();
  require_qubits(shape, "n-tuple inequality");
  const int n = shape.size();
  const double alpha = ntuple_alpha(n);
  const std::uint64_t last = shape.total() - 1;
  double v = rho.at(0, last).real() - alpha * (1.0 - pop(rho, 0) - pop(rho, last));
  CriterionReport r = make_report("ntuple_class", v);
  r.params["alpha"] = fmt(alpha);
  return r;
}

FidelityWitness ghz3_witness() { return {"ghz3", 0.75, ghz_state(3, 2)}; }
FidelityWitness w3_witness() { return {"w3", 2.0 / 3.0, w_state(3, 2)}; }

CriterionReport fidelity_witness_value(const ElementProvider& rho, const FidelityWitness& w) {
  if (!(rho.shape() == w.target.shape())) throw DomainError("witness shape does not match the state");
  Complex f = 0.0;
  for (const auto& [r, ar] : w.target.terms())
    for (const auto& [c, ac] : w.target.terms()) f += std::conj(ar) * rho.at(r, c) * ac;
  CriterionReport r = make_report("fidelity", f.real() - w.alpha);
  r.params["witness"] = w.name;
  r.params["alpha"] = fmt(w.alpha);
  r.params["fidelity"] = fmt(f.real());
  return r;
}

CriterionReport mlinear_value(const ElementProvider& rho, const std::vector<MultiIndex>& probes) {
  const SystemShape& shape = rho.shape();
  if (shape.size() != 2) throw DomainError("m-linear criterion needs exactly two subsystems");
  const std::size_t m = probes.size();
  if (m < 2) throw DomainError("m-linear criterion needs m >= 2 probes");
  for (const auto& p : probes) validate(p, shape);
  Complex chain = 1.0;
  double diag = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const MultiIndex& p = probes[i];
    const MultiIndex& q = probes[(i + 1) % m];
    chain *= rho.element(p, q);
    diag *= rho.population(MultiIndex{q[0], p[1]});
  }
  CriterionReport r;
  const double re = chain.real();
  if (re < 0.0) {
    r = make_report("mlinear", -std::sqrt(diag));
    r.flags.push_back("negative_radicand");
  } else {
    r = make_report("mlinear", std::sqrt(re) - std::sqrt(diag));
  }
  r.params["m"] = std::to_string(m);
  std::string list;
  for (std::size_t i = 0; i < m; ++i) list += (i ? ";" : "") + probes[i].to_string();
  r.params["probes"] = list;
  return r;
}

CriterionReport rank_m_determinant(const ElementProvider& rho, const std::vector<int>& i, const std::vector<int>& j) {
  const SystemShape& shape = rho.shape();
  if (shape.size() != 2) throw DomainError("determinant criterion needs exactly two subsystems");
  if (i.size() != j.size() || i.size() < 2) throw DomainError("determinant criterion needs m >= 2 index pairs");
  const int m = static_cast<int>(i.size());
  for (int s = 0; s < m; ++s) {
    if (i[s] < 0 || i[s] >= shape.dim(0) || j[s] < 0 || j[s] >= shape.dim(1))
      throw DomainError("determinant criterion index out of range");
  }
  auto repeated = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  std::string is, js;
  for (int s = 0; s < m; ++s) {
    is += (s ? "," : "") + std::to_string(i[s]);
    js += (s ? "," : "") + std::to_string(j[s]);
  }
  if (repeated(i) || repeated(j)) {
    CriterionReport r = make_report("rank_m_determinant", 0.0);
    r.flags.push_back("degenerate");
    r.params["i"] = is;
    r.params["j"] = js;
    return r;
  }
  Matrix mm(m, m);
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t) mm(s, t) = rho.element(MultiIndex{i[s], j[t]}, MultiIndex{i[t], j[s]});
  const Complex det = mm.determinant();
  CriterionReport r = make_report("rank_m_determinant", -det.real());
  r.params["m"] = std::to_string(m);
  r.params["i"] = is;
  r.params["j"] = js;
  r.params["det"] = fmt(det.real());
  return r;
}

}  // namespace hmgh
