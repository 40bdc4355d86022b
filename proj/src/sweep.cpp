#include "hmgh/sweep.hpp"

#include "hmgh/density_io.hpp"
#include "hmgh/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace hmgh {

namespace {

const DensityMatrix& dense_of(const ElementProvider& rho, std::optional<DensityMatrix>& storage) {
  if (auto dm = dynamic_cast<const DensityMatrix*>(&rho)) return *dm;
  if (auto mix = dynamic_cast<const MixtureProvider*>(&rho)) return storage.emplace(mix->to_dense());
  throw DomainError("criterion needs a dense state");
}

ProbePair default_probe(const SystemShape& shape) {
  if (!shape.is_uniform()) throw DomainError("mixed local dimensions need an explicit probe");
  return uniform_probe(shape.size(), 0, shape.dim(0) - 1);
}

}  // namespace

CriterionReport evaluate_criterion(const CriterionSpec& c, const ElementProvider& rho) {
  const SystemShape& shape = rho.shape();
  auto probe = [&] { return c.probe ? *c.probe : default_probe(shape); };
  std::optional<DensityMatrix> storage;
  const std::string& n = c.name;
  if (n == "ppt") return ppt_check(dense_of(rho, storage), c.block);
  if (n == "bipartite") return hmgh_bipartite_value(rho, probe());
  if (n == "gme") return gme_value(rho, probe());
  if (n == "ksep") return ksep_value(rho, c.k, probe(), {c.normalisation, kDefaultPartitionCap});
  if (n == "dicke") return dicke_gme_value(rho, c.m);
  if (n == "q0") return q0_value(rho, c.f);
  if (n == "qm") return qm_value(rho, c.m, c.f);
  if (n == "double") return double_class_value(rho);
  if (n == "ntuple") return ntuple_class_value(rho);
  if (n == "fidelity-ghz3") return fidelity_witness_value(rho, ghz3_witness());
  if (n == "fidelity-w3") return fidelity_witness_value(rho, w3_witness());
  if (n == "mlinear") return mlinear_value(rho, c.chain);
  if (n == "det") return rank_m_determinant(rho, c.det_i, c.det_j);
  throw DomainError("unknown criterion '" + n + "'");
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "alpha") return SweepVariable::alpha;
  if (name == "beta") return SweepVariable::beta;
  throw DomainError("sweep variable must be alpha or beta");
}

CriterionReport evaluate_at(const FamilySpec& family, SweepVariable variable, double x,
                            const CriterionSpec& criterion) {
  FamilySpec f = family;
  (variable == SweepVariable::alpha ? f.alpha : f.beta) = x;
  return evaluate_criterion(criterion, family_state(f));
}

std::vector<double> scan_grid(const ScanSpec& spec) {
  if (!spec.points.empty()) {
    std::vector<double> pts = spec.points;
    std::sort(pts.begin(), pts.end());
    return pts;
  }
  if (!(spec.step > 0.0)) throw DomainError("scan step must be positive");
  if (!std::isfinite(spec.start) || !std::isfinite(spec.stop)) throw DomainError("scan range must be finite");
  std::vector<double> pts;
  if (spec.start > spec.stop) return pts;
  const auto count = static_cast<std::int64_t>(std::floor((spec.stop - spec.start) / spec.step + 1e-9)) + 1;
  if (count > 10'000'000) throw ResourceError("scan grid too large", static_cast<std::uint64_t>(count));
  for (std::int64_t i = 0; i < count; ++i) pts.push_back(std::min(spec.stop, spec.start + i * spec.step));
  return pts;
}

std::vector<ScanRow> scan(const ScanSpec& spec) {
  const std::vector<double> pts = scan_grid(spec);
  std::vector<ScanRow> rows(pts.size());
  if (pts.empty()) return rows;
  // Shape problems surface here, before any worker starts.
  {
    FamilySpec probe_family = spec.family;
    (spec.variable == SweepVariable::alpha ? probe_family.alpha : probe_family.beta) = pts.front();
    auto r = evaluate_criterion(spec.criterion, family_state(probe_family));
    rows[0] = {pts[0], r.value, r.violated};
  }
  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(pts.size()));
  std::atomic<std::size_t> next{1};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      try {
        auto r = evaluate_at(spec.family, spec.variable, pts[i], spec.criterion);
        rows[i] = {pts[i], r.value, r.violated};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out << "param,value,violated\n";
  for (const auto& r : rows) out << format_double(r.param) << ',' << format_double(r.value) << ',' << r.violated << '\n';
  return out.str();
}

ThresholdResult threshold(const ThresholdSpec& spec) {
  if (!(spec.lo < spec.hi)) throw DomainError("threshold bracket needs lo < hi");
  if (!(spec.tol > 0.0)) throw DomainError("threshold tolerance must be positive");
  auto status = [&](double x) { return evaluate_at(spec.family, spec.variable, x, spec.criterion).violated; };
  double lo = spec.lo, hi = spec.hi;
  const bool s_lo = status(lo), s_hi = status(hi);
  if (s_lo == s_hi) throw DomainError("detection status does not change inside the bracket");
  int it = 0;
  while (hi - lo > spec.tol) {
    if (it == spec.max_iterations) throw ConvergenceError("bisection did not reach the tolerance");
    const double mid = 0.5 * (lo + hi);
    (status(mid) == s_lo ? lo : hi) = mid;
    ++it;
  }
  return {0.5 * (lo + hi), lo, hi, it, s_hi};
}

}  // namespace hmgh
