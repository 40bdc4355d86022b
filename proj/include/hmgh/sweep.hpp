#pragma once

#include "hmgh/criteria.hpp"
#include "hmgh/states.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hmgh {

// A criterion by name plus whatever parameters it needs. Names: ppt, bipartite,
// gme, ksep, dicke, q0, qm, double, ntuple, fidelity-ghz3, fidelity-w3,
// mlinear, det.
struct CriterionSpec {
  std::string name = "gme";
  int k = 2;
  int f = 2;
  int m = 1;
  std::vector<int> block{0};              // ppt, 0-based sites
  std::optional<ProbePair> probe;         // default: all-0 versus all-(d-1)
  KsepNormalisation normalisation = KsepNormalisation::standard;
  std::vector<MultiIndex> chain;          // mlinear
  std::vector<int> det_i, det_j;          // det
};

CriterionReport evaluate_criterion(const CriterionSpec& spec, const ElementProvider& rho);

enum class SweepVariable { alpha, beta };
SweepVariable parse_sweep_variable(const std::string& name);

struct ScanSpec {
  FamilySpec family;
  CriterionSpec criterion;
  SweepVariable variable = SweepVariable::alpha;
  double start = 0.0;
  double stop = 1.0;
  double step = 0.01;
  std::vector<double> points;  // used instead of the range when nonempty
  int threads = 0;             // 0: hardware concurrency
};

struct ScanRow {
  double param;
  double value;
  bool violated;
};

// Grid points of `spec` in ascending order; start > stop yields none.
std::vector<double> scan_grid(const ScanSpec& spec);
std::vector<ScanRow> scan(const ScanSpec& spec);
std::string scan_csv(const std::vector<ScanRow>& rows);

struct ThresholdSpec {
  FamilySpec family;
  CriterionSpec criterion;
  SweepVariable variable = SweepVariable::alpha;
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-8;
  int max_iterations = 60;
};

struct ThresholdResult {
  double value;  // midpoint of the final bracket
  double lo, hi;
  int iterations;
  bool violated_above;  // detection holds on the hi side
};

// Bisection on the detection status. Throws DomainError when both ends agree
// and ConvergenceError when the bracket does not shrink below tol.
ThresholdResult threshold(const ThresholdSpec& spec);

// Detection status of the family at one parameter value.
CriterionReport evaluate_at(const FamilySpec& family, SweepVariable variable, double x,
                            const CriterionSpec& criterion);

}  // namespace hmgh
