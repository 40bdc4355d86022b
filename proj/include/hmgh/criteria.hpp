#pragma once

#include "hmgh/partitions.hpp"
#include "hmgh/states.hpp"
#include "hmgh/tensorcore.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hmgh {

inline constexpr double kDetectionTol = 1e-10;

// Two computational-basis product vectors |a> and |b>, distinct on every site.
struct ProbePair {
  MultiIndex a;
  MultiIndex b;
};

void validate(const ProbePair& probe, const SystemShape& shape);
// Parses "000,111".
ProbePair parse_probe(const std::string& text);
ProbePair uniform_probe(int n, int k = 0, int l = 1);

struct CriterionReport {
  std::string name;
  std::map<std::string, std::string> params;
  std::optional<ProbePair> probe;
  double value = 0.0;
  bool violated = false;
  double tol = kDetectionTol;
  std::vector<std::string> flags;
};

CriterionReport make_report(std::string name, double value, double tol = kDetectionTol);
std::string report_to_json(const CriterionReport& report);

// Detected (NPT) when value = -lambda_min(rho^{T_block}) > tol.
CriterionReport ppt_check(const DensityMatrix& rho, const std::vector<int>& block);

CriterionReport hmgh_bipartite_value(const ElementProvider& rho, const ProbePair& probe);
CriterionReport gme_value(const ElementProvider& rho, const ProbePair& probe);

enum class KsepNormalisation {
  standard,         // |rho_ab| - sum prod (..)^(1/2k)
  doubled_coherence // first term 2|rho_ab|, the alternative Qk convention
};

struct KsepOptions {
  KsepNormalisation normalisation = KsepNormalisation::standard;
  std::uint64_t partition_cap = kDefaultPartitionCap;
};

CriterionReport ksep_value(const ElementProvider& rho, int k, const ProbePair& probe, const KsepOptions& opts = {});

// Unnormalised Dicke inequality; reaches m on |D_m^n>, m <= n/2.
CriterionReport dicke_gme_value(const ElementProvider& rho, int m);

// value = Q0 - (f - 2); params carry Q0 and the largest detected dimension.
CriterionReport q0_value(const ElementProvider& rho, int f);
// value = Qm - (f - 2) with Qm normalised by m.
CriterionReport qm_value(const ElementProvider& rho, int m, int f);

// Violation excludes membership of the GHZ-type family of n-qubit states.
CriterionReport double_class_value(const ElementProvider& rho);
// Violation excludes membership of the class of the n-tuple excitation family.
CriterionReport ntuple_class_value(const ElementProvider& rho);
double ntuple_alpha(int n);

struct FidelityWitness {
  std::string name;
  double alpha;
  SparseState target;
};

FidelityWitness ghz3_witness();
FidelityWitness w3_witness();
// value = -tr(W rho) = <psi|rho|psi> - alpha.
CriterionReport fidelity_witness_value(const ElementProvider& rho, const FidelityWitness& witness);

// Cyclic m-copy bipartite criterion. Each probe is a two-site multi-index.
CriterionReport mlinear_value(const ElementProvider& rho, const std::vector<MultiIndex>& probes);

// value = -det M, M_st = <i_s j_t|rho|i_t j_s>.
CriterionReport rank_m_determinant(const ElementProvider& rho, const std::vector<int>& i, const std::vector<int>& j);

}  // namespace hmgh
