#include "hmgh/measures.hpp"

#include "hmgh/errors.hpp"
#include "hmgh/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmgh {

Matrix cut_matrix(const StateVector& psi, const std::vector<int>& block) {
  const SystemShape& shape = psi.shape();
  if (block.empty() || static_cast<int>(block.size()) >= shape.size())
    throw DomainError("cut needs a non-empty proper block");
  auto ro = block_offsets(shape, block);
  auto co = block_offsets(shape, complement(block, shape.size()));
  Matrix m(static_cast<Eigen::Index>(ro.size()), static_cast<Eigen::Index>(co.size()));
  for (std::size_t r = 0; r < ro.size(); ++r)
    for (std::size_t c = 0; c < co.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          psi.amplitudes()(static_cast<Eigen::Index>(ro[r] + co[c]));
  return m;
}

MeasureResult cgme_pure(const StateVector& psi) {
  const int n = psi.shape().size();
  if (n < 2) throw DomainError("gme-concurrence needs at least two subsystems");
  require_partition_count(n, 2);
  double best = std::numeric_limits<double>::infinity();
  for_each_k_partition(n, 2, [&](const Partition& p) {
    Matrix m = cut_matrix(psi, p.block(0));
    Matrix red = m * m.adjoint();
    double purity = red.cwiseAbs2().sum();
    best = std::min(best, std::sqrt(std::max(0.0, 2.0 * (1.0 - purity))));
  });
  return {"cgme", best, true};
}

MeasureResult cgme_lower_bound(const ElementProvider& rho, const ProbePair& probe) {
  CriterionReport r = gme_value(rho, probe);
  return {"cgme_lower_bound", std::max(0.0, 2.0 * r.value), false};
}

int schmidt_rank(const StateVector& psi, const std::vector<int>& block) {
  Matrix m = cut_matrix(psi, block);
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-9) ++rank;
  return rank;
}

}  // namespace hmgh
