#include "hmgh/errors.hpp"
#include "hmgh/measures.hpp"
#include "hmgh/states.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace hmgh;

namespace {

// min over bipartitions of sqrt(2 (1 - tr rho_A^2)) from brute-force partial traces.
double cgme_oracle(const Vector& psi, const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  const Matrix rho = psi * psi.adjoint();
  double best = 1e300;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> traced;
    for (int i = 0; i < n; ++i)
      if (mask >> (n - 1 - i) & 1) traced.push_back(i);
    const Matrix r = oracle::partial_trace(rho, dims, traced);
    const double purity = (r * r).trace().real();
    best = std::min(best, std::sqrt(std::max(0.0, 2 * (1 - purity))));
  }
  return best;
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("gme-concurrence of pure states") {
    CHECK(cgme_pure(ghz_state(3, 2).to_dense()).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cgme_pure(bell_state("phi+").to_dense()).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cgme_pure(ghz_state(3, 2).to_dense()).exact);
    const StateVector zero = StateVector::basis(SystemShape({2}), {0});
    CHECK(cgme_pure(kron(zero, bell_state("phi+").to_dense())).value == doctest::Approx(0.0).scale(1.0));
    std::mt19937_64 rng(5);
    for (const std::vector<int>& dims : {std::vector<int>{2, 2, 2}, {2, 3, 2}, {2, 2, 2, 2}}) {
      for (int t = 0; t < 5; ++t) {
        StateVector psi = random_pure_state(SystemShape(dims), rng);
        CHECK(cgme_pure(psi).value == doctest::Approx(cgme_oracle(psi.amplitudes(), dims)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("gme-concurrence is invariant under local unitaries") {
    std::mt19937_64 rng(6);
    const StateVector psi = random_pure_state(SystemShape::uniform(3, 2), rng);
    const double base = cgme_pure(psi).value;
    for (int t = 0; t < 100; ++t) {
      std::vector<Matrix> us{random_unitary(2, rng), random_unitary(2, rng), random_unitary(2, rng)};
      REQUIRE(cgme_pure(apply_local_unitaries(psi, us)).value == doctest::Approx(base).epsilon(1e-10));
    }
  }

  TEST_CASE("lower bound from the gme criterion") {
    auto g = cgme_lower_bound(vec_to_dm(ghz_state(3, 2).to_dense()), parse_probe("000,111"));
    CHECK(g.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(g.exact);
    auto iso = family_state({Family::ghz_iso, 3, 2, 1, 0.5, 0.0});
    CHECK(cgme_lower_bound(iso, parse_probe("000,111")).value == doctest::Approx(0.125).epsilon(1e-12));
    auto mixed = DensityMatrix::maximally_mixed(SystemShape::uniform(3, 2));
    CHECK(cgme_lower_bound(mixed, parse_probe("000,111")).value == 0.0);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
      StateVector psi = random_pure_state(SystemShape::uniform(3, 2), rng);
      CHECK(cgme_lower_bound(vec_to_dm(psi), parse_probe("010,101")).value <= cgme_pure(psi).value + 1e-10);
    }
  }

  TEST_CASE("schmidt rank") {
    CHECK(schmidt_rank(ghz_state(3, 2).to_dense(), {0}) == 2);
    CHECK(schmidt_rank(ghz_state(3, 4).to_dense(), {0, 1}) == 4);
    CHECK(schmidt_rank(dicke_state(4, 2).to_dense(), {0, 1}) == 3);
    CHECK(schmidt_rank(StateVector::basis(SystemShape::uniform(3, 2), {0, 1, 1}), {1}) == 1);
    std::mt19937_64 rng(8);
    CHECK(schmidt_rank(random_pure_state(SystemShape({2, 3}), rng), {0}) == 2);
    CHECK(cut_matrix(ghz_state(3, 2).to_dense(), {2}).rows() == 2);
    CHECK(cut_matrix(ghz_state(3, 2).to_dense(), {2}).cols() == 4);
    CHECK_THROWS_AS(schmidt_rank(ghz_state(3, 2).to_dense(), {}), DomainError);
    CHECK_THROWS_AS(schmidt_rank(ghz_state(3, 2).to_dense(), {0, 1, 2}), DomainError);
  }
}
