#include "hmgh/density_io.hpp"
#include "hmgh/errors.hpp"
#include "hmgh/states.hpp"
#include "hmgh/tensorcore.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace hmgh;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

DensityMatrix bell_phi_plus() { return vec_to_dm(bell_state("phi+").to_dense()); }

}  // namespace

TEST_SUITE("tensorcore") {
  TEST_CASE("kron_all composes factors") {
    CHECK(max_abs(kron_all({Matrix::Identity(2, 2), Matrix::Identity(2, 2)}) - Matrix::Identity(4, 4)) == 0.0);
    Matrix anti = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) anti(i, 3 - i) = 1.0;
    CHECK(max_abs(kron_all({pauli(1), pauli(1)}) - anti) == 0.0);
    Matrix m = Matrix::Random(2, 3);
    CHECK(max_abs(kron_all({m}) - m) == 0.0);
    std::vector<Matrix> none;
    CHECK_THROWS_AS(kron_all(none), DomainError);
    Matrix a = Matrix::Random(2, 2), b = Matrix::Random(3, 1), c = Matrix::Random(1, 2);
    CHECK(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-14);
    CHECK(max_abs(kron(a, b) - oracle::kron(a, b)) < 1e-15);
  }

  TEST_CASE("multi-index encoding is big-endian and bijective") {
    CHECK(encode({0, 0, 0}, SystemShape::uniform(3, 2)) == 0);
    CHECK(encode({1, 1, 1}, SystemShape::uniform(3, 2)) == 7);
    CHECK(encode({1, 0}, SystemShape::uniform(2, 3)) == 3);
    CHECK_THROWS_AS(encode({0, 2}, SystemShape::uniform(2, 2)), DomainError);
    CHECK_THROWS_AS(encode({0, 1, 0}, SystemShape::uniform(2, 2)), DomainError);
    for (const SystemShape& s : {SystemShape::uniform(12, 2), SystemShape({2, 3, 4, 5}), SystemShape::uniform(6, 4)}) {
      REQUIRE(s.total() <= 4096);
      for (std::uint64_t x = 0; x < s.total(); ++x) {
        MultiIndex mi = decode(x, s);
        REQUIRE(encode(mi, s) == x);
        REQUIRE(mi.labels() == oracle::digits(x, s.dims()));
      }
    }
    CHECK(parse_multiindex("0011") == MultiIndex{0, 0, 1, 1});
    CHECK(parse_multiindex("0.1.10") == MultiIndex{0, 1, 10});
    CHECK(MultiIndex{0, 1, 10}.to_string() == "0.1.10");
    CHECK_THROWS_AS(parse_multiindex("01a"), DomainError);
  }

  TEST_CASE("matrix elements") {
    DensityMatrix ghz = vec_to_dm(ghz_state(3, 2).to_dense());
    CHECK(std::abs(ghz.element({0, 0, 0}, {1, 1, 1}) - Complex(0.5)) < 1e-15);
    CHECK(std::abs(DensityMatrix::maximally_mixed(SystemShape::uniform(2, 2)).element({0, 1}, {0, 1}) - 0.25) < 1e-15);
    DensityMatrix zero = vec_to_dm(StateVector::basis(SystemShape::uniform(3, 2), {0, 0, 0}));
    CHECK(std::abs(zero.element({0, 0, 0}, {0, 0, 1})) == 0.0);
    CHECK_THROWS_AS(zero.element({0, 0}, {0, 0}), DomainError);
  }

  TEST_CASE("partial trace") {
    DensityMatrix red = partial_trace(bell_phi_plus(), {1});
    CHECK(max_abs(red.matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-15);

    std::mt19937_64 rng(7);
    DensityMatrix ra = random_density(SystemShape::uniform(1, 2), rng), rb = random_density(SystemShape::uniform(1, 3), rng);
    DensityMatrix prod(SystemShape({2, 3}), kron(ra.matrix(), rb.matrix()));
    CHECK(max_abs(partial_trace(prod, {1}).matrix() - ra.matrix()) < 1e-14);

    DensityMatrix ghz = vec_to_dm(ghz_state(3, 2).to_dense());
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = expect(3, 3) = 0.5;
    DensityMatrix r23 = partial_trace(ghz, {0});
    CHECK(r23.shape() == SystemShape::uniform(2, 2));
    CHECK(max_abs(r23.matrix() - expect) < 1e-15);
    CHECK_THROWS_AS(partial_trace(ghz, {0, 1, 2}), DomainError);
    CHECK_THROWS_AS(partial_trace(ghz, {0, 0}), DomainError);

    // Against the brute-force sum, mixed dimensions, and in stages.
    SystemShape s({2, 3, 2});
    DensityMatrix rho = random_density(s, rng);
    for (std::vector<int> t : {std::vector<int>{0}, {1}, {2}, {0, 2}, {1, 2}}) {
      CHECK(max_abs(partial_trace(rho, t).matrix() - oracle::partial_trace(rho.matrix(), s.dims(), t)) < 1e-14);
    }
    DensityMatrix staged = partial_trace(partial_trace(rho, {0}), {0});
    CHECK(max_abs(staged.matrix() - partial_trace(rho, {0, 1}).matrix()) < 1e-12);
  }

  TEST_CASE("partial transpose") {
    Matrix pt = partial_transpose(bell_phi_plus(), {0});
    auto spec = hermitian_spectrum(pt);
    REQUIRE(spec.size() == 4);
    CHECK(spec[0] == doctest::Approx(-0.5).epsilon(1e-14));
    for (int i = 1; i < 4; ++i) CHECK(spec[i] == doctest::Approx(0.5).epsilon(1e-14));

    std::mt19937_64 rng(11);
    SystemShape s({2, 3, 2});
    DensityMatrix rho = random_density(s, rng);
    for (std::vector<int> b : {std::vector<int>{0}, {1}, {0, 2}}) {
      Matrix once = partial_transpose(rho, b);
      CHECK(max_abs(once - oracle::partial_transpose(rho.matrix(), s.dims(), b)) < 1e-15);
      CHECK(max_abs(partial_transpose(s, once, b) - rho.matrix()) < 1e-12);
      CHECK(std::abs(once.trace() - Complex(1.0)) < 1e-12);
      CHECK(max_abs(once - once.adjoint()) < 1e-12);
    }
    DensityMatrix mixed = DensityMatrix::maximally_mixed(s);
    CHECK(max_abs(partial_transpose(mixed, {1}) - mixed.matrix()) == 0.0);
    CHECK_THROWS_AS(partial_transpose(rho, {}), DomainError);
    CHECK_THROWS_AS(partial_transpose(rho, {0, 1, 2}), DomainError);

    // Pure products stay positive under every block.
    for (int trial = 0; trial < 20; ++trial) {
      StateVector a = random_pure_state(SystemShape::uniform(1, 2), rng);
      StateVector b = random_pure_state(SystemShape::uniform(1, 2), rng);
      StateVector c = random_pure_state(SystemShape::uniform(1, 3), rng);
      DensityMatrix p = vec_to_dm(kron(kron(a, b), c));
      for (std::vector<int> blk : {std::vector<int>{0}, {1}, {2}, {0, 1}})
        CHECK(hermitian_spectrum(partial_transpose(p, blk)).front() >= -1e-9);
    }
  }

  TEST_CASE("hermitian spectrum") {
    auto z = hermitian_spectrum(pauli(3));
    CHECK(z == std::vector<double>{-1.0, 1.0});
    auto flat = hermitian_spectrum(Matrix::Identity(5, 5) / 5.0);
    REQUIRE(flat.size() == 5);
    for (double e : flat) CHECK(e == doctest::Approx(0.2));
    CHECK_THROWS_AS(hermitian_spectrum(pauli(1) + Complex(0, 1) * pauli(0)), DomainError);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      DensityMatrix r = random_density(SystemShape::uniform(3, 2), rng);
      auto e = hermitian_spectrum(r.matrix());
      double sum = 0;
      for (double x : e) {
        CHECK(x >= -1e-9);
        CHECK(x <= 1.0 + 1e-12);
        sum += x;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  TEST_CASE("flip_all, vec_to_dm") {
    SystemShape s = SystemShape::uniform(3, 2);
    StateVector z = StateVector::basis(s, {0, 0, 0});
    CHECK(std::abs(flip_all(z).amplitude({1, 1, 1}) - Complex(1.0)) < 1e-15);
    StateVector ghz = ghz_state(3, 2).to_dense();
    CHECK((flip_all(ghz).amplitudes() - ghz.amplitudes()).norm() < 1e-15);
    CHECK((flip_all(w_state(3).to_dense()).amplitudes() - dicke_state(3, 2).to_dense().amplitudes()).norm() < 1e-15);
    DensityMatrix rho = vec_to_dm(w_state(3).to_dense());
    CHECK(max_abs(flip_all(flip_all(rho)).matrix() - rho.matrix()) == 0.0);
    CHECK_THROWS_AS(flip_all(StateVector::basis(SystemShape({2, 3}), {0, 0})), DomainError);

    DensityMatrix ket0 = vec_to_dm(StateVector::basis(SystemShape::uniform(1, 2), {0}));
    CHECK(max_abs(ket0.matrix() - Matrix{{1, 0}, {0, 0}}) == 0.0);
    Vector plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    DensityMatrix pp = vec_to_dm(StateVector(SystemShape::uniform(1, 2), plus));
    CHECK(max_abs(pp.matrix() - Matrix::Constant(2, 2, 0.5)) < 1e-15);
    DensityMatrix g = vec_to_dm(ghz);
    int nonzero = 0;
    for (Eigen::Index r = 0; r < 8; ++r)
      for (Eigen::Index c = 0; c < 8; ++c)
        if (std::abs(g.matrix()(r, c)) > 1e-15) {
          ++nonzero;
          CHECK(std::abs(g.matrix()(r, c) - 0.5) < 1e-15);
        }
    CHECK(nonzero == 4);
    CHECK_THROWS_AS(StateVector(s, Vector::Zero(8)), DomainError);
  }

  TEST_CASE("density matrix validation") {
    SystemShape s = SystemShape::uniform(1, 2);
    CHECK_THROWS_AS(DensityMatrix(s, Matrix{{1, 0}, {0, 1}}), DomainError);             // trace 2
    CHECK_THROWS_AS(DensityMatrix(s, Matrix{{1.5, 0}, {0, -0.5}}), DomainError);         // negative
    CHECK_THROWS_AS(DensityMatrix(s, Matrix{{0.5, 0.1}, {0.2, 0.5}}), DomainError);      // not Hermitian
    CHECK_NOTHROW(DensityMatrix(s, Matrix{{1.5, 0}, {0, -0.5}}, Validation::skip));
    CHECK_THROWS_AS(require_dense(SystemShape::uniform(15, 2)), ResourceError);
    CHECK_THROWS_AS(SystemShape({2, 1}), DomainError);
  }

  TEST_CASE("local unitaries and expectations") {
    std::mt19937_64 rng(5);
    DensityMatrix rho = random_density(SystemShape({2, 3}), rng);
    std::vector<Matrix> us{random_unitary(2, rng), random_unitary(3, rng)};
    DensityMatrix rot = apply_local_unitaries(rho, us);
    Matrix u = oracle::kron(us[0], us[1]);
    CHECK(max_abs(rot.matrix() - u * rho.matrix() * u.adjoint()) < 1e-13);
    std::vector<Matrix> bad{Matrix::Identity(2, 2) * 2.0, Matrix::Identity(3, 3)};
    CHECK_THROWS_AS(apply_local_unitaries(rho, bad), DomainError);
    CHECK(expectation(rho, Matrix::Identity(6, 6)) == doctest::Approx(1.0));
    for (int k = 0; k < 4; ++k) CHECK(max_abs(pauli(k) - oracle::sigma(k)) == 0.0);
  }

  TEST_CASE("density JSON round trip") {
    std::mt19937_64 rng(9);
    DensityMatrix rho = random_density(SystemShape({2, 3}), rng);
    std::stringstream ss;
    write_density_json(ss, rho);
    DensityMatrix back = read_density_json(ss);
    CHECK(back.shape() == rho.shape());
    CHECK(max_abs(back.matrix() - rho.matrix()) == 0.0);
    std::stringstream bad("{\"dims\": [2], \"re\": [[1, 0], [0, 1]]}");
    CHECK_THROWS_AS(read_density_json(bad), DomainError);
    std::stringstream junk("not json");
    CHECK_THROWS_AS(read_density_json(junk), DomainError);
    CHECK(format_double(0.1) == "0.10000000000000001");
  }
}
