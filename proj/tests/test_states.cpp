#include <doctest.h>

#include <cmath>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/optics.hpp"
#include "biphoton/serialization.hpp"
#include "biphoton/states.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

const double r2 = 1.0 / std::numbers::sqrt2;

bool same_up_to_phase(const CMatrix& a, const CMatrix& b, double tol) {
  // Align the global phase on the largest entry of b.
  std::size_t best = 0;
  for (std::size_t i = 0; i < b.data().size(); ++i)
    if (std::abs(b.data()[i]) > std::abs(b.data()[best])) best = i;
  const Complex phase = a.data()[best] / b.data()[best];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  return max_abs_diff(a, b * phase) <= tol;
}

}  // namespace

TEST_CASE("basis states") {
  CHECK(same_ray(basis_state("psi_hv"), QutritState(0.0, 1.0, 0.0)));
  CHECK(same_ray(basis_state("psi_pm"), QutritState(r2, 0.0, -r2)));
  CHECK(same_ray(basis_state("psi_rl"), QutritState(r2, 0.0, r2)));
  CHECK(same_ray(basis_state("psi-pm"), basis_state(QutritBasis::PsiPm)));
  CHECK(same_ray(basis_state("2,0"), QutritState(1.0, 0.0, 0.0)));
  CHECK(same_ray(basis_state("0_2"), QutritState(0.0, 0.0, 1.0)));
  CHECK_THROWS_AS(basis_state("psi_xy"), UnknownName);
  for (auto b : {QutritBasis::PsiHv, QutritBasis::PsiPm, QutritBasis::PsiRl, QutritBasis::TwoZero,
                 QutritBasis::ZeroTwo})
    CHECK(parse_basis_name(basis_name(b)) == b);
}

TEST_CASE("source state settings") {
  CHECK(same_ray(source_state(22.5, 180.0), basis_state(QutritBasis::PsiPm)));
  CHECK(same_ray(source_state(0.0, 0.0), basis_state(QutritBasis::TwoZero)));
  CHECK(same_ray(source_state(22.5, 0.0), basis_state(QutritBasis::PsiRl)));
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(QutritState(1.0, 1.0, 0.0), NotNormalized);
  CHECK_THROWS_AS(QutritState::normalized(0.0, 0.0, 0.0), NotNormalized);
  CHECK_THROWS_AS(PolarizationState(1.0, 1.0), NotNormalized);
  CMatrix bad = CMatrix::identity(4) * 0.5;
  CHECK_THROWS_AS(TwoPhotonDensity::from_matrix(bad), InvalidDensity);
  bad = CMatrix::identity(4) * 0.25;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(TwoPhotonDensity::from_matrix(bad), InvalidDensity);
  const std::array<Complex, 4> d{0.6, 0.6, -0.1, -0.1};
  CHECK_THROWS_AS(TwoPhotonDensity::from_matrix(CMatrix::diagonal(d)), InvalidDensity);
}

TEST_CASE("small negative eigenvalues are clipped") {
  const std::array<Complex, 4> d{0.5 + 5e-11, 0.5, 0.0, -5e-11};
  const auto rho = TwoPhotonDensity::from_matrix(CMatrix::diagonal(d));
  CHECK(eig_hermitian(rho.matrix()).values.back() >= 0.0);
  CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("qutrit to density") {
  auto near = [](const TwoPhotonDensity& rho, const std::array<Complex, 4>& v) {
    return max_abs_diff(rho.matrix(), oracle::projector(v)) < 1e-12;
  };
  CHECK(near(qutrit_to_density(basis_state(QutritBasis::PsiHv)), oracle::psi_plus()));
  CHECK(near(qutrit_to_density(basis_state(QutritBasis::PsiPm)), oracle::phi_minus()));
  CHECK(near(qutrit_to_density(basis_state(QutritBasis::TwoZero)), oracle::ket(1, 0, 0, 0)));
}

TEST_CASE("decompose") {
  auto d = decompose(qutrit_to_density(basis_state(QutritBasis::PsiHv)));
  CHECK(d.singlet_population == doctest::Approx(0.0));
  CHECK(d.qutrit_block.trace().real() == doctest::Approx(1.0));

  d = decompose(TwoPhotonDensity::from_pure(oracle::psi_minus()));
  CHECK(d.singlet_population == doctest::Approx(1.0));
  CHECK(d.qutrit_block.frobenius_norm() < 1e-12);

  const CMatrix flip = oracle::kron2(oracle::sx(), oracle::id2());
  const CMatrix m = flip * oracle::projector(oracle::phi_minus()) * flip.adjoint();
  CHECK(decompose(TwoPhotonDensity::from_matrix(m)).singlet_population == doctest::Approx(1.0));
}

TEST_CASE("decompose round trip and population sum") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const QutritState q = random_qutrit(rng);
    const auto d = decompose(qutrit_to_density(q));
    CMatrix expected(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) expected(i, j) = q[i] * std::conj(q[j]);
    CHECK(max_abs_diff(d.qutrit_block, expected) < 1e-12);
    CHECK(std::abs(d.singlet_population) < 1e-12);

    const auto rho = random_mixed_density(rng);
    const auto e = decompose(rho);
    CHECK(e.qutrit_block.trace().real() + e.singlet_population == doctest::Approx(1.0).epsilon(1e-10));
    // The block agrees with an independent Fock-basis projection.
    CHECK(max_abs_diff(e.qutrit_block, oracle::fock_block(rho.matrix())) < 1e-12);
  }
}

TEST_CASE("neutral polarization defect") {
  CHECK(neutral_polarization_defect(basis_state(QutritBasis::PsiHv)) == doctest::Approx(0.0));
  CHECK(neutral_polarization_defect(basis_state(QutritBasis::TwoZero)) == doctest::Approx(1.0));
  CHECK(neutral_polarization_defect(source_state(15.0, 0.0)) == doctest::Approx(0.5));

  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const QutritState q = random_qutrit(rng);
    const CMatrix phase{{std::polar(1.0, rng.uniform(0, 6.3)), 0.0}, {0.0, std::polar(1.0, rng.uniform(0, 6.3))}};
    CHECK(neutral_polarization_defect(apply(lift_unitary(phase), q)) ==
          doctest::Approx(neutral_polarization_defect(q)).epsilon(1e-12));
  }
}

TEST_CASE("lift_unitary") {
  CHECK(max_abs_diff(lift_unitary(CMatrix::identity(2)), CMatrix::identity(3)) < 1e-15);
  const std::array<Complex, 3> d{1.0, -1.0, 1.0};
  CHECK(same_up_to_phase(lift_unitary(pauli_z()), CMatrix::diagonal(d), 1e-12));
  const auto rotated = apply(lift_unitary(hwp_matrix(22.5)), basis_state(QutritBasis::PsiPm));
  CHECK(same_ray(rotated, basis_state(QutritBasis::PsiHv)));
  CHECK_THROWS_AS(lift_unitary(CMatrix{{1.0, 1.0}, {0.0, 1.0}}), NotUnitary);

  Rng rng(21);
  for (int t = 0; t < 30; ++t) {
    const CMatrix u = random_unitary2(rng), w = random_unitary2(rng);
    CHECK(same_up_to_phase(lift_unitary(u * w), lift_unitary(u) * lift_unitary(w), 1e-9));
    // The lift acts on the symmetric block exactly as u (x) u does.
    const QutritState q = random_qutrit(rng);
    const auto direct = kron(u, u) * CMatrix::column(embed(q));
    const auto lifted = embed(apply(lift_unitary(u), q));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(direct(i, 0) - lifted[i]) < 1e-12);
  }
}

TEST_CASE("purity and fidelity") {
  CHECK(purity(TwoPhotonDensity::maximally_mixed()) == doctest::Approx(0.25));
  CHECK(purity(TwoPhotonDensity::from_pure(oracle::psi_plus())) == doctest::Approx(1.0));
  const auto target = TwoPhotonDensity::from_pure(oracle::psi_plus());
  const auto mixed = TwoPhotonDensity::mixture(0.9, target, TwoPhotonDensity::maximally_mixed());
  CHECK(fidelity_to_pure(mixed, target) == doctest::Approx(0.925));
  CHECK(fidelity_to_pure(mixed, oracle::psi_plus()) == doctest::Approx(0.925));
  CHECK_THROWS_AS(fidelity_to_pure(mixed, mixed), InvalidDensity);
}

TEST_CASE("symmetrize reproduces Fock states") {
  const auto h = PolarizationState::horizontal(), v = PolarizationState::vertical();
  CHECK(same_ray(symmetrize(h, v), basis_state(QutritBasis::PsiHv)));
  CHECK(same_ray(symmetrize(h, h), basis_state(QutritBasis::TwoZero)));
  CHECK(same_ray(symmetrize(PolarizationState::diagonal(), PolarizationState::antidiagonal()),
                 basis_state(QutritBasis::PsiPm)));
}

TEST_CASE("JSON round trip") {
  Rng rng(4);
  const auto rho = random_mixed_density(rng);
  const auto back = density_from_json(to_json(rho));
  CHECK(max_abs_diff(back.matrix(), rho.matrix()) < 1e-15);
  const auto q = random_qutrit(rng);
  CHECK(same_ray(qutrit_from_json(to_json(q)), q, 1e-15));
  CHECK_THROWS_AS(qutrit_from_json(nlohmann::json::array({1, 2})), PreconditionError);
}
