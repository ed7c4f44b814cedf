#include <doctest.h>

#include <cmath>
#include <numbers>

#include "biphoton/channels.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/states.hpp"
#include "biphoton/witnesses.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

TwoPhotonDensity ideal() { return qutrit_to_density(basis_state(QutritBasis::PsiHv)); }

TwoPhotonDensity local_unitary(const TwoPhotonDensity& rho, const CMatrix& u, const CMatrix& w) {
  const CMatrix k = kron(u, w);
  return TwoPhotonDensity::from_matrix(k * rho.matrix() * k.adjoint());
}

OptimizerConfig light() {
  OptimizerConfig cfg;
  cfg.restarts = 10;
  return cfg;
}

}  // namespace

TEST_CASE("canonical quintuplet geometry") {
  const auto q = canonical_quintuplet();
  const auto hv = basis_state(QutritBasis::PsiHv);
  double sum = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(std::abs(q[k].inner(q[(k + 1) % 5])) < 1e-12);
    const double overlap = std::norm(q[k].inner(hv));
    CHECK(overlap == doctest::Approx(1.0 / oracle::kSqrt5).epsilon(1e-12));
    sum += overlap;
  }
  CHECK(sum == doctest::Approx(oracle::kSqrt5).epsilon(1e-12));
}

TEST_CASE("quintuplet projector sum") {
  const auto q = canonical_quintuplet();
  CMatrix sum(3, 3);
  for (const auto& l : q.states()) sum += CMatrix::outer(l.amplitudes());
  const double a = (5.0 - oracle::kSqrt5) / 2.0;
  const std::array<Complex, 3> hv{0.0, 1.0, 0.0};
  const CMatrix p = CMatrix::outer(hv);
  const CMatrix expected = p * oracle::kSqrt5 + (CMatrix::identity(3) - p) * a;
  CHECK(max_abs_diff(sum, expected) < 1e-10);
}

TEST_CASE("quintuplet validation") {
  auto states = canonical_quintuplet().states();
  states[1] = states[0];
  CHECK_THROWS_AS(Quintuplet{states}, InvalidQuintuplet);
}

TEST_CASE("kcbs_value examples") {
  const auto q = canonical_quintuplet();
  CHECK(kcbs_value(ideal(), q) == doctest::Approx(oracle::kSqrt5).epsilon(1e-12));
  CHECK(kcbs_value(TwoPhotonDensity::maximally_mixed(), q) == doctest::Approx(1.25).epsilon(1e-12));
  const auto mixed = TwoPhotonDensity::mixture(0.9, ideal(), TwoPhotonDensity::from_pure(oracle::psi_minus()));
  CHECK(kcbs_value(mixed, q) == doctest::Approx(0.9 * oracle::kSqrt5).epsilon(1e-12));
}

TEST_CASE("kcbs_value is linear in the density") {
  Rng rng(41);
  const auto q = canonical_quintuplet();
  for (int t = 0; t < 20; ++t) {
    const auto a = random_mixed_density(rng), b = random_mixed_density(rng);
    const double w = rng.uniform();
    CHECK(kcbs_value(TwoPhotonDensity::mixture(w, a, b), q) ==
          doctest::Approx(w * kcbs_value(a, q) + (1 - w) * kcbs_value(b, q)).epsilon(1e-12));
  }
}

TEST_CASE("kcbs_max examples") {
  const auto best = kcbs_max(ideal());
  CHECK(best.value == doctest::Approx(oracle::kSqrt5).epsilon(1e-6));
  CHECK(best.violated);
  CHECK(kcbs_value(ideal(), best.quintuplet) == doctest::Approx(best.value).epsilon(1e-12));

  const auto fock = kcbs_max(qutrit_to_density(basis_state(QutritBasis::TwoZero)));
  CHECK(fock.value <= 2.0 + 1e-6);
  CHECK_FALSE(fock.violated);

  const auto dephased = apply_two_photon(qutrit_to_density(basis_state(QutritBasis::PsiPm)), {ChannelKind::Dephasing, 0.166});
  CHECK(std::abs(kcbs_max(dephased).value - 2.0) < 0.01);
}

TEST_CASE("kcbs_max agrees with the closed-form rotation optimum") {
  Rng rng(43);
  for (int t = 0; t < 25; ++t) {
    const auto rho = random_mixed_density(rng);
    CHECK(kcbs_max(rho).value == doctest::Approx(oracle::kcbs_rotation_max(rho.matrix())).epsilon(1e-7));
  }
  for (double p : {0.0, 0.1, 0.2, 0.3, 0.5}) {
    const auto rho = apply_two_photon(qutrit_to_density(basis_state(QutritBasis::PsiPm)), {ChannelKind::Dephasing, p});
    CHECK(kcbs_max(rho).value == doctest::Approx(oracle::dephasing_kcbs_model(p)).epsilon(1e-7));
  }
}

TEST_CASE("kcbs_max is frame covariant") {
  Rng rng(47);
  for (int t = 0; t < 8; ++t) {
    const auto rho = random_mixed_density(rng);
    const CMatrix u = random_unitary2(rng);
    CHECK(kcbs_max(local_unitary(rho, u, u), light()).value ==
          doctest::Approx(kcbs_max(rho, light()).value).epsilon(1e-4));
  }
}

TEST_CASE("neutral pure qutrits reach the quantum maximum") {
  Rng rng(53);
  for (int t = 0; t < 10; ++t) {
    // Neutral: symmetrized product of two orthogonal polarizations.
    const CMatrix u = random_unitary2(rng);
    const QutritState q = symmetrize(PolarizationState::horizontal().transformed(u),
                                     PolarizationState::vertical().transformed(u));
    CHECK(kcbs_max(qutrit_to_density(q), light()).value >= oracle::kSqrt5 - 1e-4);
  }
}

TEST_CASE("correlation matrices") {
  auto check_diag = [](const Matrix3& t, Vec3 d) {
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(t[i][j] == doctest::Approx(i == j ? d[i] : 0.0).epsilon(1e-12));
  };
  check_diag(correlation_matrix(TwoPhotonDensity::from_pure(oracle::phi_minus())), {-1, 1, 1});
  check_diag(correlation_matrix(TwoPhotonDensity::from_pure(oracle::psi_minus())), {-1, -1, -1});
  check_diag(correlation_matrix(TwoPhotonDensity::maximally_mixed()), {0, 0, 0});
}

TEST_CASE("chsh_max examples") {
  CHECK(chsh_max(TwoPhotonDensity::from_pure(oracle::psi_plus())).value ==
        doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-12));
  CHECK(chsh_max(TwoPhotonDensity::maximally_mixed()).value == doctest::Approx(0.0));
  const auto ideal_pm = qutrit_to_density(basis_state(QutritBasis::PsiPm));
  for (double p : {0.0, 0.1, 0.25, 0.4, 0.5}) {
    const auto rho = apply_two_photon(ideal_pm, {ChannelKind::Dephasing, p});
    CHECK(chsh_max(rho).value == doctest::Approx(2 * std::sqrt(1 + std::pow(1 - 2 * p, 4))).epsilon(1e-12));
  }
}

TEST_CASE("chsh_max matches the direct trace and its settings attain it") {
  Rng rng(59);
  for (int t = 0; t < 30; ++t) {
    const auto rho = random_mixed_density(rng);
    const auto r = chsh_max(rho);
    CHECK(r.value == doctest::Approx(oracle::horodecki_chsh(rho.matrix())).epsilon(1e-10));
    CHECK(std::abs(chsh_expectation(rho, r.settings)) == doctest::Approx(r.value).epsilon(1e-9));
  }
}

TEST_CASE("chsh_max is invariant under local unitaries") {
  Rng rng(61);
  for (int t = 0; t < 30; ++t) {
    const auto rho = random_mixed_density(rng);
    const auto moved = local_unitary(rho, random_unitary2(rng), random_unitary2(rng));
    CHECK(std::abs(chsh_max(moved).value - chsh_max(rho).value) < 1e-8);
  }
}

TEST_CASE("hierarchy on small batches") {
  const auto report = hierarchy_check(400, 7);
  CHECK(report.samples == 400);
  CHECK(report.counterexamples == 0);
  CHECK(report.kcbs_violations > 0);
  CHECK(report.chsh_violations >= report.kcbs_violations);

  const auto again = hierarchy_check(400, 7);
  CHECK(again.max_kcbs == report.max_kcbs);
  CHECK(again.kcbs_violations == report.kcbs_violations);

  const std::vector<TwoPhotonDensity> product{TwoPhotonDensity::from_pure(oracle::ket(1, 0, 0, 0))};
  const auto single = check_hierarchy(product);
  CHECK(single.kcbs_violations == 0);
  CHECK(single.chsh_violations == 0);
  CHECK(single.counterexamples == 0);

  const auto ideal_pm = qutrit_to_density(basis_state(QutritBasis::PsiPm));
  std::vector<TwoPhotonDensity> sweep;
  for (int i = 0; i <= 50; ++i) sweep.push_back(apply_two_photon(ideal_pm, {ChannelKind::Dephasing, 0.01 * i}));
  CHECK(check_hierarchy(sweep).counterexamples == 0);
  CHECK_THROWS_AS(hierarchy_check(0, 1), PreconditionError);
}
