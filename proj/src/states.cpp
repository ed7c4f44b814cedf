#include "biphoton/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kDensityTolerance = 1e-10;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

double deg(double degrees) { return degrees * std::numbers::pi / 180.0; }

}  // namespace

QutritState::QutritState(Complex a0, Complex a1, Complex a2) : amp_{a0, a1, a2} {
  const double n2 = std::norm(a0) + std::norm(a1) + std::norm(a2);
  if (!(std::abs(n2 - 1.0) <= kNormTolerance))
    throw NotNormalized("QutritState: squared norm " + std::to_string(n2) + " != 1");
}

QutritState QutritState::normalized(Complex a0, Complex a1, Complex a2) {
  const double n = std::sqrt(std::norm(a0) + std::norm(a1) + std::norm(a2));
  if (!(n > 0.0) || !std::isfinite(n)) throw NotNormalized("QutritState: zero vector");
  return {a0 / n, a1 / n, a2 / n};
}

Complex QutritState::inner(const QutritState& other) const {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < 3; ++i) acc += std::conj(amp_[i]) * other.amp_[i];
  return acc;
}

bool same_ray(const QutritState& a, const QutritState& b, double tol) {
  return std::abs(std::abs(a.inner(b)) - 1.0) <= tol;
}

PolarizationState::PolarizationState(Complex h, Complex v) : h_(h), v_(v) {
  const double n2 = std::norm(h) + std::norm(v);
  if (!(std::abs(n2 - 1.0) <= kNormTolerance))
    throw NotNormalized("PolarizationState: squared norm " + std::to_string(n2) + " != 1");
}

PolarizationState PolarizationState::normalized(Complex h, Complex v) {
  const double n = std::sqrt(std::norm(h) + std::norm(v));
  if (!(n > 0.0) || !std::isfinite(n)) throw NotNormalized("PolarizationState: zero vector");
  return {h / n, v / n};
}

PolarizationState PolarizationState::diagonal() { return {kInvSqrt2, kInvSqrt2}; }
PolarizationState PolarizationState::antidiagonal() { return {kInvSqrt2, -kInvSqrt2}; }
PolarizationState PolarizationState::right() { return {kInvSqrt2, Complex{0.0, kInvSqrt2}}; }
PolarizationState PolarizationState::left() { return {kInvSqrt2, Complex{0.0, -kInvSqrt2}}; }

Complex PolarizationState::inner(const PolarizationState& other) const {
  return std::conj(h_) * other.h_ + std::conj(v_) * other.v_;
}

PolarizationState PolarizationState::transformed(const CMatrix& u) const {
  return normalized(u(0, 0) * h_ + u(0, 1) * v_, u(1, 0) * h_ + u(1, 1) * v_);
}

bool same_ray(const PolarizationState& a, const PolarizationState& b, double tol) {
  return std::abs(std::abs(a.inner(b)) - 1.0) <= tol;
}

TwoPhotonDensity TwoPhotonDensity::from_matrix(const CMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw InvalidDensity("TwoPhotonDensity: expected 4x4");
  for (const auto& z : m.data())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InvalidDensity("TwoPhotonDensity: non-finite entry");
  if (!m.is_hermitian(kDensityTolerance)) throw InvalidDensity("TwoPhotonDensity: not Hermitian");
  if (std::abs(m.trace() - Complex{1.0, 0.0}) > kDensityTolerance)
    throw InvalidDensity("TwoPhotonDensity: trace != 1");

  CMatrix h(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) h(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));

  const auto eig = eig_hermitian(h);
  if (eig.values.back() < -kDensityTolerance)
    throw InvalidDensity("TwoPhotonDensity: negative eigenvalue " +
                         std::to_string(eig.values.back()));
  if (eig.values.back() < 0.0) {
    CMatrix rebuilt(4, 4);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double lam = std::max(0.0, eig.values[k]);
      total += lam;
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
          rebuilt(r, c) += lam * eig.vectors(r, k) * std::conj(eig.vectors(c, k));
    }
    rebuilt *= 1.0 / total;
    h = rebuilt;
  }
  return TwoPhotonDensity(std::move(h));
}

TwoPhotonDensity TwoPhotonDensity::from_pure(const std::array<Complex, 4>& psi) {
  double n2 = 0.0;
  for (const auto& z : psi) n2 += std::norm(z);
  if (!(std::abs(n2 - 1.0) <= kNormTolerance))
    throw NotNormalized("TwoPhotonDensity::from_pure: vector not normalized");
  return TwoPhotonDensity(CMatrix::outer(psi));
}

TwoPhotonDensity TwoPhotonDensity::maximally_mixed() {
  return TwoPhotonDensity(CMatrix::identity(4) * Complex{0.25, 0.0});
}

TwoPhotonDensity TwoPhotonDensity::mixture(double w, const TwoPhotonDensity& a,
                                           const TwoPhotonDensity& b) {
  if (!(w >= 0.0 && w <= 1.0)) throw PreconditionError("mixture: weight outside [0,1]");
  return TwoPhotonDensity(a.m_ * Complex{w, 0.0} + b.m_ * Complex{1.0 - w, 0.0});
}

QutritBasis parse_basis_name(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  std::replace(key.begin(), key.end(), ',', '_');
  if (key == "psi_hv" || key == "1_1") return QutritBasis::PsiHv;
  if (key == "psi_pm") return QutritBasis::PsiPm;
  if (key == "psi_rl") return QutritBasis::PsiRl;
  if (key == "2_0") return QutritBasis::TwoZero;
  if (key == "0_2") return QutritBasis::ZeroTwo;
  throw UnknownName("unknown qutrit basis state '" + std::string(name) + "'");
}

std::string_view basis_name(QutritBasis b) {
  switch (b) {
    case QutritBasis::PsiHv: return "psi-hv";
    case QutritBasis::PsiPm: return "psi-pm";
    case QutritBasis::PsiRl: return "psi-rl";
    case QutritBasis::TwoZero: return "2,0";
    case QutritBasis::ZeroTwo: return "0,2";
  }
  return "?";
}

QutritState basis_state(QutritBasis b) {
  switch (b) {
    case QutritBasis::PsiHv: return {0.0, 1.0, 0.0};
    case QutritBasis::PsiPm: return {kInvSqrt2, 0.0, -kInvSqrt2};
    case QutritBasis::PsiRl: return {kInvSqrt2, 0.0, kInvSqrt2};
    case QutritBasis::TwoZero: return {1.0, 0.0, 0.0};
    case QutritBasis::ZeroTwo: return {0.0, 0.0, 1.0};
  }
  throw UnknownName("unknown qutrit basis state");
}

QutritState basis_state(std::string_view name) { return basis_state(parse_basis_name(name)); }

QutritState source_state(double delta_deg, double phi_deg) {
  const double two_delta = 2.0 * deg(delta_deg);
  return QutritState::normalized(std::cos(two_delta), 0.0,
                                 std::sin(two_delta) * std::polar(1.0, deg(phi_deg)));
}

const CMatrix& symmetric_embedding() {
  static const CMatrix v = [] {
    CMatrix m(4, 3);
    m(0, 0) = 1.0;
    m(1, 1) = kInvSqrt2;
    m(2, 1) = kInvSqrt2;
    m(3, 2) = 1.0;
    return m;
  }();
  return v;
}

std::array<Complex, 4> singlet_vector() { return {0.0, kInvSqrt2, -kInvSqrt2, 0.0}; }

std::array<Complex, 4> embed(const QutritState& q) {
  return {q[0], q[1] * kInvSqrt2, q[1] * kInvSqrt2, q[2]};
}

TwoPhotonDensity qutrit_to_density(const QutritState& q) {
  return TwoPhotonDensity::from_pure(embed(q));
}

SymmetricDecomposition decompose(const TwoPhotonDensity& rho) {
  // Columns: the three symmetric basis vectors, then the singlet.
  CMatrix w(4, 4);
  const auto& v = symmetric_embedding();
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) w(r, c) = v(r, c);
  const auto singlet = singlet_vector();
  for (std::size_t r = 0; r < 4; ++r) w(r, 3) = singlet[r];

  const CMatrix rotated = w.adjoint() * rho.matrix() * w;
  SymmetricDecomposition out;
  out.qutrit_block = CMatrix(3, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) out.qutrit_block(r, c) = rotated(r, c);
  out.singlet_population = rotated(3, 3).real();
  double cross = 0.0;
  for (std::size_t r = 0; r < 3; ++r) cross += std::norm(rotated(r, 3));
  out.cross_coherence_norm = std::sqrt(cross);
  return out;
}

double neutral_polarization_defect(const QutritState& q) {
  return std::abs(std::norm(q[0]) - std::norm(q[2]));
}

CMatrix lift_unitary(const CMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2 || !is_unitary(u, 1e-10))
    throw NotUnitary("lift_unitary: input is not a 2x2 unitary");
  // u maps |h> -> a|h> + c|v> and |v> -> b|h> + d|v>.
  const Complex a = u(0, 0), b = u(0, 1), c = u(1, 0), d = u(1, 1);
  const double r2 = std::numbers::sqrt2;
  return {{a * a, r2 * a * b, b * b},
          {r2 * a * c, a * d + b * c, r2 * b * d},
          {c * c, r2 * c * d, d * d}};
}

QutritState apply(const CMatrix& u3, const QutritState& q) {
  std::array<Complex, 3> out{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) out[r] += u3(r, c) * q[c];
  return QutritState::normalized(out[0], out[1], out[2]);
}

double purity(const TwoPhotonDensity& rho) {
  double s = 0.0;
  for (const auto& z : rho.matrix().data()) s += std::norm(z);
  return s;
}

double fidelity_to_pure(const TwoPhotonDensity& rho, const std::array<Complex, 4>& psi) {
  return expectation(rho.matrix(), psi).real();
}

double fidelity_to_pure(const TwoPhotonDensity& rho, const TwoPhotonDensity& target) {
  const auto eig = eig_hermitian(target.matrix());
  if (eig.values[1] > 1e-8) throw InvalidDensity("fidelity_to_pure: target is not rank-1");
  std::array<Complex, 4> psi{};
  for (std::size_t r = 0; r < 4; ++r) psi[r] = eig.vectors(r, 0);
  return fidelity_to_pure(rho, psi);
}

QutritState symmetrize(const PolarizationState& s, const PolarizationState& t) {
  // (s t + t s) has |hh> weight 2 s_h t_h, |1,1> weight sqrt2 (s_h t_v + s_v t_h)
  // and |vv> weight 2 s_v t_v.
  return QutritState::normalized(s.h() * t.h(), kInvSqrt2 * (s.h() * t.v() + s.v() * t.h()),
                                 s.v() * t.v());
}

namespace {

Complex complex_normal(Rng& rng) {
  const double re = rng.normal();
  return {re, rng.normal()};
}

}  // namespace

std::array<Complex, 4> random_pure_vector(Rng& rng) {
  std::array<Complex, 4> v{};
  double n2 = 0.0;
  for (auto& z : v) {
    z = complex_normal(rng);
    n2 += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(n2);
  return v;
}

QutritState random_qutrit(Rng& rng) {
  const Complex a = complex_normal(rng);
  const Complex b = complex_normal(rng);
  return QutritState::normalized(a, b, complex_normal(rng));
}

PolarizationState random_polarization(Rng& rng) {
  const Complex h = complex_normal(rng);
  return PolarizationState::normalized(h, complex_normal(rng));
}

CMatrix random_unitary2(Rng& rng) {
  // Uniform unit quaternion gives Haar SU(2); a random phase completes U(2).
  std::array<double, 4> q{};
  double n2 = 0.0;
  for (auto& x : q) {
    x = rng.normal();
    n2 += x * x;
  }
  for (auto& x : q) x /= std::sqrt(n2);
  const Complex phase = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
  CMatrix u{{Complex{q[0], q[1]}, Complex{q[2], q[3]}},
            {Complex{-q[2], q[3]}, Complex{q[0], -q[1]}}};
  return u * phase;
}

TwoPhotonDensity random_mixed_density(Rng& rng) {
  CMatrix g(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) g(r, c) = complex_normal(rng);
  CMatrix m = g * g.adjoint();
  m *= 1.0 / m.trace().real();
  return TwoPhotonDensity::from_matrix(m);
}

}  // namespace biphoton
