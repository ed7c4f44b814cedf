#pragma once

#include <array>
#include <string_view>

#include "biphoton/linalg.hpp"
#include "biphoton/random.hpp"

// Basis orderings used everywhere:
//   qutrit     {|2,0>, |1,1>, |0,2>}   (|n_h, n_v> photon counts)
//   two-photon {|hh>, |hv>, |vh>, |vv>}
//   photon     {|h>, |v>}

namespace biphoton {

/// Pure biphoton polarization qutrit. Always normalized to 1e-10.
class QutritState {
 public:
  /// Throws NotNormalized unless the squared norm is 1 within 1e-10.
  QutritState(Complex a0, Complex a1, Complex a2);
  /// Rescales to unit norm; throws NotNormalized for the zero vector.
  static QutritState normalized(Complex a0, Complex a1, Complex a2);

  const std::array<Complex, 3>& amplitudes() const { return amp_; }
  Complex operator[](std::size_t i) const { return amp_[i]; }

  Complex inner(const QutritState& other) const;  // <this|other>

 private:
  std::array<Complex, 3> amp_;
};

/// |<a|b>| = 1 within tol, i.e. equal up to global phase.
bool same_ray(const QutritState& a, const QutritState& b, double tol = 1e-10);

/// Single-photon Jones vector, unit norm.
class PolarizationState {
 public:
  PolarizationState(Complex h, Complex v);
  static PolarizationState normalized(Complex h, Complex v);

  static PolarizationState horizontal() { return {1.0, 0.0}; }
  static PolarizationState vertical() { return {0.0, 1.0}; }
  static PolarizationState diagonal();      // (|h> + |v>)/sqrt2
  static PolarizationState antidiagonal();  // (|h> - |v>)/sqrt2
  static PolarizationState right();         // (|h> + i|v>)/sqrt2
  static PolarizationState left();          // (|h> - i|v>)/sqrt2

  Complex h() const { return h_; }
  Complex v() const { return v_; }
  Complex inner(const PolarizationState& other) const;
  PolarizationState transformed(const CMatrix& u) const;

 private:
  Complex h_, v_;
};

bool same_ray(const PolarizationState& a, const PolarizationState& b, double tol = 1e-10);

/// Two-photon polarization density operator: Hermitian, PSD, unit trace.
class TwoPhotonDensity {
 public:
  /// Validates a 4x4 matrix. Eigenvalues in [-1e-10, 0) are clipped and the
  /// result renormalized; anything further from the invariants throws
  /// InvalidDensity.
  static TwoPhotonDensity from_matrix(const CMatrix& m);
  static TwoPhotonDensity from_pure(const std::array<Complex, 4>& psi);
  static TwoPhotonDensity maximally_mixed();
  /// Convex combination w*a + (1-w)*b.
  static TwoPhotonDensity mixture(double w, const TwoPhotonDensity& a, const TwoPhotonDensity& b);

  const CMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  explicit TwoPhotonDensity(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

struct SymmetricDecomposition {
  CMatrix qutrit_block;  // 3x3, unnormalized; trace = triplet population
  double singlet_population = 0.0;
  double cross_coherence_norm = 0.0;
};

enum class QutritBasis { PsiHv, PsiPm, PsiRl, TwoZero, ZeroTwo };

/// Accepts psi_hv / psi-hv, psi_pm / psi-pm, psi_rl / psi-rl,
/// 2_0 / 2,0 and 0_2 / 0,2. Throws UnknownName otherwise.
QutritBasis parse_basis_name(std::string_view name);
std::string_view basis_name(QutritBasis b);
QutritState basis_state(QutritBasis b);
QutritState basis_state(std::string_view name);

/// Two-crystal source state (cos 2delta, 0, sin 2delta e^{i phi}); angles in degrees.
QutritState source_state(double delta_deg, double phi_deg);

/// 4x3 isometry mapping the qutrit basis into the symmetric two-photon subspace.
const CMatrix& symmetric_embedding();
/// (|hv> - |vh>)/sqrt2
std::array<Complex, 4> singlet_vector();
std::array<Complex, 4> embed(const QutritState& q);

TwoPhotonDensity qutrit_to_density(const QutritState& q);
SymmetricDecomposition decompose(const TwoPhotonDensity& rho);

/// |<S_z>| with S_z = diag(+1, 0, -1) in the qutrit basis.
double neutral_polarization_defect(const QutritState& q);

/// Spin-1 image of a single-photon unitary: u (x) u restricted to the
/// symmetric subspace, in the qutrit basis. Throws NotUnitary.
CMatrix lift_unitary(const CMatrix& u);
QutritState apply(const CMatrix& u3, const QutritState& q);

double purity(const TwoPhotonDensity& rho);
/// <psi|rho|psi> where psi is the rank-1 target.
double fidelity_to_pure(const TwoPhotonDensity& rho, const TwoPhotonDensity& target);
double fidelity_to_pure(const TwoPhotonDensity& rho, const std::array<Complex, 4>& psi);

/// (s (x) t + t (x) s) normalized, expressed as a qutrit.
QutritState symmetrize(const PolarizationState& s, const PolarizationState& t);

// Random states for property runs and the hierarchy check.
std::array<Complex, 4> random_pure_vector(Rng& rng);
QutritState random_qutrit(Rng& rng);
PolarizationState random_polarization(Rng& rng);
CMatrix random_unitary2(Rng& rng);
/// Ginibre-distributed full-rank density.
TwoPhotonDensity random_mixed_density(Rng& rng);

}  // namespace biphoton
