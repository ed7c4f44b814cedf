#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "biphoton/linalg.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

using Vec3 = std::array<double, 3>;
using Matrix3 = std::array<Vec3, 3>;

/// Five qutrit states with |<l_k|l_{k+1}>| <= 1e-8 cyclically.
class Quintuplet {
 public:
  /// Throws InvalidQuintuplet if an adjacent pair is not orthogonal.
  explicit Quintuplet(std::array<QutritState, 5> states);

  const QutritState& operator[](std::size_t k) const { return states_[k]; }
  const std::array<QutritState, 5>& states() const { return states_; }
  /// Every member rotated by the same qutrit unitary.
  Quintuplet transformed(const CMatrix& u3) const;

 private:
  std::array<QutritState, 5> states_;
};

/// The maximal-violation quintuplet for |1,1>:
/// (sin t / sqrt2, cos t e^{i phi_k}, -sin t e^{2 i phi_k} / sqrt2),
/// t = arccos(5^{-1/4}), phi_k = 4 pi k / 5, k = 1..5.
Quintuplet canonical_quintuplet();

/// Sum_k <l_k|B|l_k> with B the unnormalized symmetric block of rho.
double kcbs_value(const TwoPhotonDensity& rho, const Quintuplet& quint);
double kcbs_value(const CMatrix& qutrit_block, const Quintuplet& quint);

struct KcbsResult {
  double value = 0.0;
  Quintuplet quintuplet = canonical_quintuplet();
  bool violated = false;  // value > 2
};

/// Largest KCBS value over all polarization-frame orientations of the
/// canonical quintuplet (spin-1 lifts of SU(2), three Euler angles).
/// These are exactly the pentagrams of neutrally polarized projectors that
/// the biphoton projection protocol can realize.
KcbsResult kcbs_max(const TwoPhotonDensity& rho, const OptimizerConfig& cfg = {});

/// SU(2) element Rz(alpha) Ry(beta) Rz(gamma) with half-angle convention.
CMatrix euler_su2(double alpha, double beta, double gamma);

/// T_ij = Tr(rho sigma_i (x) sigma_j), Pauli order (x, y, z).
Matrix3 correlation_matrix(const TwoPhotonDensity& rho);

struct ChshSettings {
  Vec3 a, a_prime, b, b_prime;  // unit Bloch directions
};

struct ChshResult {
  double value = 0.0;
  Matrix3 correlation{};
  ChshSettings settings{};
};

/// Horodecki maximum 2 sqrt(t1 + t2) with the settings that attain it.
ChshResult chsh_max(const TwoPhotonDensity& rho);

/// Tr(rho [A (x) (B + B') + A' (x) (B - B')]) built from explicit Pauli sums.
double chsh_expectation(const TwoPhotonDensity& rho, const ChshSettings& settings);

struct HierarchyReport {
  std::size_t samples = 0;
  std::size_t kcbs_violations = 0;  // K* > 2
  std::size_t chsh_violations = 0;  // S > 2
  std::size_t counterexamples = 0;  // K* > 2 and S <= 2
  double min_chsh_among_kcbs_violators = 0.0;  // 0 when there are none
  double max_kcbs = 0.0;
  std::vector<std::size_t> counterexample_indices;
};

HierarchyReport check_hierarchy(std::span<const TwoPhotonDensity> states,
                                const OptimizerConfig& cfg = {});

/// Draws `samples` seeded random densities (random pure two-photon states,
/// Ginibre mixtures, noisy symmetric states with singlet admixture, and
/// channel outputs) and counts hierarchy counterexamples.
HierarchyReport hierarchy_check(std::size_t samples, std::uint64_t seed,
                                const OptimizerConfig& cfg = {});

std::vector<TwoPhotonDensity> hierarchy_samples(std::size_t samples, std::uint64_t seed);

}  // namespace biphoton
