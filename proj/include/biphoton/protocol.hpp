#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "biphoton/states.hpp"
#include "biphoton/witnesses.hpp"

namespace biphoton {

/// Orthogonal photon polarizations whose symmetrized product is l_k.
class ProjectionPair {
 public:
  /// Throws PreconditionError if |<s|t>| > 1e-10 or k is outside 1..5.
  ProjectionPair(PolarizationState s, PolarizationState t, int k);

  const PolarizationState& s() const { return s_; }
  const PolarizationState& t() const { return t_; }
  int k() const { return k_; }

 private:
  PolarizationState s_, t_;
  int k_;
};

struct MajoranaPair {
  PolarizationState s;
  PolarizationState t;
  bool degenerate = false;  // s == t up to phase
};

/// Roots of a0 z^2 + sqrt2 a1 z + a2 give the two photon polarizations
/// (1, -z) (a missing root is |v>). s is the root nearer |h> on the Poincare
/// sphere; ties fall to larger s1, then larger s2.
MajoranaPair majorana_decompose(const QutritState& q);

/// The five (s_k, t_k) pairs of a quintuplet of neutrally polarized states.
/// Throws PreconditionError if a member does not split into orthogonal photons.
std::array<ProjectionPair, 5> projection_pairs(const Quintuplet& quint);

struct CoincidenceProbs {
  double p_st = 0.0;
  double p_ts = 0.0;
};

/// <s t|rho|s t> and <t s|rho|t s>, conditioned on one photon per port.
CoincidenceProbs coincidence_probs(const TwoPhotonDensity& rho, const ProjectionPair& pair);

/// Sum over settings of the two-order sum minus the singlet population.
double kcbs_estimator(std::span<const CoincidenceProbs, 5> probs, double singlet_pop);
/// Same sum without the singlet subtraction.
double raw_protocol_sum(std::span<const CoincidenceProbs, 5> probs);

struct SettingCounts {
  int k = 0;
  std::int64_t n_st = 0;
  std::int64_t n_ts = 0;
};

struct ProtocolCounts {
  std::array<SettingCounts, 5> settings{};
  std::int64_t pairs_per_setting = 0;
  std::uint64_t seed = 0;

  std::array<CoincidenceProbs, 5> rates() const;
};

ProtocolCounts simulate_counts(const TwoPhotonDensity& rho, const Quintuplet& quint,
                               std::int64_t pairs_per_setting, std::uint64_t seed);

struct KcbsEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// K from the observed rates, sigma from Poisson resampling of every count
/// and a truncated-normal redraw of the singlet population.
KcbsEstimate kcbs_from_counts(const ProtocolCounts& counts, double singlet_pop,
                              double singlet_pop_sigma, int mc_samples, std::uint64_t seed);

/// CSV rows "k,n_st,n_ts,pairs_per_setting" with a header line.
void write_counts_csv(std::ostream& out, const ProtocolCounts& counts);
ProtocolCounts read_counts_csv(std::istream& in);

}  // namespace biphoton
