#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "biphoton/linalg.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

// Pauli labels used by the noise channels: sigma1 is the h/v phase flip
// (pauli_z), sigma2 the bit flip (pauli_x), sigma3 pauli_y. This keeps the
// one-field channel a pure phase damping in the {|h>,|v>} basis.

enum class ChannelKind { Dephasing, TwoField, Isotropic };

struct ChannelSpec {
  ChannelKind kind = ChannelKind::Dephasing;
  double p = 0.0;

  /// Throws InvalidP unless p lies in [0, 1].
  void validate() const;
};

std::string_view channel_name(ChannelKind kind);
ChannelKind parse_channel_kind(std::string_view name);
/// "dephasing:0.2", "two-field:0.3", "isotropic:0.1".
ChannelSpec parse_channel_spec(std::string_view text);
/// Upper end of the physically swept range of P for each channel.
double physical_p_max(ChannelKind kind);

struct KrausSet {
  std::vector<CMatrix> ops;  // 2x2 each

  /// Max entry deviation of sum K^H K from the identity.
  double completeness_defect() const;
  /// Max entry deviation of sum K K^H from the identity.
  double unitality_defect() const;
};

KrausSet kraus_set(const ChannelSpec& spec);

/// Single-photon map on a 2x2 density.
CMatrix apply_single(const CMatrix& rho, const KrausSet& kraus);
/// Same channel applied independently to both photons.
TwoPhotonDensity apply_two_photon(const TwoPhotonDensity& rho, const ChannelSpec& spec);

/// P = sin^2(2 theta) for the HWP-controlled channels; theta in degrees.
double p_from_hwp_angle(double theta_deg);
/// P = (1 - (2 Pi - 1)^{1/4}) / 2 for dephasing acting on an ideal neutral state.
/// Throws OutOfDomain when 2 Pi - 1 <= 0 or Pi > 1.
double p_from_purity(double purity);

}  // namespace biphoton
