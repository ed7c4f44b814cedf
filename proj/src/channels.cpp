#include "biphoton/channels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "biphoton/errors.hpp"

namespace biphoton {

void ChannelSpec::validate() const {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidP("noise probability " + std::to_string(p) + " outside [0, 1]");
}

std::string_view channel_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Dephasing: return "dephasing";
    case ChannelKind::TwoField: return "two-field";
    case ChannelKind::Isotropic: return "isotropic";
  }
  return "?";
}

ChannelKind parse_channel_kind(std::string_view name) {
  if (name == "dephasing") return ChannelKind::Dephasing;
  if (name == "two-field" || name == "two_field") return ChannelKind::TwoField;
  if (name == "isotropic") return ChannelKind::Isotropic;
  throw UnknownName("unknown channel '" + std::string(name) + "'");
}

ChannelSpec parse_channel_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw PreconditionError("channel spec must look like kind:p, got '" + std::string(text) + "'");
  ChannelSpec spec{parse_channel_kind(text.substr(0, colon)), 0.0};
  const std::string number(text.substr(colon + 1));
  std::size_t used = 0;
  try {
    spec.p = std::stod(number, &used);
  } catch (const std::exception&) {
    throw InvalidP("cannot parse noise probability '" + number + "'");
  }
  if (used != number.size()) throw InvalidP("cannot parse noise probability '" + number + "'");
  spec.validate();
  return spec;
}

double physical_p_max(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Dephasing: return 0.5;
    case ChannelKind::TwoField: return 1.0;
    case ChannelKind::Isotropic: return 0.75;
  }
  return 1.0;
}

double KrausSet::completeness_defect() const {
  CMatrix sum(2, 2);
  for (const auto& k : ops) sum += k.adjoint() * k;
  return max_abs_diff(sum, CMatrix::identity(2));
}

double KrausSet::unitality_defect() const {
  CMatrix sum(2, 2);
  for (const auto& k : ops) sum += k * k.adjoint();
  return max_abs_diff(sum, CMatrix::identity(2));
}

KrausSet kraus_set(const ChannelSpec& spec) {
  spec.validate();
  const double p = spec.p;
  KrausSet set;
  set.ops.push_back(CMatrix::identity(2) * std::sqrt(1.0 - p));
  if (p == 0.0) return set;
  const CMatrix sigma1 = pauli_z(), sigma2 = pauli_x(), sigma3 = pauli_y();
  switch (spec.kind) {
    case ChannelKind::Dephasing:
      set.ops.push_back(sigma1 * std::sqrt(p));
      break;
    case ChannelKind::TwoField:
      set.ops.push_back(sigma1 * std::sqrt(p / 2.0));
      set.ops.push_back(sigma2 * std::sqrt(p / 2.0));
      break;
    case ChannelKind::Isotropic:
      set.ops.push_back(sigma1 * std::sqrt(p / 3.0));
      set.ops.push_back(sigma2 * std::sqrt(p / 3.0));
      set.ops.push_back(sigma3 * std::sqrt(p / 3.0));
      break;
  }
  return set;
}

CMatrix apply_single(const CMatrix& rho, const KrausSet& kraus) {
  CMatrix out(rho.rows(), rho.cols());
  for (const auto& k : kraus.ops) out += k * rho * k.adjoint();
  return out;
}

TwoPhotonDensity apply_two_photon(const TwoPhotonDensity& rho, const ChannelSpec& spec) {
  const auto kraus = kraus_set(spec);
  CMatrix out(4, 4);
  for (const auto& ki : kraus.ops)
    for (const auto& kj : kraus.ops) {
      const CMatrix k = kron(ki, kj);
      out += k * rho.matrix() * k.adjoint();
    }
  return TwoPhotonDensity::from_matrix(out);
}

double p_from_hwp_angle(double theta_deg) {
  const double s = std::sin(2.0 * theta_deg * std::numbers::pi / 180.0);
  return s * s;
}

double p_from_purity(double purity) {
  const double x = 2.0 * purity - 1.0;
  if (!(x > 0.0) || purity > 1.0 + 1e-10)
    throw OutOfDomain("p_from_purity: purity " + std::to_string(purity) + " outside (0.5, 1]");
  return 0.5 * (1.0 - std::pow(std::min(x, 1.0), 0.25));
}

}  // namespace biphoton
