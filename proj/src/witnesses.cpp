#include "biphoton/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "biphoton/channels.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {

constexpr double kOrthogonalityTolerance = 1e-8;

using Amp3 = std::array<Complex, 3>;
using Block3 = std::array<Complex, 9>;

Block3 to_block(const CMatrix& m) {
  Block3 b{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) b[3 * r + c] = m(r, c);
  return b;
}

double quadratic(const Block3& b, const Amp3& w) {
  double acc = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    const Complex row = b[3 * r] * w[0] + b[3 * r + 1] * w[1] + b[3 * r + 2] * w[2];
    acc += (std::conj(w[r]) * row).real();
  }
  return acc;
}

std::array<CMatrix, 3> pauli_set() { return {pauli_x(), pauli_y(), pauli_z()}; }

CMatrix bloch_operator(const Vec3& n) {
  const auto p = pauli_set();
  return p[0] * n[0] + p[1] * n[1] + p[2] * n[2];
}

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n == 0.0) return {1.0, 0.0, 0.0};
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 apply(const Matrix3& t, const Vec3& v) {
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out[i] += t[i][j] * v[j];
  return out;
}

// Real eigenvector from a Jacobi column: rotate away the global phase.
Vec3 real_column(const CMatrix& vecs, std::size_t k) {
  std::size_t big = 0;
  for (std::size_t r = 1; r < 3; ++r)
    if (std::abs(vecs(r, k)) > std::abs(vecs(big, k))) big = r;
  const Complex phase = std::conj(vecs(big, k)) / std::abs(vecs(big, k));
  Vec3 v{};
  for (std::size_t r = 0; r < 3; ++r) v[r] = (vecs(r, k) * phase).real();
  return normalized(v);
}

}  // namespace

Quintuplet::Quintuplet(std::array<QutritState, 5> states) : states_(std::move(states)) {
  for (std::size_t k = 0; k < 5; ++k) {
    const double overlap = std::abs(states_[k].inner(states_[(k + 1) % 5]));
    if (!(overlap <= kOrthogonalityTolerance))
      throw InvalidQuintuplet("quintuplet members " + std::to_string(k + 1) + " and " +
                              std::to_string((k + 1) % 5 + 1) + " are not orthogonal");
  }
}

Quintuplet Quintuplet::transformed(const CMatrix& u3) const {
  return Quintuplet({apply(u3, states_[0]), apply(u3, states_[1]), apply(u3, states_[2]),
                     apply(u3, states_[3]), apply(u3, states_[4])});
}

Quintuplet canonical_quintuplet() {
  const double theta = std::acos(std::pow(5.0, -0.25));
  const double s = std::sin(theta) / std::numbers::sqrt2;
  const double c = std::cos(theta);
  auto member = [&](int k) {
    const double phi = 4.0 * std::numbers::pi * k / 5.0;
    return QutritState::normalized(s, c * std::polar(1.0, phi), -s * std::polar(1.0, 2.0 * phi));
  };
  return Quintuplet({member(1), member(2), member(3), member(4), member(5)});
}

double kcbs_value(const CMatrix& qutrit_block, const Quintuplet& quint) {
  const Block3 b = to_block(qutrit_block);
  double k = 0.0;
  for (const auto& l : quint.states()) k += quadratic(b, l.amplitudes());
  return k;
}

double kcbs_value(const TwoPhotonDensity& rho, const Quintuplet& quint) {
  return kcbs_value(decompose(rho).qutrit_block, quint);
}

CMatrix euler_su2(double alpha, double beta, double gamma) {
  const Complex ea = std::polar(1.0, -0.5 * alpha), eg = std::polar(1.0, -0.5 * gamma);
  const double cb = std::cos(0.5 * beta), sb = std::sin(0.5 * beta);
  const CMatrix rz_a{{ea, 0.0}, {0.0, std::conj(ea)}};
  const CMatrix ry{{cb, -sb}, {sb, cb}};
  const CMatrix rz_g{{eg, 0.0}, {0.0, std::conj(eg)}};
  return rz_a * ry * rz_g;
}

KcbsResult kcbs_max(const TwoPhotonDensity& rho, const OptimizerConfig& cfg) {
  const Block3 block = to_block(decompose(rho).qutrit_block);
  const Quintuplet canonical = canonical_quintuplet();
  std::array<Amp3, 5> base{};
  for (std::size_t k = 0; k < 5; ++k) base[k] = canonical[k].amplitudes();

  auto objective = [&](std::span<const double> x) {
    const CMatrix u = euler_su2(x[0], x[1], x[2]);
    const Complex a = u(0, 0), b = u(0, 1), c = u(1, 0), d = u(1, 1);
    const double r2 = std::numbers::sqrt2;
    const Block3 lift{a * a,      r2 * a * b,    b * b,      r2 * a * c, a * d + b * c,
                      r2 * b * d, c * c,         r2 * c * d, d * d};
    double k = 0.0;
    for (const auto& l : base) {
      const Amp3 w{lift[0] * l[0] + lift[1] * l[1] + lift[2] * l[2],
                   lift[3] * l[0] + lift[4] * l[1] + lift[5] * l[2],
                   lift[6] * l[0] + lift[7] * l[1] + lift[8] * l[2]};
      k += quadratic(block, w);
    }
    return k;
  };

  const std::array<double, 3> x0{0.0, 0.0, 0.0};
  const auto best = local_search_max(objective, x0, cfg);
  KcbsResult result;
  result.value = best.value;
  result.quintuplet = canonical.transformed(lift_unitary(euler_su2(best.x[0], best.x[1], best.x[2])));
  result.violated = result.value > 2.0;
  return result;
}

Matrix3 correlation_matrix(const TwoPhotonDensity& rho) {
  const auto p = pauli_set();
  Matrix3 t{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      t[i][j] = (rho.matrix() * kron(p[i], p[j])).trace().real();
  return t;
}

ChshResult chsh_max(const TwoPhotonDensity& rho) {
  ChshResult result;
  result.correlation = correlation_matrix(rho);
  const Matrix3& t = result.correlation;

  CMatrix ttt(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += t[k][i] * t[k][j];
      ttt(i, j) = s;
    }
  const auto eig = eig_hermitian(ttt);
  const double t1 = std::max(0.0, eig.values[0]);
  const double t2 = std::max(0.0, eig.values[1]);
  result.value = 2.0 * std::sqrt(t1 + t2);

  const Vec3 c1 = real_column(eig.vectors, 0);
  const Vec3 c2 = real_column(eig.vectors, 1);
  const double angle = std::atan2(std::sqrt(t2), std::sqrt(t1));
  const double ca = std::cos(angle), sa = std::sin(angle);
  auto& s = result.settings;
  for (std::size_t i = 0; i < 3; ++i) {
    s.b[i] = ca * c1[i] + sa * c2[i];
    s.b_prime[i] = ca * c1[i] - sa * c2[i];
  }
  s.a = normalized(apply(t, c1));
  s.a_prime = normalized(apply(t, c2));
  return result;
}

double chsh_expectation(const TwoPhotonDensity& rho, const ChshSettings& settings) {
  const CMatrix a = bloch_operator(settings.a), ap = bloch_operator(settings.a_prime);
  const CMatrix b = bloch_operator(settings.b), bp = bloch_operator(settings.b_prime);
  const CMatrix op = kron(a, b + bp) + kron(ap, b - bp);
  return (rho.matrix() * op).trace().real();
}

HierarchyReport check_hierarchy(std::span<const TwoPhotonDensity> states,
                                const OptimizerConfig& cfg) {
  std::vector<double> k_values(states.size()), s_values(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    k_values[i] = kcbs_max(states[i], cfg).value;
    s_values[i] = chsh_max(states[i]).value;
  });

  HierarchyReport report;
  report.samples = states.size();
  double min_s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    report.max_kcbs = std::max(report.max_kcbs, k_values[i]);
    if (s_values[i] > 2.0) ++report.chsh_violations;
    if (k_values[i] > 2.0) {
      ++report.kcbs_violations;
      min_s = std::min(min_s, s_values[i]);
      if (s_values[i] <= 2.0) {
        ++report.counterexamples;
        report.counterexample_indices.push_back(i);
      }
    }
  }
  report.min_chsh_among_kcbs_violators = report.kcbs_violations > 0 ? min_s : 0.0;
  return report;
}

std::vector<TwoPhotonDensity> hierarchy_samples(std::size_t samples, std::uint64_t seed) {
  std::vector<TwoPhotonDensity> states;
  states.reserve(samples);
  const auto singlet = TwoPhotonDensity::from_pure(singlet_vector());
  const auto white = TwoPhotonDensity::maximally_mixed();
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, i));
    switch (i % 5) {
      case 0:
        states.push_back(TwoPhotonDensity::from_pure(random_pure_vector(rng)));
        break;
      case 1:
        states.push_back(random_mixed_density(rng));
        break;
      case 2: {
        // symmetric pure state with white noise and singlet admixture
        const auto sym = qutrit_to_density(random_qutrit(rng));
        const double noise = rng.uniform(0.0, 0.5);
        const double singlet_share = rng.uniform(0.0, 0.2);
        const auto noisy = TwoPhotonDensity::mixture(1.0 - noise, sym, white);
        states.push_back(TwoPhotonDensity::mixture(1.0 - singlet_share, noisy, singlet));
        break;
      }
      case 3: {
        const auto kind = static_cast<ChannelKind>(static_cast<int>(rng.uniform(0.0, 3.0)));
        const ChannelSpec spec{kind, rng.uniform(0.0, physical_p_max(kind))};
        states.push_back(apply_two_photon(qutrit_to_density(random_qutrit(rng)), spec));
        break;
      }
      default: {
        // neutrally polarized state under white noise, near the KCBS boundary
        const auto s = random_polarization(rng);
        const PolarizationState t(-std::conj(s.v()), std::conj(s.h()));
        const auto sym = qutrit_to_density(symmetrize(s, t));
        states.push_back(TwoPhotonDensity::mixture(1.0 - rng.uniform(0.0, 0.4), sym, white));
        break;
      }
    }
  }
  return states;
}

HierarchyReport hierarchy_check(std::size_t samples, std::uint64_t seed,
                                const OptimizerConfig& cfg) {
  if (samples < 1) throw PreconditionError("hierarchy_check: samples must be >= 1");
  const auto states = hierarchy_samples(samples, seed);
  return check_hierarchy(states, cfg);
}

}  // namespace biphoton
