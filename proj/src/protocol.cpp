#include "biphoton/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kPairOrthogonality = 1e-10;

std::array<Complex, 4> product(const PolarizationState& a, const PolarizationState& b) {
  return {a.h() * b.h(), a.h() * b.v(), a.v() * b.h(), a.v() * b.v()};
}

// (s3, s1, s2) Stokes components; h sits at s3 = +1.
std::array<double, 3> stokes_key(const PolarizationState& p) {
  const Complex hv = std::conj(p.h()) * p.v();
  return {std::norm(p.h()) - std::norm(p.v()), 2.0 * hv.real(), 2.0 * hv.imag()};
}

bool precedes(const PolarizationState& a, const PolarizationState& b) {
  const auto ka = stokes_key(a), kb = stokes_key(b);
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(ka[i] - kb[i]) > 1e-12) return ka[i] > kb[i];
  }
  return true;
}

PolarizationState from_root(Complex z) { return PolarizationState::normalized(1.0, -z); }

}  // namespace

ProjectionPair::ProjectionPair(PolarizationState s, PolarizationState t, int k)
    : s_(s), t_(t), k_(k) {
  if (k < 1 || k > 5) throw PreconditionError("ProjectionPair: k must be in 1..5");
  if (!(std::abs(s.inner(t)) <= kPairOrthogonality))
    throw PreconditionError("ProjectionPair: s and t are not orthogonal");
}

MajoranaPair majorana_decompose(const QutritState& q) {
  const Complex a = q[0];
  const Complex b = std::numbers::sqrt2 * q[1];
  const Complex c = q[2];
  constexpr double tiny = 1e-14;
  const PolarizationState vertical = PolarizationState::vertical();

  PolarizationState first = vertical, second = vertical;
  if (std::abs(a) <= tiny) {
    // One root at infinity; the other solves b z + c = 0.
    if (std::abs(b) > tiny) second = from_root(-c / b);
  } else {
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    // Avoid cancellation: pick the sign that makes |b + sign*disc| large.
    const Complex big = (std::real(std::conj(b) * disc) >= 0.0) ? -(b + disc) : -(b - disc);
    if (std::abs(big) <= tiny) {
      first = second = from_root(Complex{0.0, 0.0});
    } else {
      first = from_root(big / (2.0 * a));
      second = from_root(2.0 * c / big);
    }
  }
  MajoranaPair out{first, second, false};
  if (!precedes(first, second)) std::swap(out.s, out.t);
  out.degenerate = std::abs(std::abs(out.s.inner(out.t)) - 1.0) <= 1e-10;
  return out;
}

std::array<ProjectionPair, 5> projection_pairs(const Quintuplet& quint) {
  auto make = [&](int k) {
    const auto m = majorana_decompose(quint[static_cast<std::size_t>(k - 1)]);
    return ProjectionPair(m.s, m.t, k);
  };
  return {make(1), make(2), make(3), make(4), make(5)};
}

CoincidenceProbs coincidence_probs(const TwoPhotonDensity& rho, const ProjectionPair& pair) {
  return {expectation(rho.matrix(), product(pair.s(), pair.t())).real(),
          expectation(rho.matrix(), product(pair.t(), pair.s())).real()};
}

double raw_protocol_sum(std::span<const CoincidenceProbs, 5> probs) {
  double k = 0.0;
  for (const auto& p : probs) k += p.p_st + p.p_ts;
  return k;
}

double kcbs_estimator(std::span<const CoincidenceProbs, 5> probs, double singlet_pop) {
  if (!(singlet_pop >= 0.0 && singlet_pop <= 1.0))
    throw PreconditionError("kcbs_estimator: singlet population outside [0, 1]");
  return raw_protocol_sum(probs) - 5.0 * singlet_pop;
}

std::array<CoincidenceProbs, 5> ProtocolCounts::rates() const {
  std::array<CoincidenceProbs, 5> r{};
  const double n = static_cast<double>(pairs_per_setting);
  for (std::size_t k = 0; k < 5; ++k)
    r[k] = {static_cast<double>(settings[k].n_st) / n, static_cast<double>(settings[k].n_ts) / n};
  return r;
}

ProtocolCounts simulate_counts(const TwoPhotonDensity& rho, const Quintuplet& quint,
                               std::int64_t pairs_per_setting, std::uint64_t seed) {
  if (pairs_per_setting < 1)
    throw PreconditionError("simulate_counts: pairs_per_setting must be >= 1");
  const auto pairs = projection_pairs(quint);
  ProtocolCounts counts;
  counts.pairs_per_setting = pairs_per_setting;
  counts.seed = seed;
  const double n = static_cast<double>(pairs_per_setting);
  for (std::size_t k = 0; k < 5; ++k) {
    const auto p = coincidence_probs(rho, pairs[k]);
    Rng st(derive_seed(seed, k + 1, 0));
    Rng ts(derive_seed(seed, k + 1, 1));
    counts.settings[k] = {static_cast<int>(k + 1), st.poisson(n * std::max(0.0, p.p_st)),
                          ts.poisson(n * std::max(0.0, p.p_ts))};
  }
  return counts;
}

KcbsEstimate kcbs_from_counts(const ProtocolCounts& counts, double singlet_pop,
                              double singlet_pop_sigma, int mc_samples, std::uint64_t seed) {
  if (mc_samples < 100) throw PreconditionError("kcbs_from_counts: mc_samples must be >= 100");
  if (counts.pairs_per_setting < 1)
    throw PreconditionError("kcbs_from_counts: pairs_per_setting must be >= 1");
  if (!(singlet_pop_sigma >= 0.0))
    throw PreconditionError("kcbs_from_counts: singlet sigma must be >= 0");

  KcbsEstimate est;
  const auto observed = counts.rates();
  est.value = kcbs_estimator(observed, singlet_pop);

  const double n = static_cast<double>(counts.pairs_per_setting);
  std::vector<double> draws(static_cast<std::size_t>(mc_samples));
  for (std::size_t m = 0; m < draws.size(); ++m) {
    Rng rng(derive_seed(seed, m));
    std::array<CoincidenceProbs, 5> resampled{};
    for (std::size_t k = 0; k < 5; ++k) {
      resampled[k].p_st = static_cast<double>(rng.poisson(static_cast<double>(counts.settings[k].n_st))) / n;
      resampled[k].p_ts = static_cast<double>(rng.poisson(static_cast<double>(counts.settings[k].n_ts))) / n;
    }
    double singlet = singlet_pop;
    if (singlet_pop_sigma > 0.0) {
      int tries = 0;
      do {
        singlet = singlet_pop + singlet_pop_sigma * rng.normal();
      } while ((singlet < 0.0 || singlet > 1.0) && ++tries < 1000);
      singlet = std::clamp(singlet, 0.0, 1.0);
    }
    draws[m] = kcbs_estimator(resampled, singlet);
  }
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= static_cast<double>(draws.size());
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  est.sigma = std::sqrt(var / static_cast<double>(draws.size() - 1));
  return est;
}

void write_counts_csv(std::ostream& out, const ProtocolCounts& counts) {
  out << "k,n_st,n_ts,pairs_per_setting\n";
  for (const auto& s : counts.settings)
    out << s.k << ',' << s.n_st << ',' << s.n_ts << ',' << counts.pairs_per_setting << '\n';
  if (!out) throw IoError("failed writing protocol counts");
}

ProtocolCounts read_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,n_st,n_ts,pairs_per_setting", 0) != 0)
    throw PreconditionError("protocol CSV: missing header k,n_st,n_ts,pairs_per_setting");
  ProtocolCounts counts;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= 5) throw PreconditionError("protocol CSV: more than five settings");
    std::istringstream fields(line);
    std::string k, st, ts, pairs;
    if (!std::getline(fields, k, ',') || !std::getline(fields, st, ',') ||
        !std::getline(fields, ts, ',') || !std::getline(fields, pairs, ','))
      throw PreconditionError("protocol CSV: malformed row '" + line + "'");
    try {
      counts.settings[row] = {std::stoi(k), std::stoll(st), std::stoll(ts)};
      const auto n = std::stoll(pairs);
      if (row > 0 && n != counts.pairs_per_setting)
        throw PreconditionError("protocol CSV: pairs_per_setting differs between rows");
      counts.pairs_per_setting = n;
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const PreconditionError*>(&e)) throw;
      throw PreconditionError("protocol CSV: malformed number in '" + line + "'");
    }
    const auto& s = counts.settings[row];
    if (s.n_st < 0 || s.n_ts < 0 || s.n_st + s.n_ts > counts.pairs_per_setting)
      throw PreconditionError("protocol CSV: counts outside [0, pairs_per_setting]");
    ++row;
  }
  if (row != 5) throw PreconditionError("protocol CSV: expected five settings");
  return counts;
}

}  // namespace biphoton
