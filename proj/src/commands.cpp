#include "biphoton/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/protocol.hpp"
#include "biphoton/serialization.hpp"
#include "biphoton/witnesses.hpp"

namespace biphoton::cli {

namespace {

constexpr int kThresholdGrid = 40;
// A witness counts as below 2 only past this margin, so S = 2 exactly at the
// end of the dephasing range is not mistaken for a crossing.
constexpr double kCrossingMargin = 1e-9;

std::string g6(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

TwoPhotonDensity ideal_with_singlet(double singlet_fraction) {
  if (!(singlet_fraction >= 0.0 && singlet_fraction <= 1.0))
    throw PreconditionError("singlet fraction must be in [0, 1]");
  const auto ideal = qutrit_to_density(basis_state(QutritBasis::PsiHv));
  const auto singlet = TwoPhotonDensity::from_pure(singlet_vector());
  return TwoPhotonDensity::mixture(1.0 - singlet_fraction, ideal, singlet);
}

std::optional<double> crossing(const std::function<double(double)>& witness, double p_hi,
                               double tol) {
  double lo = 0.0;
  if (!(witness(lo) > 2.0))
    throw NotBracketed("witness is not above 2 at P = 0; no crossing to bracket");
  double hi = lo;
  bool found = false;
  for (int i = 1; i <= kThresholdGrid; ++i) {
    const double p = p_hi * i / kThresholdGrid;
    if (witness(p) < 2.0 - kCrossingMargin) {
      hi = p;
      found = true;
      break;
    }
    lo = p;
  }
  if (!found) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (witness(mid) > 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

QutritBasis default_state(ChannelKind kind) {
  return kind == ChannelKind::TwoField ? QutritBasis::PsiRl : QutritBasis::PsiPm;
}

std::vector<SweepRow> sweep(ChannelKind kind, const QutritState& initial, double p_min,
                            double p_max, int steps, const OptimizerConfig& cfg) {
  if (steps < 2) throw PreconditionError("sweep: steps must be >= 2");
  if (!(p_min <= p_max)) throw PreconditionError("sweep: p_min must not exceed p_max");
  ChannelSpec{kind, p_min}.validate();
  ChannelSpec{kind, p_max}.validate();
  cfg.validate();
  const auto rho0 = qutrit_to_density(initial);
  std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double p = i + 1 == rows.size() ? p_max : p_min + (p_max - p_min) * i / (steps - 1);
    const auto rho = apply_two_photon(rho0, {kind, p});
    rows[i] = {p, kcbs_max(rho, cfg).value, chsh_max(rho).value, purity(rho),
               decompose(rho).singlet_population};
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "P,K_max,S_max,purity,singlet_population\n";
  for (const auto& r : rows)
    out << g6(r.p) << ',' << g6(r.kcbs_max) << ',' << g6(r.chsh_max) << ',' << g6(r.purity)
        << ',' << g6(r.singlet_population) << '\n';
  if (!out) throw IoError("failed writing sweep CSV");
}

Thresholds thresholds(ChannelKind kind, const QutritState& initial, double tol,
                      const OptimizerConfig& cfg) {
  if (!(tol > 0.0)) throw PreconditionError("thresholds: tol must be > 0");
  cfg.validate();
  const auto rho0 = qutrit_to_density(initial);
  const double p_hi = physical_p_max(kind);
  auto channel_out = [&](double p) { return apply_two_photon(rho0, {kind, std::min(p, p_hi)}); };
  Thresholds t;
  t.p_kcbs = crossing([&](double p) { return kcbs_max(channel_out(p), cfg).value; }, p_hi, tol);
  t.p_chsh = crossing([&](double p) { return chsh_max(channel_out(p)).value; }, p_hi, tol);
  return t;
}

nlohmann::json thresholds_json(ChannelKind kind, const Thresholds& t) {
  auto value = [](const std::optional<double>& v) -> nlohmann::json {
    if (v) return *v;
    return "none";
  };
  nlohmann::json j;
  j["channel"] = std::string(channel_name(kind));
  j["p_kcbs"] = value(t.p_kcbs);
  j["p_chsh"] = value(t.p_chsh);
  // A missing CHSH crossing means CHSH outlives KCBS on the whole range.
  j["hierarchy_ok"] = !t.p_kcbs || !t.p_chsh || *t.p_kcbs <= *t.p_chsh;
  return j;
}

DemoMethod parse_demo_method(const std::string& name) {
  if (name == "dm") return DemoMethod::DensityMatrix;
  if (name == "protocol") return DemoMethod::Protocol;
  throw UnknownName("unknown kcbs-demo method '" + name + "' (expected dm or protocol)");
}

nlohmann::json kcbs_demo(const KcbsDemoOptions& opt, const OptimizerConfig& cfg) {
  if (opt.pairs < 1) throw PreconditionError("kcbs-demo: pairs must be >= 1");
  if (opt.mc_samples < 100) throw PreconditionError("kcbs-demo: mc samples must be >= 100");
  cfg.validate();
  const auto truth = ideal_with_singlet(opt.singlet_fraction);
  nlohmann::json j;
  j["singlet_fraction"] = opt.singlet_fraction;
  j["pairs"] = opt.pairs;
  j["seed"] = opt.seed;
  double value = 0.0, sigma = 0.0;

  if (opt.method == DemoMethod::DensityMatrix) {
    const auto settings = tomo_settings();
    const auto records = simulate_tomo(truth, settings, opt.pairs, derive_seed(opt.seed, 1));
    const auto rho = mle_reconstruct(records);
    value = kcbs_max(rho, cfg).value;
    const auto mc = mc_error(
        records, [&](const TwoPhotonDensity& r) { return kcbs_max(r, cfg).value; },
        opt.mc_samples, derive_seed(opt.seed, 2));
    sigma = mc.sigma;
    j["method"] = "dm";
    j["mc_mean"] = mc.mean;
    j["fidelity_to_truth"] = fidelity_to_pure(rho, embed(basis_state(QutritBasis::PsiHv)));
    j["singlet_population"] = decompose(rho).singlet_population;
  } else {
    const auto quint = canonical_quintuplet();
    const auto counts = simulate_counts(truth, quint, opt.pairs, derive_seed(opt.seed, 1));
    const auto est = kcbs_from_counts(counts, opt.singlet_fraction, 0.0, opt.mc_samples,
                                      derive_seed(opt.seed, 2));
    value = est.value;
    sigma = est.sigma;
    j["method"] = "protocol";
    j["raw_sum"] = raw_protocol_sum(counts.rates());
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : counts.settings) rows.push_back({{"k", s.k}, {"n_st", s.n_st}, {"n_ts", s.n_ts}});
    j["counts"] = rows;
  }
  j["K"] = value;
  j["sigma"] = sigma;
  j["significance"] = sigma > 0.0 ? nlohmann::json((value - 2.0) / sigma) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json hierarchy_json(std::size_t samples, std::uint64_t seed, const OptimizerConfig& cfg) {
  if (samples < 1) throw PreconditionError("hierarchy: samples must be >= 1");
  const auto r = hierarchy_check(samples, seed, cfg);
  nlohmann::json j;
  j["samples"] = r.samples;
  j["seed"] = seed;
  j["kcbs_violations"] = r.kcbs_violations;
  j["chsh_violations"] = r.chsh_violations;
  j["counterexamples"] = r.counterexamples;
  j["counterexample_indices"] = r.counterexample_indices;
  j["min_chsh_among_kcbs_violators"] = r.min_chsh_among_kcbs_violators;
  j["max_kcbs"] = r.max_kcbs;
  return j;
}

TomoDemoResult tomo_demo(const TomoDemoOptions& opt, const std::vector<TomoRecord>* given,
                         const OptimizerConfig& cfg) {
  TomoDemoResult out;
  if (given) {
    out.records = *given;
  } else {
    const auto settings = tomo_settings(opt.scheme);
    out.records = simulate_tomo(opt.truth, settings, opt.exposure, opt.seed);
  }
  const auto lin = linear_inversion(out.records);
  const auto rho = mle_reconstruct(out.records);
  const auto parts = decompose(rho);
  auto& j = out.report;
  j["records"] = out.records.size();
  j["linear_inversion_positive"] = lin.positive;
  j["linear_inversion_min_eigenvalue"] = lin.min_eigenvalue;
  j["rho"] = to_json(rho);
  j["purity"] = purity(rho);
  j["singlet_population"] = parts.singlet_population;
  j["kcbs_max"] = kcbs_max(rho, cfg).value;
  j["chsh_max"] = chsh_max(rho).value;
  if (!given) {
    const auto eig = eig_hermitian(opt.truth.matrix());
    std::array<Complex, 4> top{};
    for (std::size_t r = 0; r < 4; ++r) top[r] = eig.vectors(r, 0);
    // Fidelity is reported against the dominant eigenvector of the truth.
    j["fidelity_to_truth_top_eigenvector"] = fidelity_to_pure(rho, top);
  }
  if (opt.mc_samples > 0) {
    const auto mc = mc_error(
        out.records, [&](const TwoPhotonDensity& r) { return kcbs_max(r, cfg).value; },
        opt.mc_samples, derive_seed(opt.seed, 7));
    j["kcbs_max_mc_mean"] = mc.mean;
    j["kcbs_max_mc_sigma"] = mc.sigma;
  }
  return out;
}

}  // namespace biphoton::cli
