#include "biphoton/optics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr double kCompileResidual = 1e-8;

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

CMatrix rotation(double theta_deg) {
  const double c = std::cos(rad(theta_deg)), s = std::sin(rad(theta_deg));
  return {{c, -s}, {s, c}};
}

CMatrix plate(double theta_deg, Complex slow_phase) {
  const CMatrix retarder{{1.0, 0.0}, {0.0, slow_phase}};
  return rotation(theta_deg) * retarder * rotation(-theta_deg);
}

double fidelity_to_h(const CMatrix& u, const PolarizationState& s) {
  return std::norm(u(0, 0) * s.h() + u(0, 1) * s.v());
}

double norm2(const WavePlateSetting& w) {
  return w.qwp_a * w.qwp_a + w.hwp * w.hwp + w.qwp_b * w.qwp_b;
}

WavePlateSetting reduced(const WavePlateSetting& w) {
  return {reduce_angle(w.qwp_a), reduce_angle(w.hwp), reduce_angle(w.qwp_b)};
}

template <typename ToSetting>
bool search(const ProjectionPair& pair, const OptimizerConfig& cfg, std::size_t dims,
            ToSetting to_setting, WavePlateSetting& best) {
  OptimizerConfig local = cfg;
  local.restarts = 1;
  local.initial_step = 10.0;
  bool found = false;
  double best_norm = std::numeric_limits<double>::infinity();
  auto objective = [&](std::span<const double> x) {
    return fidelity_to_h(setting_unitary(to_setting(x)), pair.s());
  };
  // Deterministic grid of starts over the angle box.
  const std::array<double, 5> grid{-72.0, -36.0, 0.0, 36.0, 72.0};
  std::vector<std::vector<double>> starts;
  if (dims == 2) {
    for (double a : grid)
      for (double h : grid) starts.push_back({a, h});
  } else {
    for (double a : grid)
      for (double h : grid)
        for (double b : grid) starts.push_back({a, h, b});
  }
  for (const auto& x0 : starts) {
    const auto opt = local_search_max(objective, x0, local);
    const WavePlateSetting candidate = reduced(to_setting(opt.x));
    if (projection_residual(candidate, pair) > kCompileResidual) continue;
    const double n = norm2(candidate);
    if (n < best_norm - 1e-9) {
      best_norm = n;
      best = candidate;
      found = true;
    }
  }
  return found;
}

}  // namespace

CMatrix hwp_matrix(double theta_deg) { return plate(theta_deg, -1.0); }

CMatrix qwp_matrix(double theta_deg) { return plate(theta_deg, Complex{0.0, -1.0}); }

StokesVector stokes(const PolarizationState& p) {
  const Complex hv = std::conj(p.h()) * p.v();
  return {2.0 * hv.real(), 2.0 * hv.imag(), std::norm(p.h()) - std::norm(p.v())};
}

CMatrix setting_unitary(const WavePlateSetting& w) {
  return qwp_matrix(w.qwp_b) * hwp_matrix(w.hwp) * qwp_matrix(w.qwp_a);
}

double reduce_angle(double deg) {
  double r = std::fmod(deg, 180.0);
  if (r <= -90.0) r += 180.0;
  if (r > 90.0) r -= 180.0;
  return r;
}

double projection_residual(const WavePlateSetting& w, const ProjectionPair& pair) {
  return 1.0 - std::sqrt(fidelity_to_h(setting_unitary(w), pair.s()));
}

WavePlateSetting compile_projection(const ProjectionPair& pair, const OptimizerConfig& cfg) {
  cfg.validate();
  WavePlateSetting best;
  auto symmetric = [](std::span<const double> x) { return WavePlateSetting{x[0], x[1], -x[0]}; };
  if (search(pair, cfg, 2, symmetric, best)) return best;
  auto free = [](std::span<const double> x) { return WavePlateSetting{x[0], x[1], x[2]}; };
  if (search(pair, cfg, 3, free, best)) return best;
  throw NoConvergence("compile_projection: no wave-plate setting reached residual 1e-8");
}

PentagramReport pentagram_report(const Quintuplet& quint) {
  PentagramReport report;
  for (const auto& pair : projection_pairs(quint)) {
    for (const auto* p : {&pair.s(), &pair.t()}) {
      const auto sv = stokes(*p);
      report.points.push_back(sv);
      report.axis_distances.push_back(std::hypot(sv.s1, sv.s2));
    }
    const auto ss = stokes(pair.s());
    report.s_azimuths_deg.push_back(std::atan2(ss.s2, ss.s1) * 180.0 / std::numbers::pi);
  }
  return report;
}

std::vector<Table1Row> table1(const OptimizerConfig& cfg) {
  std::vector<Table1Row> rows;
  for (const auto& pair : projection_pairs(canonical_quintuplet()))
    rows.push_back({pair.k(), compile_projection(pair, cfg)});
  return rows;
}

void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
  auto fmt = [](double v) {
    if (std::abs(v) < 0.005) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  out << "k,qwp_a,hwp,qwp_b\n";
  for (const auto& r : rows)
    out << r.k << ',' << fmt(r.setting.qwp_a) << ',' << fmt(r.setting.hwp) << ','
        << fmt(r.setting.qwp_b) << '\n';
  if (!out) throw IoError("failed writing table1 CSV");
}

}  // namespace biphoton
