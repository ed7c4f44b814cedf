#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "biphoton/commands.hpp"
#include "biphoton/errors.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

QutritState initial_for(ChannelKind kind) { return basis_state(cli::default_state(kind)); }

}  // namespace

TEST_CASE("default initial states") {
  CHECK(cli::default_state(ChannelKind::Dephasing) == QutritBasis::PsiPm);
  CHECK(cli::default_state(ChannelKind::Isotropic) == QutritBasis::PsiPm);
  CHECK(cli::default_state(ChannelKind::TwoField) == QutritBasis::PsiRl);
}

TEST_CASE("dephasing sweep follows the closed form") {
  const auto rows = cli::sweep(ChannelKind::Dephasing, initial_for(ChannelKind::Dephasing), 0.0, 0.5, 51);
  REQUIRE(rows.size() == 51);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double p = rows[i].p;
    CHECK(p == doctest::Approx(0.01 * i).epsilon(1e-12));
    CHECK(std::abs(rows[i].chsh_max - 2 * std::sqrt(1 + std::pow(1 - 2 * p, 4))) < 1e-6);
    if (i + 1 < rows.size()) CHECK(rows[i].chsh_max > 2.0 + 1e-9);
    CHECK(std::abs(rows[i].kcbs_max - oracle::dephasing_kcbs_model(p)) < 1e-6);
    CHECK(std::abs(rows[i].singlet_population) < 1e-12);
    if (p < 0.5) CHECK(std::abs(p_from_purity(rows[i].purity) - p) < 1e-6);
  }
  CHECK(rows.back().chsh_max == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("isotropic and two-field sweeps") {
  const auto iso = cli::sweep(ChannelKind::Isotropic, initial_for(ChannelKind::Isotropic), 0.0, 0.75, 76);
  const double crossing = 0.75 * (1 - std::pow(2.0, -0.25));
  for (const auto& r : iso) {
    const double c = 1 - 4 * r.p / 3;
    CHECK(std::abs(r.chsh_max - 2 * std::numbers::sqrt2 * c * c) < 1e-6);
    if (r.p < crossing - 0.01) CHECK(r.chsh_max > 2.0);
    if (r.p > crossing + 0.01) CHECK(r.chsh_max < 2.0);
  }
  const auto two = cli::sweep(ChannelKind::TwoField, initial_for(ChannelKind::TwoField), 0.0, 0.6, 61);
  for (const auto& r : two)
    CHECK(std::abs(r.chsh_max - 2 * std::numbers::sqrt2 * (1 - r.p) * (1 - r.p)) < 1e-6);
}

TEST_CASE("sweep rows respect the hierarchy") {
  for (auto kind : {ChannelKind::Dephasing, ChannelKind::TwoField, ChannelKind::Isotropic}) {
    const auto rows = cli::sweep(kind, initial_for(kind), 0.0, physical_p_max(kind), 51);
    for (const auto& r : rows)
      if (r.kcbs_max > 2.0) CHECK(r.chsh_max > 2.0);
  }
}

TEST_CASE("sweep CSV format") {
  const auto rows = cli::sweep(ChannelKind::Dephasing, initial_for(ChannelKind::Dephasing), 0.0, 0.5, 3);
  std::ostringstream out;
  cli::write_sweep_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "P,K_max,S_max,purity,singlet_population");
  std::getline(in, line);
  CHECK(line == "0,2.23607,2.82843,1,0");
  CHECK_THROWS_AS(cli::sweep(ChannelKind::Dephasing, initial_for(ChannelKind::Dephasing), 0.0, 0.5, 1), PreconditionError);
  CHECK_THROWS_AS(cli::sweep(ChannelKind::Dephasing, initial_for(ChannelKind::Dephasing), 0.0, 1.5, 5), InvalidP);
}

TEST_CASE("thresholds") {
  const double tol = 1e-4;
  auto t = cli::thresholds(ChannelKind::Dephasing, initial_for(ChannelKind::Dephasing), tol);
  REQUIRE(t.p_kcbs.has_value());
  CHECK(std::abs(*t.p_kcbs - 0.166) <= 0.005);
  // The analytic model crosses 2 at the same point.
  CHECK(std::abs(oracle::dephasing_kcbs_model(*t.p_kcbs) - 2.0) < 1e-3);
  CHECK_FALSE(t.p_chsh.has_value());
  const auto j = cli::thresholds_json(ChannelKind::Dephasing, t);
  CHECK(j["p_chsh"] == "none");
  CHECK(j["hierarchy_ok"] == true);

  t = cli::thresholds(ChannelKind::Isotropic, initial_for(ChannelKind::Isotropic), tol);
  REQUIRE(t.p_chsh.has_value());
  CHECK(std::abs(*t.p_chsh - 0.75 * (1 - std::pow(2.0, -0.25))) <= tol);
  CHECK(*t.p_kcbs <= *t.p_chsh);

  t = cli::thresholds(ChannelKind::TwoField, initial_for(ChannelKind::TwoField), tol);
  REQUIRE(t.p_chsh.has_value());
  CHECK(std::abs(*t.p_chsh - (1 - std::pow(2.0, -0.25))) <= tol);
  CHECK(*t.p_kcbs <= *t.p_chsh);

  CHECK_THROWS_AS(cli::thresholds(ChannelKind::Dephasing, basis_state(QutritBasis::TwoZero), tol), NotBracketed);
  CHECK_THROWS_AS(cli::thresholds(ChannelKind::Dephasing, initial_for(ChannelKind::Dephasing), 0.0), PreconditionError);
}

TEST_CASE("kcbs demo on the protocol path") {
  cli::KcbsDemoOptions opt;
  opt.pairs = 1'000'000;
  opt.seed = 3;
  auto j = cli::kcbs_demo(opt);
  CHECK(std::abs(j["K"].get<double>() - oracle::kSqrt5) <= 3 * j["sigma"].get<double>());
  CHECK(j["significance"].get<double>() > 3.0);

  opt.singlet_fraction = 0.07;
  j = cli::kcbs_demo(opt);
  CHECK(j["raw_sum"].get<double>() - j["K"].get<double>() == doctest::Approx(0.35).epsilon(1e-12));
  const double expected_raw = 0.93 * oracle::kSqrt5 + 0.35;
  CHECK(std::abs(j["raw_sum"].get<double>() - expected_raw) <= 3 * j["sigma"].get<double>());

  opt.method = cli::parse_demo_method("protocol");
  CHECK_THROWS_AS(cli::parse_demo_method("magic"), UnknownName);
  opt.mc_samples = 10;
  CHECK_THROWS_AS(cli::kcbs_demo(opt), PreconditionError);
}

TEST_CASE("kcbs demo on the density-matrix path") {
  cli::KcbsDemoOptions opt;
  opt.method = cli::DemoMethod::DensityMatrix;
  opt.pairs = 1'000'000;
  opt.mc_samples = 100;
  opt.seed = 5;
  const auto j = cli::kcbs_demo(opt);
  CAPTURE(j.dump());
  CHECK(std::abs(j["K"].get<double>() - oracle::kSqrt5) <= 3 * j["sigma"].get<double>());
  CHECK(j["fidelity_to_truth"].get<double>() > 0.99);
}

TEST_CASE("hierarchy report is byte-stable") {
  const auto a = cli::hierarchy_json(200, 42).dump(), b = cli::hierarchy_json(200, 42).dump();
  CHECK(a == b);
  CHECK(cli::hierarchy_json(200, 42)["counterexamples"] == 0);
  CHECK_THROWS_AS(cli::hierarchy_json(0, 1), PreconditionError);
}

TEST_CASE("tomography demo") {
  cli::TomoDemoOptions opt;
  opt.truth = qutrit_to_density(basis_state(QutritBasis::PsiHv));
  opt.exposure = 100000;
  const auto r = cli::tomo_demo(opt);
  CHECK(r.records.size() == 36);
  CHECK(r.report["fidelity_to_truth_top_eigenvector"].get<double>() >= 0.99);
  const auto again = cli::tomo_demo(opt, &r.records);
  CHECK(again.report["rho"] == r.report["rho"]);
  CHECK_FALSE(again.report.contains("fidelity_to_truth_top_eigenvector"));
}
