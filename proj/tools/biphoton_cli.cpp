#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "biphoton/commands.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/optics.hpp"
#include "biphoton/serialization.hpp"

namespace {

using namespace biphoton;

constexpr int kExitPrecondition = 2;
constexpr int kExitIo = 3;

// Accepts "dephasing" or "dephasing:0.2"; only the kind is used.
ChannelKind kind_of(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return parse_channel_kind(text);
  return parse_channel_spec(text).kind;
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write(out);
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emit_json(const std::string& path, const nlohmann::json& j) {
  emit(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

OptimizerConfig optimizer(int restarts, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biphoton qutrit contextuality and nonlocality toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  std::string channel;
  std::string state;
  int restarts = 40;

  auto common = [&](CLI::App* sub, bool with_channel, bool with_state) {
    sub->add_option("--seed", seed, "Seed for every random stream");
    sub->add_option("--out", out_path, "Output file; stdout when omitted");
    sub->add_option("--restarts", restarts, "Optimizer restarts for the KCBS search");
    if (with_channel) sub->add_option("--channel", channel, "dephasing | two-field | isotropic [:P]");
    if (with_state) sub->add_option("--state", state, "psi-hv | psi-pm | psi-rl | 2,0 | 0,2");
  };

  auto* sweep_cmd = app.add_subcommand("sweep", "Witness values along a channel's P grid (CSV)");
  common(sweep_cmd, true, true);
  sweep_cmd->get_option("--channel")->required();
  double p_min = 0.0;
  double p_max = -1.0;
  int steps = 51;
  sweep_cmd->add_option("--p-min", p_min, "First grid point");
  sweep_cmd->add_option("--p-max", p_max, "Last grid point; physical maximum when omitted");
  sweep_cmd->add_option("--steps", steps, "Number of grid points (>= 2)");

  auto* thr_cmd = app.add_subcommand("thresholds", "P where each witness falls to 2 (JSON)");
  common(thr_cmd, true, true);
  thr_cmd->get_option("--channel")->required();
  double tol = 1e-4;
  thr_cmd->add_option("--tol", tol, "Bisection tolerance on P");

  auto* demo_cmd = app.add_subcommand("kcbs-demo", "Estimate K with an error bar (JSON)");
  common(demo_cmd, false, false);
  std::string method = "protocol";
  cli::KcbsDemoOptions demo;
  demo_cmd->add_option("--method", method, "dm (tomography) or protocol (direct projections)");
  demo_cmd->add_option("--singlet-fraction", demo.singlet_fraction, "Singlet weight mixed into |1,1>");
  demo_cmd->add_option("--pairs", demo.pairs, "Pairs per setting");
  demo_cmd->add_option("--mc", demo.mc_samples, "Monte-Carlo resamples (>= 100)");

  auto* hier_cmd = app.add_subcommand("hierarchy", "Count states with K > 2 but S <= 2 (JSON)");
  common(hier_cmd, false, false);
  std::size_t samples = 10000;
  hier_cmd->add_option("--samples", samples, "Number of random densities");

  auto* table_cmd = app.add_subcommand("table1", "Wave-plate angles for the five projections (CSV)");
  common(table_cmd, false, false);

  auto* tomo_cmd = app.add_subcommand("tomo-demo", "Simulate and reconstruct tomography (JSON)");
  common(tomo_cmd, true, true);
  cli::TomoDemoOptions tomo;
  std::string scheme = "overcomplete36";
  std::string records_in, records_out, density_in;
  tomo_cmd->add_option("--exposure", tomo.exposure, "Pairs per setting");
  tomo_cmd->add_option("--scheme", scheme, "minimal16 or overcomplete36");
  tomo_cmd->add_option("--mc", tomo.mc_samples, "Resamples for the kcbs_max error bar (0 skips)");
  tomo_cmd->add_option("--records", records_in, "Reconstruct from this label,count,exposure CSV");
  tomo_cmd->add_option("--records-out", records_out, "Write the simulated records here");
  tomo_cmd->add_option("--density", density_in, "Truth as a 4x4 JSON matrix instead of --state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitPrecondition;
  }

  try {
    const auto cfg = optimizer(restarts, derive_seed(seed, 0x6b636273));
    if (sweep_cmd->parsed()) {
      const auto kind = kind_of(channel);
      const auto initial = basis_state(state.empty() ? cli::default_state(kind) : parse_basis_name(state));
      const double hi = p_max < 0.0 ? physical_p_max(kind) : p_max;
      const auto rows = cli::sweep(kind, initial, p_min, hi, steps, cfg);
      emit(out_path, [&](std::ostream& o) { cli::write_sweep_csv(o, rows); });
    } else if (thr_cmd->parsed()) {
      const auto kind = kind_of(channel);
      const auto initial = basis_state(state.empty() ? cli::default_state(kind) : parse_basis_name(state));
      emit_json(out_path, cli::thresholds_json(kind, cli::thresholds(kind, initial, tol, cfg)));
    } else if (demo_cmd->parsed()) {
      demo.method = cli::parse_demo_method(method);
      demo.seed = seed;
      emit_json(out_path, cli::kcbs_demo(demo, cfg));
    } else if (hier_cmd->parsed()) {
      emit_json(out_path, cli::hierarchy_json(samples, seed, cfg));
    } else if (table_cmd->parsed()) {
      const auto rows = table1();
      emit(out_path, [&](std::ostream& o) { write_table1_csv(o, rows); });
    } else if (tomo_cmd->parsed()) {
      if (scheme == "minimal16") tomo.scheme = TomoScheme::Minimal16;
      else if (scheme != "overcomplete36") throw UnknownName("unknown scheme '" + scheme + "'");
      tomo.seed = seed;
      if (!density_in.empty()) {
        auto in = open_input(density_in);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw PreconditionError(std::string("density JSON: ") + e.what());
        }
        tomo.truth = density_from_json(j);
      } else {
        tomo.truth = qutrit_to_density(basis_state(state.empty() ? "psi-hv" : state));
      }
      if (!channel.empty()) tomo.truth = apply_two_photon(tomo.truth, parse_channel_spec(channel));
      std::vector<TomoRecord> given;
      if (!records_in.empty()) {
        auto in = open_input(records_in);
        given = read_records_csv(in);
      }
      const auto result = cli::tomo_demo(tomo, records_in.empty() ? nullptr : &given, cfg);
      if (!records_out.empty())
        emit(records_out, [&](std::ostream& o) { write_records_csv(o, result.records); });
      emit_json(out_path, result.report);
    }
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
