#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/channels.hpp"
#include "biphoton/linalg.hpp"
#include "biphoton/states.hpp"
#include "biphoton/tomography.hpp"

// Subcommand bodies for the biphoton executable. Each returns data that the
// executable serializes; nothing here touches argv.

namespace biphoton::cli {

struct SweepRow {
  double p = 0.0;
  double kcbs_max = 0.0;
  double chsh_max = 0.0;
  double purity = 0.0;
  double singlet_population = 0.0;
};

/// psi_pm for dephasing and isotropic, psi_rl for two-field.
QutritBasis default_state(ChannelKind kind);

/// Exact evaluation on p_min + i (p_max - p_min)/(steps - 1), i = 0..steps-1.
std::vector<SweepRow> sweep(ChannelKind kind, const QutritState& initial, double p_min,
                            double p_max, int steps, const OptimizerConfig& cfg = {});

/// Header `P,K_max,S_max,purity,singlet_population`, 6 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct Thresholds {
  std::optional<double> p_kcbs;  // nullopt: witness stays above 2 on the whole range
  std::optional<double> p_chsh;
};

/// Smallest P in [0, physical_p_max] where each witness falls below 2,
/// bracketed on a grid and bisected to tol. Throws NotBracketed when a
/// witness is not above 2 at P = 0.
Thresholds thresholds(ChannelKind kind, const QutritState& initial, double tol,
                      const OptimizerConfig& cfg = {});
nlohmann::json thresholds_json(ChannelKind kind, const Thresholds& t);

enum class DemoMethod { DensityMatrix, Protocol };
DemoMethod parse_demo_method(const std::string& name);

struct KcbsDemoOptions {
  DemoMethod method = DemoMethod::Protocol;
  double singlet_fraction = 0.0;  // mixed into the ideal |1,1> state
  std::int64_t pairs = 1'000'000;  // exposure per setting
  int mc_samples = 200;
  std::uint64_t seed = 1;
};

/// K, sigma and significance (K - 2)/sigma for the chosen evaluation path.
nlohmann::json kcbs_demo(const KcbsDemoOptions& opt, const OptimizerConfig& cfg = {});

nlohmann::json hierarchy_json(std::size_t samples, std::uint64_t seed,
                              const OptimizerConfig& cfg = {});

struct TomoDemoOptions {
  TwoPhotonDensity truth = TwoPhotonDensity::maximally_mixed();
  TomoScheme scheme = TomoScheme::Overcomplete36;
  std::int64_t exposure = 100'000;
  std::uint64_t seed = 1;
  int mc_samples = 0;  // 0 skips the kcbs_max error bar
};

struct TomoDemoResult {
  std::vector<TomoRecord> records;
  nlohmann::json report;
};

/// Simulates records for the truth (unless given) and reconstructs them.
TomoDemoResult tomo_demo(const TomoDemoOptions& opt,
                         const std::vector<TomoRecord>* given = nullptr,
                         const OptimizerConfig& cfg = {});

}  // namespace biphoton::cli
