#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "biphoton/linalg.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

/// Separable projector |first>|second>. Labels are two letters from
/// {H, V, D, A, R, L}, one per photon, e.g. "HV" or "DR".
struct TomoSetting {
  PolarizationState first = PolarizationState::horizontal();
  PolarizationState second = PolarizationState::horizontal();
  std::string label;

  std::array<Complex, 4> projector_vector() const;
};

/// Resolves a two-letter label; throws UnknownName.
TomoSetting setting_from_label(const std::string& label);

enum class TomoScheme { Minimal16, Overcomplete36 };

/// Minimal16: {H, V, D, R} per photon. Overcomplete36: {H, V, D, A, R, L}.
std::vector<TomoSetting> tomo_settings(TomoScheme scheme = TomoScheme::Overcomplete36);

struct TomoRecord {
  std::string label;
  std::int64_t count = 0;
  std::int64_t exposure = 0;  // pairs emitted per setting
};

std::vector<TomoRecord> simulate_tomo(const TwoPhotonDensity& rho,
                                      std::span<const TomoSetting> settings,
                                      std::int64_t exposure, std::uint64_t seed);

/// Counts rounded from exact probabilities; the infinite-exposure limit.
std::vector<TomoRecord> exact_records(const TwoPhotonDensity& rho,
                                      std::span<const TomoSetting> settings,
                                      std::int64_t exposure);

/// Rank of the real-linear map from Hermitian 4x4 matrices to setting
/// probabilities.
std::size_t design_rank(std::span<const TomoSetting> settings);

struct LinearInversion {
  CMatrix rho;               // Hermitian, trace not forced
  bool positive = true;      // false when an eigenvalue is below -1e-10
  double min_eigenvalue = 0.0;
};

/// Least squares for <proj_i|rho|proj_i> = count_i / exposure_i over the
/// Pauli-product basis. Throws RankDeficient below rank 16.
LinearInversion linear_inversion(std::span<const TomoRecord> records);

/// Clip negative eigenvalues and renormalize to unit trace.
TwoPhotonDensity project_to_density(const CMatrix& hermitian);

/// Poisson log-likelihood sum_i [n_i log(mu_i) - mu_i], mu_i = exposure_i p_i.
double log_likelihood(std::span<const TomoRecord> records, const TwoPhotonDensity& rho);

/// Settings used by mle_reconstruct when none are given: a handful of
/// Nelder-Mead passes restarted from the incumbent with small perturbations.
OptimizerConfig default_mle_config();

/// rho = T^H T / Tr(T^H T) with T lower triangular (16 real parameters),
/// maximizing the Poisson likelihood from the PSD-projected linear inversion.
TwoPhotonDensity mle_reconstruct(std::span<const TomoRecord> records,
                                 const OptimizerConfig& cfg = default_mle_config());

struct McSummary {
  double mean = 0.0;
  double sigma = 0.0;
};

using DensityEstimator = std::function<double(const TwoPhotonDensity&)>;

/// Redraws every count Poisson around its observed value, reconstructs by
/// MLE and evaluates the estimator; n >= 100 resamples.
McSummary mc_error(std::span<const TomoRecord> records, const DensityEstimator& estimator,
                   int n, std::uint64_t seed, const OptimizerConfig& mle_cfg = default_mle_config());

/// CSV "label,count,exposure" with a header line.
void write_records_csv(std::ostream& out, std::span<const TomoRecord> records);
std::vector<TomoRecord> read_records_csv(std::istream& in);

}  // namespace biphoton
