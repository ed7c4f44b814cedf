#include "biphoton/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

namespace {

using Vec4 = std::array<Complex, 4>;
// Lower-triangular T stored densely, row-major.
using Tri4 = std::array<Complex, 16>;

PolarizationState letter_state(char c) {
  switch (c) {
    case 'H': return PolarizationState::horizontal();
    case 'V': return PolarizationState::vertical();
    case 'D': return PolarizationState::diagonal();
    case 'A': return PolarizationState::antidiagonal();
    case 'R': return PolarizationState::right();
    case 'L': return PolarizationState::left();
  }
  throw UnknownName(std::string("unknown polarization letter '") + c + "'");
}

std::array<double, 4> pauli_expectations(const PolarizationState& p) {
  const Complex hv = std::conj(p.h()) * p.v();
  return {1.0, 2.0 * hv.real(), 2.0 * hv.imag(), std::norm(p.h()) - std::norm(p.v())};
}

// Row of the design matrix: p = sum_m A_m r_m with rho = (1/4) sum r_ij s_i (x) s_j.
std::array<double, 16> design_row(const TomoSetting& s) {
  const auto a = pauli_expectations(s.first), b = pauli_expectations(s.second);
  std::array<double, 16> row{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) row[4 * i + j] = 0.25 * a[i] * b[j];
  return row;
}

CMatrix pauli4(std::size_t i) {
  switch (i) {
    case 0: return CMatrix::identity(2);
    case 1: return pauli_x();
    case 2: return pauli_y();
    default: return pauli_z();
  }
}

CMatrix gram(const std::vector<std::array<double, 16>>& rows) {
  CMatrix g(16, 16);
  for (const auto& row : rows)
    for (std::size_t a = 0; a < 16; ++a)
      for (std::size_t b = 0; b < 16; ++b) g(a, b) += row[a] * row[b];
  return g;
}

std::size_t rank_of(const EigenSystem& eig) {
  const double top = std::max(eig.values.front(), 0.0);
  std::size_t rank = 0;
  for (double v : eig.values)
    if (v > 1e-10 * top) ++rank;
  return rank;
}

// T lower triangular with T^H T = rho; reversed-order Cholesky tolerating
// zero pivots from rank-deficient inputs.
Tri4 lower_factor(const CMatrix& rho) {
  // J rho J = L L^H, then rho = (J L J)(J L J)^H, and T = (J L J)^H.
  CMatrix a(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) a(r, c) = rho(3 - r, 3 - c);
  CMatrix l(4, 4);
  const double scale = std::max(1e-300, a.trace().real());
  for (std::size_t j = 0; j < 4; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (d <= 1e-14 * scale) continue;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < 4; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j);
    }
  }
  Tri4 t{};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) t[4 * r + c] = std::conj(l(3 - c, 3 - r));
  return t;
}

constexpr std::array<std::pair<std::size_t, std::size_t>, 6> kOffDiagonal{
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

std::vector<double> to_params(const Tri4& t) {
  std::vector<double> x(16);
  for (std::size_t i = 0; i < 4; ++i) x[i] = t[5 * i].real();
  for (std::size_t k = 0; k < 6; ++k) {
    const auto [r, c] = kOffDiagonal[k];
    x[4 + 2 * k] = t[4 * r + c].real();
    x[5 + 2 * k] = t[4 * r + c].imag();
  }
  return x;
}

Tri4 from_params(std::span<const double> x) {
  Tri4 t{};
  for (std::size_t i = 0; i < 4; ++i) t[5 * i] = x[i];
  for (std::size_t k = 0; k < 6; ++k) {
    const auto [r, c] = kOffDiagonal[k];
    t[4 * r + c] = Complex{x[4 + 2 * k], x[5 + 2 * k]};
  }
  return t;
}

TwoPhotonDensity density_from_factor(const Tri4& t) {
  CMatrix m(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t k = 0; k < 4; ++k) m(r, c) += std::conj(t[4 * k + r]) * t[4 * k + c];
  m *= 1.0 / m.trace().real();
  return TwoPhotonDensity::from_matrix(m);
}

struct PreparedRecords {
  std::vector<Vec4> projectors;
  std::vector<double> counts;
  std::vector<double> exposures;
};

PreparedRecords prepare(std::span<const TomoRecord> records) {
  PreparedRecords p;
  for (const auto& r : records) {
    if (r.exposure < 1) throw PreconditionError("tomography record with exposure < 1");
    if (r.count < 0) throw PreconditionError("tomography record with negative count");
    p.projectors.push_back(setting_from_label(r.label).projector_vector());
    p.counts.push_back(static_cast<double>(r.count));
    p.exposures.push_back(static_cast<double>(r.exposure));
  }
  return p;
}

double poisson_term(double n, double mu) {
  constexpr double floor = 1e-300;
  return n * std::log(std::max(mu, floor)) - mu;
}

// Likelihood in factor form: <psi|T^H T|psi> = |T psi|^2.
double factor_log_likelihood(const PreparedRecords& rec, const Tri4& t) {
  double trace = 0.0;
  for (const auto& z : t) trace += std::norm(z);
  if (!(trace > 0.0)) return -std::numeric_limits<double>::infinity();
  double ll = 0.0;
  for (std::size_t i = 0; i < rec.projectors.size(); ++i) {
    const auto& psi = rec.projectors[i];
    double p = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      Complex acc{0.0, 0.0};
      for (std::size_t c = 0; c <= r; ++c) acc += t[4 * r + c] * psi[c];
      p += std::norm(acc);
    }
    ll += poisson_term(rec.counts[i], rec.exposures[i] * p / trace);
  }
  return ll;
}

}  // namespace

std::array<Complex, 4> TomoSetting::projector_vector() const {
  return {first.h() * second.h(), first.h() * second.v(), first.v() * second.h(),
          first.v() * second.v()};
}

TomoSetting setting_from_label(const std::string& label) {
  if (label.size() != 2) throw UnknownName("tomography label must have two letters: " + label);
  return {letter_state(label[0]), letter_state(label[1]), label};
}

std::vector<TomoSetting> tomo_settings(TomoScheme scheme) {
  const std::string letters = scheme == TomoScheme::Minimal16 ? "HVDR" : "HVDARL";
  std::vector<TomoSetting> out;
  for (char a : letters)
    for (char b : letters) out.push_back(setting_from_label(std::string{a, b}));
  return out;
}

std::vector<TomoRecord> simulate_tomo(const TwoPhotonDensity& rho,
                                      std::span<const TomoSetting> settings,
                                      std::int64_t exposure, std::uint64_t seed) {
  if (exposure < 1) throw PreconditionError("simulate_tomo: exposure must be >= 1");
  std::vector<TomoRecord> out;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const double p = std::max(0.0, expectation(rho.matrix(), settings[i].projector_vector()).real());
    Rng rng(derive_seed(seed, i));
    out.push_back({settings[i].label, rng.poisson(static_cast<double>(exposure) * p), exposure});
  }
  return out;
}

std::vector<TomoRecord> exact_records(const TwoPhotonDensity& rho,
                                      std::span<const TomoSetting> settings,
                                      std::int64_t exposure) {
  std::vector<TomoRecord> out;
  for (const auto& s : settings) {
    const double p = std::max(0.0, expectation(rho.matrix(), s.projector_vector()).real());
    out.push_back({s.label, std::llround(static_cast<double>(exposure) * p), exposure});
  }
  return out;
}

std::size_t design_rank(std::span<const TomoSetting> settings) {
  std::vector<std::array<double, 16>> rows;
  for (const auto& s : settings) rows.push_back(design_row(s));
  return rank_of(eig_hermitian(gram(rows)));
}

LinearInversion linear_inversion(std::span<const TomoRecord> records) {
  std::vector<std::array<double, 16>> rows;
  std::vector<double> rates;
  for (const auto& r : records) {
    if (r.exposure < 1) throw PreconditionError("tomography record with exposure < 1");
    rows.push_back(design_row(setting_from_label(r.label)));
    rates.push_back(static_cast<double>(r.count) / static_cast<double>(r.exposure));
  }
  if (rows.empty()) throw RankDeficient("linear_inversion: no records");
  const auto eig = eig_hermitian(gram(rows));
  if (rank_of(eig) < 16) throw RankDeficient("linear_inversion: design matrix rank below 16");

  std::array<double, 16> aty{};
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t m = 0; m < 16; ++m) aty[m] += rows[k][m] * rates[k];
  std::array<double, 16> coeff{};
  for (std::size_t e = 0; e < 16; ++e) {
    double proj = 0.0;
    for (std::size_t m = 0; m < 16; ++m) proj += (std::conj(eig.vectors(m, e)) * aty[m]).real();
    for (std::size_t m = 0; m < 16; ++m)
      coeff[m] += (eig.vectors(m, e) * (proj / eig.values[e])).real();
  }

  LinearInversion out{CMatrix(4, 4), true, 0.0};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out.rho += kron(pauli4(i), pauli4(j)) * (0.25 * coeff[4 * i + j]);
  const auto spectrum = eig_hermitian(out.rho);
  out.min_eigenvalue = spectrum.values.back();
  out.positive = out.min_eigenvalue >= -1e-10;
  return out;
}

TwoPhotonDensity project_to_density(const CMatrix& hermitian) {
  const auto eig = eig_hermitian(hermitian);
  CMatrix m(4, 4);
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double lam = std::max(0.0, eig.values[k]);
    total += lam;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        m(r, c) += lam * eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }
  if (!(total > 0.0)) return TwoPhotonDensity::maximally_mixed();
  m *= 1.0 / total;
  return TwoPhotonDensity::from_matrix(m);
}

double log_likelihood(std::span<const TomoRecord> records, const TwoPhotonDensity& rho) {
  const auto rec = prepare(records);
  double ll = 0.0;
  for (std::size_t i = 0; i < rec.projectors.size(); ++i) {
    const double p = expectation(rho.matrix(), rec.projectors[i]).real();
    ll += poisson_term(rec.counts[i], rec.exposures[i] * p);
  }
  return ll;
}

OptimizerConfig default_mle_config() {
  OptimizerConfig cfg;
  cfg.max_iters = 6000;
  cfg.restarts = 4;
  cfg.step_tolerance = 1e-9;
  cfg.initial_step = 0.05;
  cfg.restart_radius = 0.02;
  return cfg;
}

TwoPhotonDensity mle_reconstruct(std::span<const TomoRecord> records, const OptimizerConfig& cfg) {
  if (records.empty()) throw PreconditionError("mle_reconstruct: no records");
  const auto rec = prepare(records);
  const auto start = project_to_density(linear_inversion(records).rho);
  auto x = to_params(lower_factor(start.matrix()));

  auto objective = [&](std::span<const double> params) {
    return factor_log_likelihood(rec, from_params(params));
  };
  // Restart each round from the incumbent so improvements accumulate.
  OptimizerConfig round = cfg;
  round.restarts = 1;
  double best = objective(x);
  for (int r = 0; r < cfg.restarts; ++r) {
    round.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    std::vector<double> x0 = x;
    if (r > 0) {
      Rng rng(round.seed);
      for (auto& v : x0) v += rng.uniform(-cfg.restart_radius, cfg.restart_radius);
    }
    const auto opt = local_search_max(objective, x0, round);
    if (opt.value > best) {
      best = opt.value;
      x = opt.x;
    }
  }
  return density_from_factor(from_params(x));
}

McSummary mc_error(std::span<const TomoRecord> records, const DensityEstimator& estimator, int n,
                   std::uint64_t seed, const OptimizerConfig& mle_cfg) {
  if (n < 100) throw PreconditionError("mc_error: n must be >= 100");
  std::vector<double> values(static_cast<std::size_t>(n));
  parallel_for(values.size(), [&](std::size_t m) {
    Rng rng(derive_seed(seed, m));
    std::vector<TomoRecord> resampled(records.begin(), records.end());
    for (auto& r : resampled) r.count = rng.poisson(static_cast<double>(r.count));
    values[m] = estimator(mle_reconstruct(resampled, mle_cfg));
  });
  McSummary s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.sigma = std::sqrt(var / static_cast<double>(n - 1));
  return s;
}

void write_records_csv(std::ostream& out, std::span<const TomoRecord> records) {
  out << "label,count,exposure\n";
  for (const auto& r : records) out << r.label << ',' << r.count << ',' << r.exposure << '\n';
  if (!out) throw IoError("failed writing tomography records");
}

std::vector<TomoRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("label,count,exposure", 0) != 0)
    throw PreconditionError("records CSV: missing header label,count,exposure");
  std::vector<TomoRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string label, count, exposure;
    if (!std::getline(fields, label, ',') || !std::getline(fields, count, ',') ||
        !std::getline(fields, exposure, ','))
      throw PreconditionError("records CSV: malformed row '" + line + "'");
    TomoRecord r;
    r.label = label;
    try {
      r.count = std::stoll(count);
      r.exposure = std::stoll(exposure);
    } catch (const std::exception&) {
      throw PreconditionError("records CSV: malformed number in '" + line + "'");
    }
    setting_from_label(r.label);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace biphoton
