#include "biphoton/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/random.hpp"

namespace biphoton {

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("CMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> entries) {
  CMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

CMatrix CMatrix::column(std::span<const Complex> entries) {
  CMatrix m(entries.size(), 1);
  std::copy(entries.begin(), entries.end(), m.data_.begin());
  return m;
}

CMatrix CMatrix::outer(std::span<const Complex> v) {
  CMatrix m(v.size(), v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
  return m;
}

Complex& CMatrix::operator()(std::size_t r, std::size_t c) {
  assert(r < rows_ && c < cols_);
  return data_[r * cols_ + c];
}

const Complex& CMatrix::operator()(std::size_t r, std::size_t c) const {
  assert(r < rows_ && c < cols_);
  return data_[r * cols_ + c];
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

Complex CMatrix::trace() const {
  Complex t{0.0, 0.0};
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::hermiticity_defect() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return worst;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("CMatrix: shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("CMatrix: shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("CMatrix: shape mismatch in *");
  CMatrix out(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{0.0, 0.0}) continue;
      for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

Complex expectation(const CMatrix& m, std::span<const Complex> a) {
  Complex acc{0.0, 0.0};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Complex row{0.0, 0.0};
    for (std::size_t c = 0; c < m.cols(); ++c) row += m(r, c) * a[c];
    acc += std::conj(a[r]) * row;
  }
  return acc;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

CMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
CMatrix pauli_y() { return {{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}}; }
CMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return max_abs_diff(u * u.adjoint(), CMatrix::identity(u.rows())) <= tol;
}

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kJacobiTolerance = 1e-12;
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

// A <- J^H A J and V <- V J for the complex Givens rotation that zeroes A(p,q).
void jacobi_rotate(CMatrix& a, CMatrix& v, std::size_t p, std::size_t q) {
  const Complex g = a(p, q);
  const double mag = std::abs(g);
  if (mag == 0.0) return;
  const Complex phase = g / mag;
  const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex jpp = c, jpq = s * phase, jqp = -s * std::conj(phase), jqq = c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  a(p, q) = a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
}

}  // namespace

EigenSystem eig_hermitian(const CMatrix& m) {
  const double defect = m.hermiticity_defect();
  if (!(defect <= kHermitianTolerance))
    throw NotHermitian("eig_hermitian: matrix deviates from its adjoint by " +
                       std::to_string(defect));
  const std::size_t n = m.rows();
  CMatrix a = m;
  // Symmetrize so rounding in the input does not leak into the rotations.
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = avg;
      a(c, r) = std::conj(avg);
    }
  }
  CMatrix v = CMatrix::identity(n);
  const double scale = std::max(1.0, a.frobenius_norm());
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kJacobiTolerance * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() > a(j, j).real();
  });
  EigenSystem out{std::vector<double>(n), CMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw PreconditionError("OptimizerConfig: max_iters must be >= 1");
  if (restarts < 1) throw PreconditionError("OptimizerConfig: restarts must be >= 1");
  if (!(step_tolerance > 0.0))
    throw PreconditionError("OptimizerConfig: step_tolerance must be > 0");
  if (!(initial_step > 0.0)) throw PreconditionError("OptimizerConfig: initial_step must be > 0");
  if (!(restart_radius >= 0.0))
    throw PreconditionError("OptimizerConfig: restart_radius must be >= 0");
}

namespace {

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> costs;  // minimized: cost = -f
};

double cost_of(const Objective& f, std::span<const double> x, long& evals) {
  ++evals;
  const double v = f(x);
  return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
}

// One Nelder-Mead descent on -f. Returns the best vertex and its cost.
std::pair<std::vector<double>, double> nelder_mead(const Objective& f, std::vector<double> start,
                                                   double step, const OptimizerConfig& cfg,
                                                   long& evals) {
  const std::size_t n = start.size();
  Simplex s;
  s.points.push_back(start);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = start;
    p[i] += step;
    s.points.push_back(std::move(p));
  }
  for (const auto& p : s.points) s.costs.push_back(cost_of(f, p, evals));

  std::vector<std::size_t> idx(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return s.costs[a] < s.costs[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[n - 1];

    double diameter = 0.0;
    for (std::size_t k = 0; k < n + 1; ++k)
      for (std::size_t i = 0; i < n; ++i)
        diameter = std::max(diameter, std::abs(s.points[k][i] - s.points[best][i]));
    if (diameter <= cfg.step_tolerance) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n + 1; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s.points[k][i] / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) trial[i] = 2.0 * centroid[i] - s.points[worst][i];
    const double fr = cost_of(f, trial, evals);

    if (fr < s.costs[best]) {
      for (std::size_t i = 0; i < n; ++i) trial2[i] = 3.0 * centroid[i] - 2.0 * s.points[worst][i];
      const double fe = cost_of(f, trial2, evals);
      if (fe < fr) {
        s.points[worst] = trial2;
        s.costs[worst] = fe;
      } else {
        s.points[worst] = trial;
        s.costs[worst] = fr;
      }
      continue;
    }
    if (fr < s.costs[second]) {
      s.points[worst] = trial;
      s.costs[worst] = fr;
      continue;
    }
    const bool outside = fr < s.costs[worst];
    for (std::size_t i = 0; i < n; ++i)
      trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                          : centroid[i] + 0.5 * (s.points[worst][i] - centroid[i]);
    const double fc = cost_of(f, trial2, evals);
    if (fc < std::min(fr, s.costs[worst])) {
      s.points[worst] = trial2;
      s.costs[worst] = fc;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t k = 0; k < n + 1; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i)
        s.points[k][i] = s.points[best][i] + 0.5 * (s.points[k][i] - s.points[best][i]);
      s.costs[k] = cost_of(f, s.points[k], evals);
    }
  }
  const auto it = std::min_element(s.costs.begin(), s.costs.end());
  const auto k = static_cast<std::size_t>(it - s.costs.begin());
  return {s.points[k], *it};
}

}  // namespace

OptimumResult local_search_max(const Objective& f, std::span<const double> x0,
                               const OptimizerConfig& cfg) {
  cfg.validate();
  const std::vector<double> origin(x0.begin(), x0.end());
  OptimumResult result;
  result.x = origin;
  long evals = 0;
  double best_cost = cost_of(f, origin, evals);

  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<double> start = origin;
    if (r > 0) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      for (auto& xi : start) xi += rng.uniform(-cfg.restart_radius, cfg.restart_radius);
    }
    auto [x, cost] = nelder_mead(f, start, cfg.initial_step, cfg, evals);
    // A second pass from the converged point guards against a collapsed simplex.
    auto [x2, cost2] = nelder_mead(f, x, 10.0 * cfg.step_tolerance + 1e-3 * cfg.initial_step, cfg,
                                   evals);
    if (cost2 < cost) {
      x = std::move(x2);
      cost = cost2;
    }
    if (cost < best_cost) {
      best_cost = cost;
      result.x = std::move(x);
      result.best_restart = r;
    }
  }
  result.value = -best_cost;
  result.evaluations = evals;
  return result;
}

}  // namespace biphoton
