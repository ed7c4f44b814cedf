#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <span>
#include <vector>

namespace biphoton {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Sizes in this project never exceed 16x16.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> entries);
  /// Column vector from entries.
  static CMatrix column(std::span<const Complex> entries);
  /// |v><v| for a column of entries.
  static CMatrix outer(std::span<const Complex> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c);
  const Complex& operator()(std::size_t r, std::size_t c) const;

  std::span<const Complex> data() const { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  /// Largest absolute entrywise deviation from the adjoint.
  double hermiticity_defect() const;
  bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex scale);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Largest absolute entrywise difference; matrices must share a shape.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// <a|m|a> for a column given as entries.
Complex expectation(const CMatrix& m, std::span<const Complex> a);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Pauli matrices in the {|h>,|v>} basis, standard (x, y, z) labelling.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// Rows (and columns) are orthonormal within tol.
bool is_unitary(const CMatrix& u, double tol);

struct EigenSystem {
  std::vector<double> values;  // descending
  CMatrix vectors;             // column i pairs with values[i]
};

/// Cyclic complex Jacobi. Throws NotHermitian when the input deviates from
/// its adjoint by more than 1e-10 in any entry.
EigenSystem eig_hermitian(const CMatrix& m);

/// Settings for local_search_max. The first four fields are the public
/// contract; the last two tune the simplex scale for a given parametrization.
struct OptimizerConfig {
  int max_iters = 2000;
  int restarts = 40;
  double step_tolerance = 1e-9;
  std::uint64_t seed = 20141015;
  double initial_step = 0.25;
  double restart_radius = std::numbers::pi;

  void validate() const;
};

struct OptimumResult {
  std::vector<double> x;
  double value = 0.0;
  int best_restart = 0;
  long evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Maximizes f by Nelder-Mead. Restart 0 starts at x0; restart r > 0 starts
/// at x0 plus a uniform offset in [-restart_radius, restart_radius] per
/// coordinate, drawn from a stream derived from (seed, r). The best value
/// over all restarts is returned, ties going to the lowest restart index.
/// Non-finite objective values are treated as -infinity.
OptimumResult local_search_max(const Objective& f, std::span<const double> x0,
                               const OptimizerConfig& cfg);

}  // namespace biphoton
