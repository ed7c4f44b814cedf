#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "biphoton/linalg.hpp"
#include "biphoton/protocol.hpp"
#include "biphoton/states.hpp"
#include "biphoton/witnesses.hpp"

// Jones calculus conventions: angles are fast-axis orientations from the
// horizontal in degrees, rotation(t) = [[cos t, -sin t], [sin t, cos t]],
// HWP = rotation(t) diag(1, -1) rotation(-t),
// QWP = rotation(t) diag(1, -i) rotation(-t).
// With these, HWP(22.5)|h> = |d+> and QWP(45)|h> = |R> = (|h> + i|v>)/sqrt2.

namespace biphoton {

CMatrix hwp_matrix(double theta_deg);
CMatrix qwp_matrix(double theta_deg);

struct StokesVector {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
};

/// s_i = <p|sigma_i|p>, (x, y, z) Pauli order: |d+> -> s1, |R> -> s2, |h> -> s3.
StokesVector stokes(const PolarizationState& p);

/// Plates in beam order: QWP(a), then HWP, then QWP(b).
struct WavePlateSetting {
  double qwp_a = 0.0;
  double hwp = 0.0;
  double qwp_b = 0.0;
};

/// QWP(b) * HWP(h) * QWP(a).
CMatrix setting_unitary(const WavePlateSetting& w);

/// Maps an angle to (-90, 90].
double reduce_angle(double deg);

/// 1 - |<h|U s>| for the compiled unitary.
double projection_residual(const WavePlateSetting& w, const ProjectionPair& pair);

/// Plate angles with QWP(b) HWP QWP(a) taking s -> |h> and t -> |v>. The
/// symmetric family (a, h, -a) is searched first and the smallest-norm
/// solution kept; a free three-angle search is the fallback. Throws
/// NoConvergence if the residual stays above 1e-8.
WavePlateSetting compile_projection(const ProjectionPair& pair, const OptimizerConfig& cfg = {});

struct PentagramReport {
  std::vector<StokesVector> points;     // s_1, t_1, ..., s_5, t_5
  std::vector<double> axis_distances;   // sqrt(s1^2 + s2^2) for each point
  std::vector<double> s_azimuths_deg;   // azimuth of each s_k around the h-v axis
};

PentagramReport pentagram_report(const Quintuplet& quint);

struct Table1Row {
  int k = 0;
  WavePlateSetting setting;
};

/// Compiled settings for the five canonical projection pairs, k = 1..5.
std::vector<Table1Row> table1(const OptimizerConfig& cfg = {});
/// CSV "k,qwp_a,hwp,qwp_b" with two decimals.
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows);

}  // namespace biphoton
