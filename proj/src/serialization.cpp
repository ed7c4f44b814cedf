#include "biphoton/serialization.hpp"

#include "biphoton/errors.hpp"

namespace biphoton {

using nlohmann::json;

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const QutritState& q) {
  json out = json::array();
  for (const auto& z : q.amplitudes()) out.push_back(to_json(z));
  return out;
}

json to_json(const TwoPhotonDensity& rho) { return to_json(rho.matrix()); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw PreconditionError("expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array()) throw PreconditionError("matrix JSON must be an array");
  CMatrix m(rows, cols);
  if (j.size() == rows && !j.empty() && j[0].is_array() && j[0].size() == cols &&
      j[0][0].is_array()) {
    for (std::size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols)
        throw PreconditionError("matrix JSON row has the wrong length");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
    }
    return m;
  }
  if (j.size() != rows * cols) throw PreconditionError("matrix JSON has the wrong size");
  for (std::size_t i = 0; i < rows * cols; ++i) m(i / cols, i % cols) = complex_from_json(j[i]);
  return m;
}

QutritState qutrit_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw PreconditionError("qutrit JSON must hold 3 pairs");
  return {complex_from_json(j[0]), complex_from_json(j[1]), complex_from_json(j[2])};
}

TwoPhotonDensity density_from_json(const json& j) {
  return TwoPhotonDensity::from_matrix(matrix_from_json(j, 4, 4));
}

}  // namespace biphoton
