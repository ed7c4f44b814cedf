#pragma once

#include <json.hpp>

#include "biphoton/linalg.hpp"
#include "biphoton/states.hpp"

// JSON encoding: complex scalars are [re, im] pairs, qutrit states are arrays
// of three pairs, and matrices are arrays of rows of pairs.

namespace biphoton {

nlohmann::json to_json(Complex z);
nlohmann::json to_json(const CMatrix& m);
nlohmann::json to_json(const QutritState& q);
nlohmann::json to_json(const TwoPhotonDensity& rho);

Complex complex_from_json(const nlohmann::json& j);
/// Accepts nested rows or a flat row-major list of rows*cols pairs.
CMatrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols);
QutritState qutrit_from_json(const nlohmann::json& j);
TwoPhotonDensity density_from_json(const nlohmann::json& j);

}  // namespace biphoton
