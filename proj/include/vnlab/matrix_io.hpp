#pragma once

#include <string>

#include <json.hpp>

#include "vnlab/lin_core.hpp"

namespace vnlab {

// {"dim": n, "re": [...], "im": [...]} with row-major arrays of length n^2.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

// Fixed 17-significant-digit rendering used for every CSV cell.
std::string format_double(double value);

}  // namespace vnlab
