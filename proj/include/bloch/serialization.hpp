// JSON/CSV value conversions shared by the CLI and its tests.
//
// Conventions: complex entries are [re, im] pairs; matrices are row-major
// nested arrays of entry pairs; real vectors are plain number arrays.  CSV
// numbers are printed with 17 significant digits so parsing them back yields
// the identical double.
#pragma once

#include <string>

#include <json.hpp>

#include "bloch/matrix.hpp"

namespace bloch {

using Json = nlohmann::ordered_json;

Json cmatrix_to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const Json& j);

Json cvector_to_json(const CVector& v);
CVector cvector_from_json(const Json& j);

Json rvector_to_json(const RVector& v);
RVector rvector_from_json(const Json& j);

// %.17g rendering (round-trip exact).
std::string csv_number(double x);

}  // namespace bloch
