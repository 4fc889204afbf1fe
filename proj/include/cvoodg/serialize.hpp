#pragma once

#include <string>

#include <json.hpp>

#include "cvoodg/coherent_bounds.hpp"
#include "cvoodg/oracle.hpp"
#include "cvoodg/state_bounds.hpp"

namespace cvoodg::io {

inline constexpr const char* kCsvSchema = "# schema: cv-oodg-csv/1";
inline constexpr const char* kBoundReportSchema = "cv-oodg/bound-report/1";
inline constexpr const char* kVerificationSchema = "cv-oodg/verification-report/1";
inline constexpr const char* kCurveSchema = "cv-oodg/curve/1";

// %.17g; non-finite values print as nan, inf, -inf.
std::string format_double(double x);

// Pretty JSON (2-space indent, sorted keys) with every floating-point number
// printed to 17 significant digits; non-finite numbers become null.
std::string dump_json(const nlohmann::json& j);

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const oracle::Assertion& a);
nlohmann::json to_json(const oracle::VerificationReport& r);

// {"re": [[...]], "im": [[...]]}, "im" optional. Throws std::invalid_argument.
FockMatrix fock_matrix_from_json(const nlohmann::json& j);
FockMatrix read_fock_matrix(const std::string& path);

// Piecewise-linear curve through the (nbar, epsilon) columns of a CSV file
// as written by `cv-oodg bound`; constant beyond the last row.
BoundCurve read_curve_csv(const std::string& path, const InDistributionGuarantee& g);

}  // namespace cvoodg::io
