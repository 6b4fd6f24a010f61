#pragma once

// JSON file formats.
//
// Scalar:   {"rat": "p/q"}  or  {"dec": "<digits>", "prec": <bits>}
//           ({"coef": "p/q", "sqrt": "p/q"} is accepted and written for
//            exact sqrt-of-rational values in shift files)
// Measure:  {"zero_mass": S, "atoms": [{"log_pos": S, "mass": S}, ...],
//            "terms": [{"coeff": S, "alpha": S, "k": S, "log_support": S}, ...]}
//           plus an optional "special" entry for quadrature-backed densities.
//           Atoms are ordered by log_pos ascending, terms lexicographically
//           by (alpha, k, log_support).
// Shift:    {"prefix": [S, ...], "tail": {"kind": ...} | null, "offset": n}

#include "berger/measure.hpp"
#include "berger/oracle.hpp"
#include "berger/shift.hpp"

#include <json.hpp>

namespace berger {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json scalar_to_json(const Scalar& s, bool allow_sqrt_form = false);
Scalar scalar_from_json(const nlohmann::json& j);

nlohmann::json measure_to_json(const Measure& mu);
Measure measure_from_json(const nlohmann::json& j);

nlohmann::json shift_to_json(const WeightSequence& w);
WeightSequence shift_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& report);

Measure load_measure(const std::string& path);    // "-" reads stdin
void save_measure(const Measure& mu, const std::string& path);  // "-" writes stdout
WeightSequence load_shift(const std::string& path);
void save_shift(const WeightSequence& w, const std::string& path);

}  // namespace berger
