#pragma once

#include <json.hpp>

#include "mbep/model.hpp"

namespace mbep {

// Model document: n_levels, detunings, drives [{i, j, omega}], sink_rates,
// intra_jumps [{matrix: rows of [re, im] pairs, rate}], optional level_names.
// See docs/model.schema.json.
OpenSystemSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const OpenSystemSpec& spec);

nlohmann::json complex_to_json(const Complex& z);
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& rows, const std::string& where);

}  // namespace mbep
