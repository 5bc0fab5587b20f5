#include "mbep/model_io.hpp"

#include <string>

#include "mbep/errors.hpp"

namespace mbep {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ConfigError(std::string("model: missing key '") + key + "'");
  return doc.at(key);
}

double real_number(const json& v, const std::string& where) {
  if (v.is_array() || v.is_object())
    throw ConfigError(where + ": expected a real number (complex values are not supported)");
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

std::vector<double> real_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected a list");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) out.push_back(real_number(v[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw ConfigError(where + ": expected a non-empty list of rows");
  const std::size_t n_rows = rows.size();
  const std::size_t n_cols = rows[0].is_array() ? rows[0].size() : 0;
  ComplexMatrix m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n_cols) throw ConfigError(where + ": ragged rows");
    for (std::size_t c = 0; c < n_cols; ++c) {
      const json& e = rows[r][c];
      const std::string at = where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      Complex z;
      if (e.is_number()) {
        z = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        z = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(at + ": expected [re, im]");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z;
    }
  }
  return m;
}

OpenSystemSpec spec_from_json(const json& doc) {
  OpenSystemSpec spec;
  spec.n_levels = integer(require(doc, "n_levels"), "n_levels");
  spec.detunings = doc.contains("detunings") ? real_list(doc.at("detunings"), "detunings")
                                             : std::vector<double>(spec.n_levels > 1 ? spec.n_levels - 1 : 0, 0.0);
  spec.sink_rates = real_list(require(doc, "sink_rates"), "sink_rates");
  if (doc.contains("drives")) {
    const json& drives = doc.at("drives");
    if (!drives.is_array()) throw ConfigError("drives: expected a list");
    for (std::size_t k = 0; k < drives.size(); ++k) {
      const std::string at = "drives[" + std::to_string(k) + "]";
      const json& d = drives[k];
      if (!d.is_object()) throw ConfigError(at + ": expected {i, j, omega}");
      spec.drives.push_back({integer(require(d, "i"), at + ".i"), integer(require(d, "j"), at + ".j"),
                             real_number(require(d, "omega"), at + ".omega")});
    }
  }
  if (doc.contains("intra_jumps")) {
    const json& jumps = doc.at("intra_jumps");
    if (!jumps.is_array()) throw ConfigError("intra_jumps: expected a list");
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const std::string at = "intra_jumps[" + std::to_string(k) + "]";
      IntraJump jump;
      jump.matrix = matrix_from_json(require(jumps[k], "matrix"), at + ".matrix");
      jump.rate = real_number(require(jumps[k], "rate"), at + ".rate");
      spec.intra_jumps.push_back(std::move(jump));
    }
  }
  if (doc.contains("level_names")) {
    for (const auto& name : doc.at("level_names")) {
      if (!name.is_string()) throw ConfigError("level_names: expected strings");
      spec.level_names.push_back(name.get<std::string>());
    }
  }
  spec.validate();
  return spec;
}

json spec_to_json(const OpenSystemSpec& spec) {
  json doc;
  doc["n_levels"] = spec.n_levels;
  doc["detunings"] = spec.detunings;
  json drives = json::array();
  for (const auto& d : spec.drives) drives.push_back({{"i", d.i}, {"j", d.j}, {"omega", d.omega}});
  doc["drives"] = drives;
  doc["sink_rates"] = spec.sink_rates;
  json jumps = json::array();
  for (const auto& j : spec.intra_jumps) jumps.push_back({{"matrix", matrix_to_json(j.matrix)}, {"rate", j.rate}});
  doc["intra_jumps"] = jumps;
  if (!spec.level_names.empty()) doc["level_names"] = spec.level_names;
  return doc;
}

}  // namespace mbep
