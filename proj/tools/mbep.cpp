// Command-line front end: mbep <spectrum|jordan|perturb|evolve|qgt|verify>.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbep/acceptance.hpp"
#include "mbep/dynamics.hpp"
#include "mbep/errors.hpp"
#include "mbep/jordan.hpp"
#include "mbep/model.hpp"
#include "mbep/model_io.hpp"
#include "mbep/perturb.hpp"
#include "mbep/qgt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mbep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- config -------------------------------------------------------------------

struct Model {
  std::optional<Preset> preset;
  PresetParams params;
  OpenSystemSpec spec;  // custom model, or the preset at its parameters

  SpecFamily rate_family() const {
    if (preset) return preset_rate_family(*preset, params);
    const OpenSystemSpec base = spec;
    return [base](double gamma) {
      OpenSystemSpec s = base;
      for (auto& j : s.intra_jumps) j.rate *= gamma;
      return s;
    };
  }

  SpecFamily drive_family() const {
    if (preset) return preset_drive_family(*preset, params);
    if (spec.drives.empty()) throw ConfigError("qgt: the model has no drive to scan");
    const OpenSystemSpec base = spec;
    return [base](double omega) {
      OpenSystemSpec s = base;
      for (auto& d : s.drives) d.omega = omega;
      return s;
    };
  }

  std::vector<std::string> excited_levels() const {
    std::vector<std::string> out;
    for (int l = 2; l <= spec.n_levels; ++l) out.push_back(spec.level_name(l));
    return out;
  }
  std::vector<std::string> all_levels() const {
    std::vector<std::string> out;
    for (int l = 1; l <= spec.n_levels; ++l) out.push_back(spec.level_name(l));
    return out;
  }
};

double positive(const json& opts, const char* key, double fallback) {
  if (!opts.contains(key)) return fallback;
  const json& v = opts.at(key);
  if (!v.is_number()) throw ConfigError(std::string("command option '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!(x > 0) || !std::isfinite(x)) throw ConfigError(std::string("command option '") + key + "' must be positive");
  return x;
}

double non_negative(const json& opts, const char* key, double fallback) {
  if (!opts.contains(key)) return fallback;
  const json& v = opts.at(key);
  if (!v.is_number()) throw ConfigError(std::string("command option '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!(x >= 0) || !std::isfinite(x)) throw ConfigError(std::string("command option '") + key + "' must be >= 0");
  return x;
}

std::size_t count_option(const json& opts, const char* key, std::size_t fallback, std::size_t minimum) {
  if (!opts.contains(key)) return fallback;
  const json& v = opts.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum))
    throw ConfigError(std::string("command option '") + key + "' must be an integer >= " + std::to_string(minimum));
  return v.get<std::size_t>();
}

bool flag_option(const json& opts, const char* key, bool fallback) {
  if (!opts.contains(key)) return fallback;
  if (!opts.at(key).is_boolean()) throw ConfigError(std::string("command option '") + key + "' must be true or false");
  return opts.at(key).get<bool>();
}

std::string choice(const json& opts, const char* key, const std::string& fallback,
                   const std::vector<std::string>& allowed) {
  if (!opts.contains(key)) return fallback;
  if (!opts.at(key).is_string()) throw ConfigError(std::string("command option '") + key + "' must be a string");
  const auto v = opts.at(key).get<std::string>();
  if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(std::string("command option '") + key + "' must be one of: " + list);
  }
  return v;
}

void set_param(PresetParams& p, const std::string& key, double value) {
  if (!std::isfinite(value)) throw ConfigError("parameter " + key + " must be finite");
  if (key == "omega") {
    p.omega = value;
    return;
  }
  if (value < 0) throw ConfigError("parameter " + key + " must be non-negative");
  if (key == "gamma_i") p.gamma_i = value;
  else if (key == "gamma_e") p.gamma_e = value;
  else if (key == "gamma_h") p.gamma_h = value;
  else if (key == "gamma" || key == "Gamma" || key == "gamma_cap") p.gamma_cap = value;
  else throw ConfigError("unknown preset parameter '" + key + "' (gamma_i, gamma_e, gamma_h, omega, gamma)");
}

Model load_model(const json& doc, const std::optional<std::string>& preset_flag,
                 const std::vector<std::string>& param_flags) {
  Model m;
  std::optional<std::string> name = preset_flag;
  if (!name && doc.contains("preset")) {
    if (!doc.at("preset").is_string()) throw ConfigError("'preset' must be a string");
    name = doc.at("preset").get<std::string>();
  }
  if (name) {
    m.preset = parse_preset(*name);
    m.params = default_params(*m.preset);
    if (doc.contains("params")) {
      const json& ps = doc.at("params");
      if (!ps.is_object()) throw ConfigError("'params' must be an object");
      for (const auto& [k, v] : ps.items()) {
        if (!v.is_number()) throw ConfigError("parameter " + k + " must be a number");
        set_param(m.params, k, v.get<double>());
      }
    }
    for (const auto& kv : param_flags) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
      double value = 0;
      try {
        std::size_t used = 0;
        value = std::stod(kv.substr(eq + 1), &used);
        if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
      } catch (const std::exception&) {
        throw ConfigError("--param " + kv + ": value is not a number");
      }
      set_param(m.params, kv.substr(0, eq), value);
    }
    m.spec = preset(*m.preset, m.params);
  } else {
    if (!param_flags.empty()) throw ConfigError("--param needs a preset");
    json model = doc;
    model.erase("command");
    m.spec = spec_from_json(model);
  }
  return m;
}

// ---- outputs ------------------------------------------------------------------------

struct Output {
  std::string name;
  std::string content;
};

// Writes every file next to its final name first, then renames, so a failing
// command leaves no partial set behind.
void commit(const fs::path& dir, const std::vector<Output>& files) {
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  for (const auto& f : files) {
    const fs::path tmp = dir / (f.name + ".partial");
    std::ofstream os(tmp, std::ios::binary);
    os << f.content;
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    staged.push_back(tmp);
  }
  for (std::size_t k = 0; k < files.size(); ++k) fs::rename(staged[k], dir / files[k].name);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json spectrum_json(const std::vector<Complex>& values) {
  json a = json::array();
  for (const auto& z : values) a.push_back(complex_json(z));
  return a;
}

json structure_json(const JordanStructure& s) {
  return {{"eigenvalue", complex_json(s.eigenvalue)}, {"segre", s.segre}, {"weyr", s.weyr}};
}

json exact_json(const ExactComplex& z) { return json::array({z.re.get_str(), z.im.get_str()}); }

// ---- commands -----------------------------------------------------------------------

struct Context {
  Model model;
  json options;  // command block for this subcommand
  std::string format;
  Execution exec = Execution::parallel;
};

std::vector<Output> cmd_spectrum(const Context& c) {
  const LindbladParts parts = build_parts(c.model.spec);
  const std::vector<std::pair<std::string, const ComplexMatrix*>> mats{
      {"hamiltonian", &parts.hamiltonian},
      {"h_eff", &parts.h_eff},
      {"liouvillian_eff", &parts.liouvillian_eff},
      {"lindbladian_eff", &parts.lindbladian_eff},
      {"full_lindbladian", &parts.full_lindbladian}};
  if (c.format == "csv") {
    std::string out = "matrix,index,re,im\n";
    for (const auto& [name, m] : mats) {
      const auto vals = eigenvalues(*m);
      for (std::size_t k = 0; k < vals.size(); ++k)
        out += name + "," + std::to_string(k) + "," + fmt(vals[k].real()) + "," + fmt(vals[k].imag()) + "\n";
    }
    return {{"spectrum.csv", out}};
  }
  json j;
  for (const auto& [name, m] : mats) j[name] = spectrum_json(eigenvalues(*m));
  return {{"spectrum.json", dump(j)}};
}

StructureOptions structure_options(const json& o) {
  StructureOptions so;
  so.cluster_tol = positive(o, "cluster_tol", kDefaultClusterTol);
  so.rank_tol = positive(o, "rank_tol", kDefaultRankTol);
  return so;
}

std::vector<Output> cmd_jordan(const Context& c) {
  const StructureOptions so = structure_options(c.options);
  const std::string which = choice(c.options, "matrix", "liouvillian_eff",
                                   {"h_eff", "liouvillian_eff", "lindbladian_eff", "full_lindbladian"});
  const LindbladParts parts = build_parts(c.model.spec);
  const ComplexMatrix& m = which == "h_eff"             ? parts.h_eff
                           : which == "liouvillian_eff" ? parts.liouvillian_eff
                           : which == "lindbladian_eff" ? parts.lindbladian_eff
                                                        : parts.full_lindbladian;
  const StructureReport rep = detect_structure(m, so);
  json j;
  j["matrix"] = which;
  j["clusters"] = json::array();
  for (const auto& s : rep.clusters) j["clusters"].push_back(structure_json(s));
  j["warnings"] = rep.warnings;

  if (which == "liouvillian_eff") {
    // Cross-check against the blocks predicted from H_eff.
    const StructureReport h = detect_structure(parts.h_eff, so);
    std::vector<JordanBlock> blocks;
    for (const auto& s : h.clusters)
      for (auto size : s.segre) blocks.push_back({size, s.eigenvalue});
    const auto predicted = predict_liouvillian_blocks(blocks, blocks, so.cluster_tol);
    j["h_eff_clusters"] = json::array();
    for (const auto& s : h.clusters) j["h_eff_clusters"].push_back(structure_json(s));
    j["predicted"] = json::array();
    for (const auto& s : predicted) j["predicted"].push_back(structure_json(s));
    bool agree = predicted.size() == rep.clusters.size();
    for (const auto& p : predicted) {
      bool hit = false;
      for (const auto& d : rep.clusters)
        if (std::abs(d.eigenvalue - p.eigenvalue) <= std::sqrt(so.cluster_tol) * std::max(1.0, std::abs(p.eigenvalue)))
          hit = d.segre == p.segre;
      agree = agree && hit;
    }
    j["prediction_agrees"] = agree;
  }
  return {{"jordan.json", dump(j)}};
}

ExactComplex decimal_complex(Complex z) { return {decimal_rational(z.real()), decimal_rational(z.imag())}; }

// A numerically located cluster centre carries rounding noise; keep ten
// significant digits so that parameters given in decimal come back exact.
ExactComplex snapped_complex(Complex z) {
  auto snap = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::abs(x) < 1e-12 ? 0.0 : std::strtod(buf, nullptr);
  };
  return decimal_complex({snap(z.real()), snap(z.imag())});
}

ExactComplexMatrix decimal_lift(const ComplexMatrix& m) {
  ExactComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index col = 0; col < m.cols(); ++col)
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(col)) = decimal_complex(m(r, col));
  return out;
}

std::vector<Output> cmd_perturb(const Context& c) {
  const double lo = positive(c.options, "gamma_min", 1e-8);
  const double hi = positive(c.options, "gamma_max", 1e-4);
  if (!(hi > lo)) throw ConfigError("perturb: gamma_max must exceed gamma_min");
  const std::size_t points = count_option(c.options, "points", 12, 2);
  SplittingOptions so;
  so.substeps = count_option(c.options, "substeps", so.substeps, 1);
  so.ambiguity_ratio = positive(c.options, "ambiguity_ratio", so.ambiguity_ratio);
  so.structure = structure_options(c.options);
  so.execution = c.exec;
  const bool with_diagram = flag_option(c.options, "diagram", true);

  const MatrixFamily family = lindbladian_eff_family(c.model.rate_family());
  const auto grid = log_grid(lo, hi, points);
  const SplittingFit fit = splitting_exponent_fit(family, grid, so);

  json j;
  j["branches"] = json::array();
  for (const auto& b : fit.branches)
    j["branches"].push_back({{"exponent", b.exponent},
                             {"coefficient", complex_json(b.coefficient)},
                             {"r2", b.r2},
                             {"reference", complex_json(b.reference)},
                             {"ambiguous", b.ambiguous}});
  j["warnings"] = fit.warnings;

  if (with_diagram) {
    ExactRateFamily exact;
    ExactComplex center;
    json notes = json::array();
    if (c.model.preset) {
      const ExactPresetParams ep = exact_preset_params(*c.model.preset, c.model.params);
      exact = exact_preset_family(*c.model.preset, ep);
      center = is_qutrit(*c.model.preset) ? ExactComplex(-ep.gamma_i) : ExactComplex(Rational(-(ep.gamma_i + ep.gamma_e) / 2));
    } else {
      const MatrixFamily f = family;
      exact.base = decimal_lift(f(0.0));
      exact.slope = decimal_lift(f(1.0) - f(0.0));
      notes.push_back("custom model lifted to rationals through shortest decimal expansions");
      if (c.options.contains("center")) {
        json row = json::array(), rows = json::array();
        row.push_back(c.options.at("center"));
        rows.push_back(row);
        const ComplexMatrix z = matrix_from_json(rows, "center");
        center = decimal_complex(z(0, 0));
      } else {
        const auto rep = detect_structure(f(0.0), so.structure);
        const JordanStructure* best = nullptr;
        for (const auto& s : rep.clusters)
          if (!best || s.algebraic_multiplicity() > best->algebraic_multiplicity()) best = &s;
        if (!best) throw ConfigError("perturb: empty model");
        center = snapped_complex(best->eigenvalue);
      }
    }
    GammaPolynomial p = recenter(char_poly_in_gamma(exact), center);

    if (c.model.preset == Preset::qutrit_i) {
      // Split off the factor carrying lambda_6,7,8.
      const ExactPresetParams ep = exact_preset_params(*c.model.preset, c.model.params);
      const Rational gt = (ep.gamma_h - ep.gamma_e) / 2;
      const RatePolynomial g = RatePolynomial::gamma();
      const GammaPolynomial lin({RatePolynomial(ExactComplex(1)), g});
      const GammaPolynomial quad({RatePolynomial(ExactComplex(1)), RatePolynomial::monomial(ExactComplex(2), 1),
                                  RatePolynomial::monomial(ExactComplex(Rational(-gt / 2)), 1) +
                                      RatePolynomial::monomial(ExactComplex(Rational(3, 4)), 2)});
      const PolynomialDivision div = divide(p, lin * quad);
      if (div.exact()) {
        p = div.quotient;
        notes.push_back("divided by (mu + G)(mu^2 + 2 G mu - gt G / 2 + 3 G^2 / 4), gt = (gamma_h - gamma_e)/2");
      } else {
        notes.push_back("closed-form cubic factor does not divide at these parameters; full polynomial used");
      }
    }

    const NewtonDiagram nd = newton_diagram(p);
    json d;
    d["center"] = exact_json(center);
    d["degree"] = nd.degree;
    d["zero_roots_removed"] = nd.zero_roots_removed;
    d["points"] = json::array();
    for (const auto& pt : nd.points)
      d["points"].push_back({{"k", pt.k}, {"beta", pt.beta}, {"alpha", exact_json(pt.alpha)}});
    d["segments"] = json::array();
    for (const auto& s : nd.segments) {
      json poly = json::array();
      for (const auto& a : s.polynomial) poly.push_back(exact_json(a));
      json seg{{"slope", s.slope.get_str()}, {"span", s.span()}, {"polynomial", poly},
               {"roots", spectrum_json(s.roots())}};
      if (auto r = s.exact_root()) seg["exact_root"] = exact_json(*r);
      d["segments"].push_back(seg);
    }
    d["notes"] = notes;
    j["diagram"] = d;
  }

  std::string table;
  if (c.format == "csv") {
    table = "gamma,branch,re_lambda,im_lambda\n";
    for (std::size_t k = 0; k < fit.gammas.size(); ++k)
      for (std::size_t b = 0; b < fit.branches.size(); ++b) {
        const Complex z = fit.branches[b].trajectory[k];
        table += fmt(fit.gammas[k]) + "," + std::to_string(b) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "\n";
      }
    return {{"perturb.json", dump(j)}, {"perturb.csv", table}};
  }
  json rows = json::array();
  for (std::size_t k = 0; k < fit.gammas.size(); ++k) {
    json lam = json::array();
    for (const auto& b : fit.branches) lam.push_back(complex_json(b.trajectory[k]));
    rows.push_back({{"gamma", fit.gammas[k]}, {"lambda", lam}});
  }
  j["trajectories"] = rows;
  return {{"perturb.json", dump(j)}};
}

std::size_t level_index(const json& v, const std::vector<std::string>& levels) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (levels[k] == s) return k;
    throw ConfigError("evolve: unknown level '" + s + "'");
  }
  if (v.is_number_integer()) {
    const auto k = v.get<long long>();
    if (k < 1 || k > static_cast<long long>(levels.size())) throw ConfigError("evolve: level index out of range");
    return static_cast<std::size_t>(k - 1);
  }
  throw ConfigError("evolve: initial_level must be a level name or a 1-based index");
}

std::vector<Output> cmd_evolve(const Context& c) {
  const std::string gen = choice(c.options, "generator", "lindbladian_eff",
                                 {"liouvillian_eff", "lindbladian_eff", "full_lindbladian"});
  const std::string method = choice(c.options, "method", "exp", {"exp", "jordan"});
  const double tau_max = positive(c.options, "tau_max", 12.0);
  const std::size_t points = count_option(c.options, "points", 400, 2);
  PrefactorOptions po;
  po.window_fraction = positive(c.options, "window_fraction", po.window_fraction);
  if (po.window_fraction > 1) throw ConfigError("evolve: window_fraction must lie in (0, 1]");
  po.max_degree = count_option(c.options, "max_degree", po.max_degree, 0);
  po.rel_tol = positive(c.options, "fit_tol", po.rel_tol);
  const StructureOptions so = structure_options(c.options);

  const bool full = gen == "full_lindbladian";
  const auto levels = full ? c.model.all_levels() : c.model.excited_levels();
  const auto d = static_cast<Eigen::Index>(levels.size());
  ComplexMatrix rho0;
  if (c.options.contains("initial_state")) {
    rho0 = matrix_from_json(c.options.at("initial_state"), "initial_state");
    if (rho0.rows() != d || rho0.cols() != d)
      throw ConfigError("evolve: initial_state must be " + std::to_string(d) + "x" + std::to_string(d));
  } else {
    const std::size_t l = c.options.contains("initial_level") ? level_index(c.options.at("initial_level"), levels) : 0;
    rho0 = pure_state(static_cast<int>(d), static_cast<int>(l) + 1);
  }
  validate_density_matrix(rho0);

  double scale = 1.0;
  if (c.options.contains("time_scale")) scale = positive(c.options, "time_scale", 1.0);
  else if (c.model.preset) scale = preset_time_scale(*c.model.preset, c.model.params);

  const LindbladParts parts = build_parts(c.model.spec);
  const ComplexMatrix& l = gen == "liouvillian_eff" ? parts.liouvillian_eff
                           : gen == "lindbladian_eff" ? parts.lindbladian_eff
                                                      : parts.full_lindbladian;
  EvolveOptions eo;
  eo.time_scale = scale;
  eo.levels = levels;
  eo.execution = c.exec;
  const auto times = linear_grid(0.0, tau_max / scale, points);
  const TrajectoryTable t =
      method == "exp" ? evolve(l, rho0, times, eo) : jordan_evolve(jordan_basis(l, so).sets, rho0, times, eo);

  json summary;
  summary["generator"] = gen;
  summary["method"] = method;
  summary["time_scale"] = scale;
  summary["decay_rate"] = t.decay_rate;
  summary["levels"] = json::array();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    json entry{{"level", levels[k]}};
    try {
      const PrefactorFit f = prefactor_degree(t, k, po);
      entry["degree"] = f.degree;
      entry["residual"] = f.residual;
      entry["coefficients"] = f.coefficients;
      entry["window"] = json::array({f.window_begin, f.window_end});
    } catch (const NumericError& e) {
      entry["error"] = e.what();
    }
    summary["levels"].push_back(entry);
  }

  if (c.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
      json pop = json::array(), pre = json::array();
      for (std::size_t lv = 0; lv < levels.size(); ++lv) {
        pop.push_back(t.populations[lv][k]);
        pre.push_back(t.prefactor[lv][k]);
      }
      rows.push_back({{"tau", t.tau(k)}, {"rho", pop}, {"prefactor", pre}});
    }
    summary["table"] = rows;
    return {{"evolve.json", dump(summary)}};
  }
  std::string csv = "tau";
  for (const auto& n : levels) csv += ",rho_" + n;
  for (const auto& n : levels) csv += ",prefactor_" + n;
  csv += "\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv += fmt(t.tau(k));
    for (std::size_t lv = 0; lv < levels.size(); ++lv) csv += "," + fmt(t.populations[lv][k]);
    for (std::size_t lv = 0; lv < levels.size(); ++lv) csv += "," + fmt(t.prefactor[lv][k]);
    csv += "\n";
  }
  return {{"evolve.csv", csv}, {"evolve_summary.json", dump(summary)}};
}

std::vector<Output> cmd_qgt(const Context& c) {
  const double lo = non_negative(c.options, "omega_min", 0.0005);
  const double hi = positive(c.options, "omega_max", 0.4);
  const double step = positive(c.options, "omega_step", 1e-3);
  if (!(hi > lo)) throw ConfigError("qgt: omega_max must exceed omega_min");
  ScanOptions so;
  so.qgt.step = non_negative(c.options, "step", 0.0);
  so.qgt.richardson = flag_option(c.options, "richardson", false);
  so.qgt.degeneracy_tol = positive(c.options, "degeneracy_tol", so.qgt.degeneracy_tol);
  so.qgt.ep_condition_threshold = positive(c.options, "ep_condition_threshold", so.qgt.ep_condition_threshold);
  so.qgt.gauge_check = flag_option(c.options, "gauge_check", true);
  so.qgt.gauge_tol = positive(c.options, "gauge_tol", so.qgt.gauge_tol);
  so.divergence_threshold = positive(c.options, "divergence_threshold", so.divergence_threshold);
  so.min_exponent = positive(c.options, "min_exponent", so.min_exponent);
  so.execution = c.exec;

  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double w = lo + step * static_cast<double>(k);
    if (w > hi * (1 + 1e-12)) break;
    grid.push_back(w);
  }
  if (grid.size() < 3) throw ConfigError("qgt: grid needs at least three points");
  if (grid.size() > 1000000) throw ConfigError("qgt: grid is too large");

  const QgtScan scan = metric_scan(lindbladian_eff_family(c.model.drive_family()), grid, so);

  json crit;
  crit["critical_points"] = json::array();
  for (const auto& p : scan.critical_points)
    crit["critical_points"].push_back(
        {{"omega", p.omega}, {"exponent", p.exponent}, {"peak_metric", p.peak_metric}, {"modes", p.modes}});
  std::map<std::string, std::size_t> counts;
  for (const auto& f : scan.flags) ++counts[f];
  crit["flag_counts"] = counts;
  if (c.model.preset == Preset::qubit_ii) {
    const auto d = qubit_case_ii_critical_drives(resolved_gamma_i(*c.model.preset, c.model.params),
                                                 c.model.params.gamma_e, c.model.params.gamma_cap);
    crit["closed_form"] = {{"liouvillian_ep", d.liouvillian_ep}, {"lindbladian_ep", d.lindbladian_ep}};
  } else if (c.model.preset == Preset::qutrit_ii) {
    const auto d = qutrit_case_ii_critical_drives(c.model.params.gamma_h, c.model.params.gamma_e,
                                                  c.model.params.gamma_cap);
    crit["closed_form"] = {{"liouvillian_ep", d.liouvillian_ep},
                           {"lindbladian_ep1", d.lindbladian_ep1},
                           {"lindbladian_ep2", d.lindbladian_ep2}};
  }

  auto metric_json = [](double g) { return std::isfinite(g) ? json(g) : json(nullptr); };
  if (c.format == "json") {
    json rows = json::array();
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (std::size_t a = 0; a < scan.n_modes; ++a)
        rows.push_back({{"omega", grid[k]},
                        {"mode", a},
                        {"lambda", complex_json(scan.eigenvalues[k][a])},
                        {"metric", metric_json(scan.metric[k][a])},
                        {"cond", scan.condition[k]},
                        {"flag", scan.flags[k]}});
    crit["table"] = rows;
    return {{"qgt_critical.json", dump(crit)}};
  }
  std::string csv = "omega,mode,re_lambda,im_lambda,metric,cond,flag\n";
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t a = 0; a < scan.n_modes; ++a) {
      const double g = scan.metric[k][a];
      csv += fmt(grid[k]) + "," + std::to_string(a) + "," + fmt(scan.eigenvalues[k][a].real()) + "," +
             fmt(scan.eigenvalues[k][a].imag()) + "," + (std::isfinite(g) ? fmt(g) : "nan") + "," +
             fmt(scan.condition[k]) + "," + scan.flags[k] + "\n";
    }
  return {{"qgt.csv", csv}, {"qgt_critical.json", dump(crit)}};
}

int cmd_verify(Execution exec, const std::vector<int>& only, std::vector<Output>& files) {
  json j = json::array();
  bool all = true;
  std::vector<int> ids = only;
  if (ids.empty())
    for (int k = 1; k <= kCriterionCount; ++k) ids.push_back(k);
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, exec);
    std::cout << format_result(r) << std::endl;
    all = all && r.passed;
    j.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  files.push_back({"verify.json", dump(j)});
  return all ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exceptional-point analysis of driven-dissipative N-level Lindbladians"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> preset_name_flag;
  std::vector<std::string> params;
  std::string out_dir = ".";
  int jobs = 0;
  std::string format;
  std::vector<int> criteria;

  const std::vector<std::string> commands{"spectrum", "jordan", "perturb", "evolve", "qgt", "verify"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON model file with an optional 'command' block");
    sub->add_option("--preset", preset_name_flag, "qubit_i | qubit_ii | qutrit_i | qutrit_ii");
    sub->add_option("--param", params, "preset parameter key=value (gamma_i, gamma_e, gamma_h, omega, gamma)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "worker threads (0: all, 1: serial reference path)")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    if (name == "verify") sub->add_option("--criterion", criteria, "run only these criteria")->check(CLI::Range(1, kCriterionCount));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (jobs > 0) set_worker_limit(jobs);
    const Execution exec = jobs == 1 ? Execution::serial : Execution::parallel;
    std::vector<Output> files;

    if (command == "verify") {
      const int code = cmd_verify(exec, criteria, files);
      commit(out_dir, files);
      return code;
    }

    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      try {
        in >> doc;
      } catch (const json::parse_error& e) {
        throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
      }
      if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    } else if (!preset_name_flag) {
      throw ConfigError("either --config or --preset is required");
    }

    Context c;
    c.model = load_model(doc, preset_name_flag, params);
    c.exec = exec;
    if (doc.contains("command")) {
      const json& block = doc.at("command");
      if (!block.is_object()) throw ConfigError("'command' must be an object");
      if (block.contains(command)) c.options = block.at(command);
      if (!c.options.is_null() && !c.options.is_object())
        throw ConfigError("command." + command + " must be an object");
      if (format.empty() && block.contains("format")) format = choice(block, "format", "", {"csv", "json"});
    }
    if (c.options.is_null()) c.options = json::object();
    c.format = !format.empty() ? format : (command == "spectrum" || command == "jordan" ? "json" : "csv");

    if (command == "spectrum") files = cmd_spectrum(c);
    else if (command == "jordan") files = cmd_jordan(c);
    else if (command == "perturb") files = cmd_perturb(c);
    else if (command == "evolve") files = cmd_evolve(c);
    else files = cmd_qgt(c);
    commit(out_dir, files);
    for (const auto& f : files) std::cout << (fs::path(out_dir) / f.name).string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "mbep " << command << ": configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "mbep " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "mbep " << command << ": " << e.what() << "\n";
    return kExitNumeric;
  }
}
