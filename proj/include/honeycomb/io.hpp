#ifndef HONEYCOMB_IO_HPP
#define HONEYCOMB_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "honeycomb/common.hpp"
#include "honeycomb/det2.hpp"
#include "honeycomb/dirac.hpp"
#include "honeycomb/perturb.hpp"
#include "honeycomb/potential.hpp"

namespace honeycomb {

using json = nlohmann::ordered_json;

// Malformed or inconsistent input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Writes through a temporary file in the target directory and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

// ---------------------------------------------------------------------------
// Potentials: {"kind": "...", "entries": [[m1, m2, re, im], ...]}

inline json potential_to_json(const PotentialSpectrum& V) {
  json e = json::array();
  for (const auto& [m, c] : V.coeffs()) e.push_back({m.m1, m.m2, c.real(), c.imag()});
  return json{{"kind", V.kind()}, {"entries", e}};
}

inline PotentialSpectrum potential_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("potential file must hold a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "kind" && key != "entries") throw ConfigError("unknown key in potential file: " + key);
  if (!j.contains("entries") || !j["entries"].is_array())
    throw ConfigError("potential file needs an \"entries\" array");
  PotentialSpectrum::Map m;
  for (const auto& row : j["entries"]) {
    if (!row.is_array() || row.size() != 4 || !row[0].is_number_integer() || !row[1].is_number_integer() ||
        !row[2].is_number() || !row[3].is_number())
      throw ConfigError("potential entries must be [m1, m2, re, im] with integer m1, m2");
    m[{row[0].get<int>(), row[1].get<int>()}] += cplx(row[2].get<double>(), row[3].get<double>());
  }
  std::string kind = "fourier";
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) throw ConfigError("\"kind\" must be a string");
    kind = j["kind"].get<std::string>();
  }
  return PotentialSpectrum(std::move(m), kind);
}

inline PotentialSpectrum load_potential(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read potential file " + path.string());
  try {
    return potential_from_json(json::parse(is));
  } catch (const json::parse_error& e) {
    throw ConfigError("potential file " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

inline json dirac_to_json(const DiracReport& r) {
  json fits = json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"direction", vec_json(f.direction)},
                    {"radii", f.radii},
                    {"slopes_plus", f.slopes_plus},
                    {"slopes_minus", f.slopes_minus},
                    {"even_part", f.even_part},
                    {"extrapolated_plus", f.extrapolated_plus},
                    {"extrapolated_minus", f.extrapolated_minus},
                    {"extrapolated_slope", f.extrapolated_slope}});
  return json{{"verdict", r.verdict()},
              {"status", to_string(r.status)},
              {"diagnostic", r.diagnostic},
              {"K_star", vec_json(r.K_star)},
              {"epsilon", r.epsilon},
              {"M", r.M},
              {"mu_star", r.mu_star},
              {"bands", json::array({r.band_lo, r.band_hi})},
              {"lambda_sharp", json::array({r.lambda_sharp.real(), r.lambda_sharp.imag()})},
              {"abs_lambda_sharp", std::abs(r.lambda_sharp)},
              {"separation", r.separation},
              {"max_anisotropy", r.max_anisotropy},
              {"max_slope_defect", r.max_slope_defect},
              {"tolerances",
               {{"lambda_threshold", r.tolerances.lambda_threshold},
                {"slope_match", r.tolerances.slope_match},
                {"isotropy", r.tolerances.isotropy}}},
              {"fits", fits}};
}

inline json deformation_to_json(const DeformationReport& r) {
  return json{{"eta", r.eta},
              {"W_parity", to_string(r.W_parity)},
              {"K_star", vec_json(r.K_star)},
              {"K_shifted", vec_json(r.K_shifted)},
              {"K_first_order", vec_json(r.K_first_order)},
              {"shift_defect", r.shift_defect},
              {"gap_at_optimum", r.gap_at_optimum},
              {"gap_at_first_order", r.gap_at_first_order},
              {"predicted_gap", r.predicted_gap},
              {"mu_at_optimum", r.mu_at_optimum},
              {"mu_first_order", r.mu_first_order},
              {"bands", json::array({r.band_lo, r.band_hi})},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"diagnostic", r.diagnostic}};
}

inline json zero_scan_to_json(const ZeroScan& s) {
  json z = json::array();
  for (const auto& x : s.zeros)
    z.push_back({{"mu_zero", x.mu_zero},
                 {"bracket", json::array({x.lo, x.hi})},
                 {"matched_eigenvalue", x.matched_eigenvalue},
                 {"defect", x.defect},
                 {"matched", x.matched}});
  return json{{"consistent", s.consistent()},
              {"diagnostic", s.diagnostic},
              {"match_tol", s.match_tol},
              {"eigenvalues_in_window", s.eigenvalues_in_window},
              {"unbracketed", s.unbracketed},
              {"zeros", z}};
}

inline std::string split_csv(const SplitTable& t) {
  std::ostringstream os;
  os << "eps,measured_double,measured_simple,defect_double,defect_simple\n";
  for (const auto& r : t.rows)
    os << fmt_num(r.eps) << ',' << fmt_num(r.measured_double) << ',' << fmt_num(r.measured_simple) << ','
       << fmt_num(r.defect_double) << ',' << fmt_num(r.defect_simple) << '\n';
  return os.str();
}

inline std::string scan_csv(const ZeroScan& s) {
  std::ostringstream os;
  os << "mu,value\n";
  for (const auto& [mu, v] : s.samples) os << fmt_num(mu) << ',' << fmt_num(v) << '\n';
  return os.str();
}

/// JSON text with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace honeycomb

#endif  // HONEYCOMB_IO_HPP
