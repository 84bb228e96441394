// honeycomb: band structures, Dirac points and determinant scans for honeycomb potentials.
//
//   honeycomb <bands|dirac|perturb|deform|det2> --config run.json [--out PATH]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 verdict false.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "honeycomb/det2.hpp"
#include "honeycomb/dirac.hpp"
#include "honeycomb/io.hpp"
#include "honeycomb/lattice.hpp"
#include "honeycomb/perturb.hpp"
#include "honeycomb/potential.hpp"
#include "honeycomb/spectral.hpp"

#ifndef HONEYCOMB_VERSION
#define HONEYCOMB_VERSION "0.0.0"
#endif

using namespace honeycomb;

namespace {

enum Exit { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_verdict = 4 };

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field \"") + key + "\" has the wrong type");
  }
}

template <typename T>
T get_req(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + " is missing \"" + key + "\"");
  return get_or<T>(obj, key, T{});
}

struct Common {
  LatticeGeometry g;
  PotentialSpectrum V;
  double eps = 0.0;
  int M = default_truncation;
};

PotentialSpectrum parse_potential(const json& p, const LatticeGeometry& g, int M, const std::string& where) {
  if (!p.is_object()) throw ConfigError(where + " must be an object");
  const auto kind = get_req<std::string>(p, "kind", where);
  if (kind == "optical") {
    require_keys(p, where, {"kind", "V0"});
    return optical_lattice(get_or<double>(p, "V0", 1.0));
  }
  if (kind == "atomic") {
    require_keys(p, where, {"kind", "V0", "s", "M"});
    return atomic_lattice(g, get_or<double>(p, "V0", 1.0), get_req<double>(p, "s", where),
                          get_or<int>(p, "M", M));
  }
  if (kind == "file") {
    require_keys(p, where, {"kind", "path"});
    return load_potential(get_req<std::string>(p, "path", where));
  }
  if (kind == "fourier") {
    require_keys(p, where, {"kind", "entries"});
    json copy = p;
    copy.erase("kind");
    return potential_from_json(copy);
  }
  throw ConfigError("unknown potential kind \"" + kind + "\" in " + where);
}

SymmetrySector parse_sector(const std::string& s) {
  if (s == "1" || s == "one") return SymmetrySector::one;
  if (s == "tau") return SymmetrySector::tau;
  if (s == "tau_bar") return SymmetrySector::tau_bar;
  throw ConfigError("sigma must be one of \"1\", \"tau\", \"tau_bar\"");
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

Common parse_common(const json& cfg) {
  require_keys(cfg, "config", {"a", "potential", "eps", "M", "bands", "dirac", "perturb", "deform", "det2"});
  Common c;
  c.g = build_geometry(get_or<double>(cfg, "a", 1.0));
  c.M = get_or<int>(cfg, "M", default_truncation);
  if (c.M < 1) throw ConfigError("M must be at least 1");
  c.eps = get_or<double>(cfg, "eps", 0.0);
  c.V = cfg.contains("potential") ? parse_potential(cfg["potential"], c.g, c.M, "potential")
                                  : optical_lattice(1.0);
  return c;
}

const json& section(const json& cfg, const char* name) {
  static const json empty = json::object();
  return cfg.contains(name) ? cfg.at(name) : empty;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-") std::cout << content;
  else write_atomic(out, content);
}

int cmd_bands(const json& cfg, const std::string& out) {
  const Common c = parse_common(cfg);
  const json& s = section(cfg, "bands");
  require_keys(s, "bands", {"path", "kpoints", "samples", "n_bands"});
  std::vector<Vec2> pts;
  if (s.contains("kpoints")) {
    if (s.contains("path")) throw ConfigError("bands: give either \"path\" or \"kpoints\", not both");
    for (const auto& k : s["kpoints"]) {
      if (!k.is_array() || k.size() != 2) throw ConfigError("bands.kpoints entries must be [kx, ky]");
      pts.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
  } else {
    pts = named_path(c.g, get_or<std::string>(s, "path", "G-K-M-G"), get_or<int>(s, "samples", 30));
  }
  const auto table = band_path(c.g, c.V, c.eps, c.M, pts, get_or<int>(s, "n_bands", 6));
  std::ostringstream os;
  write_band_csv(os, table);
  emit(out, os.str());
  return exit_ok;
}

int cmd_dirac(const json& cfg, const std::string& out) {
  const Common c = parse_common(cfg);
  const json& s = section(cfg, "dirac");
  require_keys(s, "dirac", {"directions", "radii", "lambda_threshold", "seed", "vertex", "level"});
  DiracTolerances tol;
  tol.lambda_threshold = get_or<double>(s, "lambda_threshold", tol.lambda_threshold);
  const auto vertex = get_or<std::string>(s, "vertex", "K");
  if (vertex != "K" && vertex != "K'") throw ConfigError("dirac.vertex must be \"K\" or \"K'\"");
  const int n_dir = get_or<int>(s, "directions", 8);
  if (n_dir < 1) throw ConfigError("dirac.directions must be positive");
  double offset = 0.0;
  if (s.contains("seed")) {
    std::mt19937_64 rng(get_or<std::uint64_t>(s, "seed", 0));
    offset = std::uniform_real_distribution<double>(0.0, 2.0 * pi / n_dir)(rng);
  }
  auto r = detect_dirac(c.g, c.V, c.eps, c.M, vertex == "K" ? c.g.K : c.g.Kprime, get_or<int>(s, "level", 0), tol);
  if (r.verdict()) fit_cone(c.g, c.V, r, uniform_directions(n_dir, offset), get_or<std::vector<double>>(s, "radii", {}));
  emit(out, dump(dirac_to_json(r)));
  std::cerr << "dirac: " << to_string(r.status) << (r.diagnostic.empty() ? "" : " (" + r.diagnostic + ")") << '\n';
  return r.verdict() ? exit_ok : exit_verdict;
}

int cmd_perturb(const json& cfg, const std::string& out) {
  const Common c = parse_common(cfg);
  const json& s = section(cfg, "perturb");
  require_keys(s, "perturb", {"eps_list"});
  const auto eps_list = get_or<std::vector<double>>(s, "eps_list", {0.01, 0.02, 0.04});
  if (eps_list.empty()) throw ConfigError("perturb.eps_list must not be empty");
  const auto t = verify_split(c.g, c.V, eps_list, c.M);
  emit(out, split_csv(t));
  for (std::size_t i = 0; i < t.exponent_double.size(); ++i)
    std::cerr << "perturb: defect exponents " << fmt_num(t.exponent_double[i]) << " (double), "
              << fmt_num(t.exponent_simple[i]) << " (simple)\n";
  return exit_ok;
}

int cmd_deform(const json& cfg, const std::string& out) {
  const Common c = parse_common(cfg);
  const json& s = section(cfg, "deform");
  require_keys(s, "deform", {"W", "eta", "mode"});
  if (!s.contains("W")) throw ConfigError("deform is missing \"W\"");
  const PotentialSpectrum W = parse_potential(s["W"], c.g, c.M, "deform.W");
  std::vector<double> etas;
  if (s.contains("eta") && s["eta"].is_number()) etas = {s["eta"].get<double>()};
  else etas = get_or<std::vector<double>>(s, "eta", {1e-2});
  const auto mode = get_or<std::string>(s, "mode", "auto");
  if (mode != "auto" && mode != "even" && mode != "odd") throw ConfigError("deform.mode must be auto, even or odd");
  const auto reports = parallel_map(etas.size(), [&](std::size_t i) {
    if (mode == "even") return deform_even(c.g, c.V, c.eps, W, etas[i], c.M);
    return deform_odd_gap(c.g, c.V, c.eps, W, etas[i], c.M);
  });
  json arr = json::array();
  bool ok = true;
  for (const auto& r : reports) {
    arr.push_back(deformation_to_json(r));
    ok = ok && r.diagnostic.empty();
  }
  emit(out, dump(json{{"epsilon", c.eps}, {"reports", arr}}));
  return ok ? exit_ok : exit_verdict;
}

int cmd_det2(const json& cfg, const std::string& out) {
  const Common c = parse_common(cfg);
  const json& s = section(cfg, "det2");
  require_keys(s, "det2", {"sigma", "window", "grid_n", "scan_csv"});
  const auto sigma = parse_sector(get_or<std::string>(s, "sigma", "tau"));
  const auto w = get_req<std::vector<double>>(s, "window", "det2");
  if (w.size() != 2) throw ConfigError("det2.window must be [mu_lo, mu_hi]");
  const auto scan = zero_scan(c.g, c.V, sigma, c.eps, {w[0], w[1]}, get_or<int>(s, "grid_n", 1000), c.M);
  emit(out, dump(zero_scan_to_json(scan)));
  if (s.contains("scan_csv")) write_atomic(get_or<std::string>(s, "scan_csv", ""), scan_csv(scan));
  return scan.consistent() ? exit_ok : exit_verdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of Schroedinger operators with honeycomb potentials"};
  app.set_version_flag("--version", std::string("honeycomb ") + HONEYCOMB_VERSION);
  app.require_subcommand(1);

  std::string config, out;
  int (*handler)(const json&, const std::string&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const json&, const std::string&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output file (default: stdout)");
    sub->callback([&handler, fn] { handler = fn; });
  };
  add("bands", "band energies along a k-path (CSV)", cmd_bands);
  add("dirac", "Dirac point detection and cone fit (JSON)", cmd_dirac);
  add("perturb", "small-eps splitting table (CSV)", cmd_perturb);
  add("deform", "Dirac point under a deformation eta W (JSON)", cmd_deform);
  add("det2", "det2 zero scan against the sector spectrum (JSON)", cmd_det2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    return handler(load_config(config), out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const SymmetryError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}
