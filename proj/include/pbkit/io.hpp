#pragma once

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

#include "pbkit/dist.hpp"
#include "pbkit/transport.hpp"

namespace pbkit {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kLibraryVersion = "0.1.0";

enum class arith_mode { float_mode, rational_mode };

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(const std::string& s) {
  std::ostringstream os;
  os << std::hex << fnv1a64(s);
  return os.str();
}

// --- rationals in JSON: "num/den", integer strings, or plain decimals ---

inline json rational_to_json(const rational& q) { return format_rational(q); }

inline rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return rational(j.get<long long>());
  if (j.is_number_float()) return snap_to_rational(j.get<double>()).value;
  throw std::domain_error("rational_from_json: expected string or number");
}

// --- distributions ---

template <class T>
json dist_to_json(const lattice_dist<T>& d) {
  json out;
  out["offset"] = format_rational(d.offset);
  out["step"] = format_rational(d.step);
  json masses = json::array();
  for (const auto& m : d.masses) {
    if constexpr (std::is_same_v<T, rational>)
      masses.push_back(format_rational(m));
    else {
      std::ostringstream os;
      os.precision(17);
      os << m;
      masses.push_back(os.str());
    }
  }
  out["masses"] = std::move(masses);
  return out;
}

inline lattice_q dist_q_from_json(const json& j) {
  rational offset = rational_from_json(j.at("offset"));
  rational step = rational_from_json(j.at("step"));
  std::vector<rational> masses;
  for (const auto& m : j.at("masses")) masses.push_back(rational_from_json(m));
  return lattice_q(offset, step, std::move(masses));
}

inline lattice_d dist_d_from_json(const json& j) {
  auto q = dist_q_from_json(j);
  return to_float_dist(q);
}

template <class T>
std::string dist_to_csv(const lattice_dist<T>& d) {
  std::ostringstream os;
  os << "value,mass\n";
  for (std::size_t i = 0; i < d.masses.size(); ++i) {
    os << format_rational(d.point(i)) << ",";
    if constexpr (std::is_same_v<T, rational>)
      os << format_rational(d.masses[i]);
    else {
      os.precision(17);
      os << d.masses[i];
    }
    os << "\n";
  }
  return os.str();
}

inline json params_to_json(const prob_params& p) {
  json probs = json::array();
  for (double x : p.probs) probs.push_back(x);
  return json{{"probs", std::move(probs)}};
}

inline json params_to_json(const prob_params_q& p) {
  json probs = json::array();
  for (const auto& x : p.probs) probs.push_back(format_rational(x));
  return json{{"probs", std::move(probs)}};
}

inline prob_params_q params_q_from_json(const json& j) {
  std::vector<rational> probs;
  for (const auto& x : j.at("probs")) probs.push_back(rational_from_json(x));
  return prob_params_q(std::move(probs));
}

// Inline literals: "bin:9:1/2", "pb:[0.1,0.2]", otherwise a file path.
inline prob_params_q parse_params_arg(const std::string& arg) {
  if (arg.rfind("bin:", 0) == 0) {
    auto rest = arg.substr(4);
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw std::domain_error("bin literal needs bin:<n>:<p>");
    long n = std::stol(rest.substr(0, colon));
    rational p = parse_rational(rest.substr(colon + 1));
    if (n < 1) throw std::domain_error("bin literal needs n >= 1");
    return binomial_params<rational>(static_cast<std::size_t>(n), p);
  }
  if (arg.rfind("pb:", 0) == 0) {
    auto j = json::parse(arg.substr(3));
    std::vector<rational> probs;
    for (const auto& x : j) probs.push_back(rational_from_json(x));
    return prob_params_q(std::move(probs));
  }
  if (!arg.empty() && (arg[0] == '[' || arg[0] == '{')) {
    auto j = json::parse(arg);
    if (j.is_array()) {
      std::vector<rational> probs;
      for (const auto& x : j) probs.push_back(rational_from_json(x));
      return prob_params_q(std::move(probs));
    }
    return params_q_from_json(j);
  }
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open parameter file: " + arg);
  json j;
  in >> j;
  if (j.is_array()) {
    std::vector<rational> probs;
    for (const auto& x : j) probs.push_back(rational_from_json(x));
    return prob_params_q(std::move(probs));
  }
  return params_q_from_json(j);
}

// Distribution argument: a distribution JSON file, or an inline parameter
// literal whose exact pmf is taken.
inline lattice_q parse_dist_arg(const std::string& arg) {
  if (arg.rfind("bin:", 0) == 0 || arg.rfind("pb:", 0) == 0)
    return pb_pmf(parse_params_arg(arg)).pmf;
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open distribution file: " + arg);
  json j;
  in >> j;
  if (j.contains("probs")) return pb_pmf(params_q_from_json(j)).pmf;
  return dist_q_from_json(j);
}

// --- certificates ---

inline json poly_to_json(const rational_poly& p) {
  json c = json::array();
  for (const auto& x : p.c) c.push_back(format_rational(x));
  return c;
}

inline rational_poly poly_from_json(const json& j) {
  std::vector<rational> c;
  for (const auto& x : j) c.push_back(rational_from_json(x));
  return rational_poly(std::move(c));
}

inline json certificate_to_json(const acc_certificate& cert) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["exact"] = cert.exact;
  out["value"] = format_rational(cert.value);
  out["upper"] = format_rational(cert.upper);
  out["source_trials"] = cert.source_trials;
  out["scale"] = format_rational(cert.scale);
  if (cert.witness) {
    json w;
    w["pgf"] = poly_to_json(cert.witness->pgf);
    w["found_by"] = cert.witness->found_by;
    w["kurtz_certified"] = cert.witness->kurtz_certified;
    json rec = json::array();
    for (double p : cert.witness->recovered_p) rec.push_back(p);
    w["recovered_params"] = std::move(rec);
    json plan = json::array();
    for (const auto& [i, j2, m] : cert.witness->plan.plan)
      plan.push_back(json{{"from", format_rational(cert.witness->plan.source[i].first)},
                          {"to", format_rational(cert.witness->plan.target[j2].first)},
                          {"mass", format_rational(m)}});
    w["plan"] = std::move(plan);
    out["witness"] = std::move(w);
  }
  json inf = json::array();
  for (const auto& e : cert.infeasibilities) {
    json entry;
    entry["threshold"] = format_rational(e.threshold);
    entry["kind"] = to_string(e.kind);
    if (e.kind == infeasibility_kind::forced_coupling_not_real_rooted)
      entry["pgf"] = poly_to_json(e.forced_pgf);
    if (e.grid_denominator > 0) entry["grid_denominator"] = e.grid_denominator;
    inf.push_back(std::move(entry));
  }
  out["infeasibilities"] = std::move(inf);
  return out;
}

// Revalidation on load: the witness must re-certify and sit at the stated
// distance; each infeasibility entry re-refutes by its own rule.
inline bool certificate_revalidates(const json& j, const lattice_q& source) {
  auto value = parse_rational(j.at("value").get<std::string>());
  if (j.contains("witness")) {
    auto pgf = poly_from_json(j.at("witness").at("pgf"));
    if (!is_real_rooted(pgf)) return false;
    lattice_q wdist(0, 1, pgf.c);
    if (j.at("exact").get<bool>() && winf(source, wdist) != value) return false;
  }
  for (const auto& e : j.at("infeasibilities")) {
    auto kind = e.at("kind").get<std::string>();
    auto t = parse_rational(e.at("threshold").get<std::string>());
    if (kind == "forced_coupling_not_real_rooted") {
      auto pgf = poly_from_json(e.at("pgf"));
      if (is_real_rooted(pgf)) return false;
    } else if (kind == "no_admissible_target") {
      // some atom must be farther than t from every integer
      bool found = false;
      for (const auto& [x, m] : support_atoms(source)) {
        rational lo = abs_r(x - rational(floor_big(x)));
        rational hi = abs_r(rational(ceil_big(x)) - x);
        if (lo > t && hi > t) found = true;
      }
      if (!found) return false;
    }
  }
  return true;
}

// --- polynomial text format: comma-separated rationals, low to high ---

inline rational_poly poly_from_text(const std::string& text) {
  std::vector<rational> c;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    // trim whitespace
    auto b = tok.find_first_not_of(" \t\r\n");
    auto e = tok.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    c.push_back(parse_rational(tok.substr(b, e - b + 1)));
  }
  if (c.empty()) throw std::domain_error("poly_from_text: no coefficients");
  return rational_poly(std::move(c));
}

inline std::string poly_to_text(const rational_poly& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.c.size(); ++i) {
    if (i) os << ",";
    os << format_rational(p.c[i]);
  }
  return os.str();
}

// --- run manifest (stderr side channel; stdout stays byte-stable) ---

struct run_manifest {
  std::string command;
  std::vector<std::string> input_digests;
  std::string library_version = kLibraryVersion;
  std::uint64_t seed = 0;
  bool seeded = false;
  double wall_ms = 0.0;
  std::string output_digest;

  json to_json() const {
    json out;
    out["command"] = command;
    out["input_digests"] = input_digests;
    out["library_version"] = library_version;
    if (seeded) out["seed"] = seed;
    out["wall_ms"] = wall_ms;
    out["output_digest"] = output_digest;
    out["schema_version"] = kSchemaVersion;
    return out;
  }
};

}  // namespace pbkit
