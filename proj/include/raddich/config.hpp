#pragma once

#include <cstdint>
#include <string>

#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/io.hpp"
#include "raddich/riccati.hpp"
#include "raddich/spectral.hpp"

namespace raddich {

enum class OutputFormat { csv, json };

inline const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format must be 'csv' or 'json'");
}

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double seed_tol = 1e-12;
  double quad = 1e-10;

  RiccatiOptions riccati() const {
    RiccatiOptions o;
    o.rtol = rtol;
    o.atol = atol;
    o.seed_tol = seed_tol;
    return o;
  }
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

/// One run's inputs. Required keys: d, V. Optional: n (3), K (4), seed (42),
/// format ("csv"), tolerances {rtol, atol, seed_tol, quad}. Unknown keys are
/// errors. Command-line flags override the scalar keys.
struct RunConfig {
  SphereSpec sphere{3, 4};
  PotentialMatrix potential = PotentialMatrix::identity(1);
  std::uint64_t seed = 42;
  OutputFormat format = OutputFormat::csv;
  Tolerances tol;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  static RunConfig from_json(const io::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      if (k != "d" && k != "V" && k != "n" && k != "K" && k != "seed" && k != "format" &&
          k != "tolerances")
        throw ConfigError("unknown config key '" + k + "'");
    }
    if (!j.contains("d") || !j.contains("V")) throw ConfigError("config requires 'd' and 'V'");
    auto get_int = [&](const char* key, long long lo, long long hi) {
      const auto& v = j[key];
      if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
      const auto x = v.get<long long>();
      if (x < lo || x > hi) throw ConfigError(std::string(key) + " is out of range");
      return x;
    };
    RunConfig c;
    const int d = static_cast<int>(get_int("d", 1, 64));
    c.potential = io::potential_from_json(j["V"], d);
    if (j.contains("n")) c.sphere.n = static_cast<int>(get_int("n", 2, 1 << 20));
    if (j.contains("K")) c.sphere.K = static_cast<int>(get_int("K", 0, 1 << 20));
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("format")) {
      if (!j["format"].is_string()) throw ConfigError("format must be a string");
      c.format = parse_format(j["format"].get<std::string>());
    }
    if (j.contains("tolerances")) {
      const auto& t = j["tolerances"];
      if (!t.is_object()) throw ConfigError("tolerances must be an object");
      for (auto it = t.begin(); it != t.end(); ++it) {
        const auto& k = it.key();
        double* slot = k == "rtol"       ? &c.tol.rtol
                       : k == "atol"     ? &c.tol.atol
                       : k == "seed_tol" ? &c.tol.seed_tol
                       : k == "quad"     ? &c.tol.quad
                                         : nullptr;
        if (!slot) throw ConfigError("unknown tolerance key '" + k + "'");
        if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
          throw ConfigError("tolerance '" + k + "' must be a positive number");
        *slot = it.value().get<double>();
      }
    }
    try {
      c.sphere.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    return c;
  }

  static RunConfig parse(std::string_view text) {
    return from_json(io::parse_json(text, "config"));
  }

  /// Normalized form: every key present, defaults filled in.
  io::json to_json() const {
    io::json j = io::potential_to_json(potential);
    j["n"] = sphere.n;
    j["K"] = sphere.K;
    j["seed"] = seed;
    j["format"] = raddich::to_string(format);
    j["tolerances"] = {{"rtol", tol.rtol}, {"atol", tol.atol}, {"seed_tol", tol.seed_tol},
                       {"quad", tol.quad}};
    return j;
  }
};

}  // namespace raddich
