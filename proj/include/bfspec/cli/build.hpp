#pragma once

#include "bfspec/bfree/system.hpp"
#include "bfspec/io/config.hpp"
#include "bfspec/quad/system.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bfspec::cli {

using io::json;

/// The system described by the [system] table: a Z^d / lattice system or a
/// κ-free quadratic system.
using AnySystem = std::variant<bfree::BFreeSystem, quad::QuadKappaSystem>;

inline bfree::Kappa parse_kappa(const json& v, const std::string& path) {
  if (v.is_string() && v.get<std::string>() == "inf") return bfree::kKappaInfinity;
  if (v.is_number_float() && std::isinf(v.get<double>()) && v.get<double>() > 0) return bfree::kKappaInfinity;
  if (!v.is_number_integer()) throw ConfigError(path + ": expected a positive integer or \"inf\"");
  auto k = v.get<std::int64_t>();
  if (k < 1 || k > 64) throw ConfigError(path + ": exponent must lie in [1, 64] or be \"inf\"");
  return static_cast<bfree::Kappa>(k);
}

inline std::int64_t parse_prime_key(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    long long p = std::stoll(key, &used);
    if (used != key.size() || p < 2 || !bfree::is_prime(exact::Integer(p))) throw std::invalid_argument("");
    return p;
  } catch (const std::exception&) {
    throw ConfigError(path + ": key '" + key + "' is not a prime");
  }
}

inline exact::RatMatrix parse_basis(const json& v, std::size_t& dim, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a list of basis vectors");
  const std::size_t d = v.size();
  if (dim != 0 && d != dim) throw ConfigError(path + ": expected " + std::to_string(dim) + " basis vectors");
  dim = d;
  exact::RatMatrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const json& col = v[j];
    if (!col.is_array() || col.size() != d)
      throw ConfigError(path + "[" + std::to_string(j) + "]: expected a vector of length " + std::to_string(d));
    for (std::size_t i = 0; i < d; ++i) m(i, j) = io::parse_rational(col[i], path + "[" + std::to_string(j) + "][" + std::to_string(i) + "]");
  }
  if (exact::determinant(m) == 0) throw ConfigError(path + ": basis vectors are linearly dependent");
  return m;
}

inline AnySystem build_system(const json& cfg) {
  const std::string family = io::get_string(cfg, "system.family");
  const auto bound = io::get_int(cfg, "system.prime_bound", 100);
  if (bound < 0 || bound > static_cast<std::int64_t>(bfree::PrimeTable::kLimit))
    throw ConfigError("system.prime_bound: must lie in [0, 1000000]");
  const auto pb = static_cast<std::uint64_t>(bound);
  const json* table = io::find_path(cfg, "system.kappa_table");
  if (table && !table->is_object()) throw ConfigError("system.kappa_table: expected a table");

  if (family == "visible") {
    auto d = io::get_int(cfg, "system.d", 2);
    if (d < 2 || d > 8) throw ConfigError("system.d: visible points need 2 <= d <= 8");
    if (table) throw ConfigError("system.kappa_table: not used by visible points");
    return bfree::BFreeSystem::visible(static_cast<std::size_t>(d), pb);
  }
  if (family == "kappa-free") {
    bfree::Kappa def = io::has(cfg, "system.kappa") ? parse_kappa(io::require(cfg, "system.kappa"), "system.kappa") : 2;
    std::map<std::uint64_t, bfree::Kappa> over;
    if (table)
      for (auto& [key, val] : table->items()) {
        std::string path = "system.kappa_table." + key;
        over[static_cast<std::uint64_t>(parse_prime_key(key, path))] = parse_kappa(val, path);
      }
    return bfree::BFreeSystem::kappa_free_integers(bfree::PrimeKappa(def, over), pb);
  }
  if (family == "kappa-free-quadratic") {
    quad::QuadField f(io::get_int(cfg, "system.d"));
    bfree::Kappa def = io::has(cfg, "system.kappa") ? parse_kappa(io::require(cfg, "system.kappa"), "system.kappa") : 2;
    std::map<std::int64_t, bfree::Kappa> by_prime;
    std::map<quad::PrimeHandle, bfree::Kappa> by_handle;
    if (table)
      for (auto& [key, val] : table->items()) {
        std::string path = "system.kappa_table." + key;
        if (key.find(':') != std::string::npos) {
          try {
            by_handle[quad::parse_handle(key)] = parse_kappa(val, path);
          } catch (const ConfigError& e) {
            throw ConfigError(path + ": " + e.what());
          }
        } else {
          by_prime[parse_prime_key(key, path)] = parse_kappa(val, path);
        }
      }
    quad::IdealKappa kappa;
    try {
      kappa = quad::make_ideal_kappa(f, def, by_prime, by_handle);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("system.kappa_table: ") + e.what());
    }
    return quad::QuadKappaSystem(f, kappa, pb);
  }
  if (family == "custom") {
    std::size_t dim = 0;
    exact::RatMatrix g = parse_basis(io::require(cfg, "system.gamma"), dim, "system.gamma");
    const json& removed = io::require(cfg, "system.removed");
    if (!removed.is_array() || removed.empty()) throw ConfigError("system.removed: expected a non-empty list of bases");
    std::vector<exact::Lattice> ls;
    for (std::size_t i = 0; i < removed.size(); ++i)
      ls.push_back(exact::Lattice::from_basis(parse_basis(removed[i], dim, "system.removed[" + std::to_string(i) + "]")));
    double tail = io::get_double(cfg, "system.tail", 0.0);
    return bfree::BFreeSystem::custom(exact::Lattice::from_basis(g), std::move(ls), tail);
  }
  throw ConfigError("system.family: unknown family '" + family +
                        "' (visible, kappa-free, custom, kappa-free-quadratic)");
}

inline std::string system_name(const AnySystem& s) {
  return std::visit([](const auto& x) { return x.name(); }, s);
}

/// A scalar or a list of numbers.
inline std::vector<double> number_list(const json& cfg, const std::string& path, std::vector<double> fallback) {
  const json* v = io::find_path(cfg, path);
  if (!v) return fallback;
  std::vector<double> out;
  if (v->is_number()) return {v->get<double>()};
  if (!v->is_array()) throw ConfigError(path + ": expected a number or a list of numbers");
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

/// A frequency given as rationals (ints / "p/q" strings) or reals; `exact`
/// holds the rational form when every entry is exact.
struct Frequency {
  std::vector<std::string> text;
  std::vector<double> real;
  std::optional<exact::RationalVector> exact;
};

inline std::vector<Frequency> frequency_list(const json& cfg, const std::string& path, std::size_t dim) {
  const json* v = io::find_path(cfg, path);
  if (!v) return {};
  if (!v->is_array()) throw ConfigError(path + ": expected a list of vectors");
  std::vector<Frequency> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    const json& row = (*v)[i];
    if (!row.is_array() || row.size() != dim) throw ConfigError(p + ": expected a vector of length " + std::to_string(dim));
    Frequency f;
    exact::RationalVector q;
    bool all_exact = true;
    for (std::size_t j = 0; j < dim; ++j) {
      const json& c = row[j];
      if (c.is_number_float()) {
        all_exact = false;
        f.real.push_back(c.get<double>());
        f.text.push_back(c.dump());
      } else {
        exact::Rational r = io::parse_rational(c, p + "[" + std::to_string(j) + "]");
        q.push_back(r);
        f.real.push_back(exact::to_double(r));
        f.text.push_back(exact::to_string(r));
      }
    }
    if (all_exact) f.exact = q;
    out.push_back(std::move(f));
  }
  return out;
}

inline std::vector<std::uint64_t> primes_up_to(std::int64_t bound) {
  std::vector<std::uint64_t> out;
  if (bound < 2) return out;
  for (auto p : bfree::PrimeTable::instance().primes_up_to(static_cast<std::uint64_t>(bound))) out.push_back(p);
  return out;
}

}  // namespace bfspec::cli
