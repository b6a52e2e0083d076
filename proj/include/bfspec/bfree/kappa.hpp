#pragma once

#include "bfspec/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>

namespace bfspec::bfree {

/// Exponent kappa in N ∪ {∞}.
using Kappa = std::uint32_t;
inline constexpr Kappa kKappaInfinity = std::numeric_limits<Kappa>::max();

inline std::string kappa_to_string(Kappa k) { return k == kKappaInfinity ? "inf" : std::to_string(k); }

/// Exponents per prime label, with a default for every label not listed.
/// Label is a rational prime or a prime-ideal handle.
template <class Label>
class KappaAssignment {
 public:
  KappaAssignment() = default;
  explicit KappaAssignment(Kappa default_kappa, std::map<Label, Kappa> overrides = {})
      : default_(default_kappa), overrides_(std::move(overrides)) {
    validate();
  }

  static KappaAssignment uniform(Kappa k) { return KappaAssignment(k); }

  Kappa at(const Label& label) const {
    auto it = overrides_.find(label);
    return it == overrides_.end() ? default_ : it->second;
  }

  Kappa default_kappa() const { return default_; }
  const std::map<Label, Kappa>& overrides() const { return overrides_; }

  bool is_uniform() const {
    for (const auto& [label, k] : overrides_)
      if (k != default_) return false;
    return true;
  }

  /// Smallest finite exponent in use, or kKappaInfinity.
  Kappa min_kappa() const {
    Kappa m = default_;
    for (const auto& [label, k] : overrides_) m = std::min(m, k);
    return m;
  }

 private:
  // kappa = 1 is only summable for finitely many labels, so the default must
  // be at least 2 (or infinite); overrides are finite in number.
  void validate() const {
    if (default_ == 0) throw ConfigError("kappa default must be >= 1");
    if (default_ == 1) throw ConfigError("kappa default 1 violates the summability condition; use >= 2 or inf");
    for (const auto& [label, k] : overrides_)
      if (k == 0) throw ConfigError("kappa override must be >= 1");
  }

  Kappa default_ = 2;
  std::map<Label, Kappa> overrides_;
};

}  // namespace bfspec::bfree
