#pragma once

#include "bfspec/io/config.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace bfspec::io {

/// One empirical-vs-closed-form comparison.
struct FbRow {
  std::string system;
  double r = 0;
  std::vector<std::string> k;
  double empirical_re = 0;
  double empirical_im = 0;
  double closed_form = 0;
  double tolerance = 0;
  bool pass = false;
};

inline json to_json(const FbRow& row) {
  return {{"system", row.system},         {"r", row.r},
          {"k", row.k},                   {"empirical_re", row.empirical_re},
          {"empirical_im", row.empirical_im}, {"closed_form", row.closed_form},
          {"tolerance", row.tolerance},   {"pass", row.pass}};
}

/// JSON numbers cannot hold inf/nan; those become strings.
inline json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

/// Adds the resolved config, its hash and the seed to a report.
inline json with_provenance(json report, const json& cfg, std::uint64_t seed) {
  report["config"] = cfg;
  report["config_hash"] = config_hash(cfg);
  report["seed"] = seed;
  return report;
}

}  // namespace bfspec::io
