#pragma once

#include "bfspec/bfree/crt.hpp"
#include "bfspec/cli/build.hpp"
#include "bfspec/cli/field_info.hpp"
#include "bfspec/empirical/calibration.hpp"
#include "bfspec/empirical/equidist.hpp"
#include "bfspec/empirical/fourier.hpp"
#include "bfspec/empirical/sieve.hpp"
#include "bfspec/empirical/thinning.hpp"
#include "bfspec/io/points.hpp"
#include "bfspec/io/report.hpp"
#include "bfspec/spectra/quad_spectrum.hpp"
#include "bfspec/spectra/spectrum.hpp"
#include "bfspec/spectra/star.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace bfspec::cli {

enum ExitCode { kPass = 0, kVerificationFailed = 1, kConfigError = 2, kBudgetExceeded = 3 };

namespace detail {

inline std::uint64_t seed_of(const json& cfg) {
  auto s = io::get_int(cfg, "thin.seed", 0);
  if (s < 0) throw ConfigError("thin.seed: must be non-negative");
  return static_cast<std::uint64_t>(s);
}

inline empirical::SieveOptions sieve_options(const json& cfg, std::size_t dim) {
  empirical::SieveOptions opt;
  std::string region = io::get_string(cfg, "sieve.region", "ball");
  if (region == "ball")
    opt.region = empirical::Region::ball;
  else if (region == "cube")
    opt.region = empirical::Region::cube;
  else
    throw ConfigError("sieve.region: expected \"ball\" or \"cube\"");
  if (const json* s = io::find_path(cfg, "sieve.shift")) {
    if (!s->is_array() || s->size() != dim) throw ConfigError("sieve.shift: expected " + std::to_string(dim) + " integers");
    for (std::size_t j = 0; j < dim; ++j) {
      if (!(*s)[j].is_number_integer()) throw ConfigError("sieve.shift[" + std::to_string(j) + "]: expected an integer");
      opt.shift.push_back((*s)[j].get<std::int64_t>());
    }
  }
  return opt;
}

inline std::size_t dim_of(const AnySystem& sys) {
  return std::holds_alternative<bfree::BFreeSystem>(sys) ? std::get<bfree::BFreeSystem>(sys).dim() : 2;
}

inline empirical::SievedSet sieve_any(const AnySystem& sys, double r, const empirical::SieveOptions& opt) {
  return std::visit([&](const auto& s) { return empirical::sieve_ball(s, r, opt); }, sys);
}

// Commands that work on one point set take the largest listed radius.
inline double single_radius(const json& cfg, const std::string& path, double fallback) {
  auto rs = number_list(cfg, path, {fallback});
  if (rs.empty()) throw ConfigError(path + ": empty list");
  return *std::max_element(rs.begin(), rs.end());
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline std::string output_path(const json& cfg) { return io::get_string(cfg, "output.path", ""); }

inline std::string output_format(const json& cfg, const std::string& path) {
  std::string fmt = io::get_string(cfg, "output.format", "");
  if (fmt.empty()) {
    auto ends = [&](const std::string& suf) { return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0; };
    fmt = ends(".bin") ? "binary" : (ends(".json") ? "json" : "csv");
  }
  if (fmt != "csv" && fmt != "binary" && fmt != "json") throw ConfigError("output.format: expected csv, binary or json");
  return fmt;
}

inline std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw ConfigError("output.path: cannot write '" + path + "'");
  return f;
}

/// Points to output.path (CSV or binary with a JSON sidecar); returns the file list.
inline std::vector<std::string> write_points(const json& cfg, const empirical::SievedSet& s, const json& summary) {
  const std::string path = output_path(cfg);
  if (path.empty()) return {};
  const std::string fmt = output_format(cfg, path);
  if (fmt == "binary") {
    auto f = open_output(path, true);
    io::write_points_binary(f, s);
    auto side = open_output(path + ".json");
    side << summary.dump(2) << '\n';
    return {path, path + ".json"};
  }
  if (fmt == "json") throw ConfigError("output.format: point sets are written as csv or binary");
  auto f = open_output(path);
  io::write_points_csv(f, s, io::provenance_line(summary["config_hash"], summary["seed"], "system=" + s.system));
  return {path};
}

inline void emit_json(std::ostream& out, const json& cfg, const json& report) {
  const std::string path = output_path(cfg);
  if (!path.empty() && output_format(cfg, path) == "json") {
    auto f = open_output(path);
    f << report.dump(2) << '\n';
  }
  out << report.dump(2) << '\n';
}

// Lattice coordinates as positions: for quadratic systems ⟨k, u + vω⟩ =
// u <k,1> + v <k,ω>, so an exact frequency acts on the integral coordinates.
inline empirical::SievedSet coordinate_view(const empirical::SievedSet& s) {
  empirical::SievedSet c = s;
  for (std::size_t i = 0; i < c.coords.size(); ++i) c.points[i] = static_cast<double>(c.coords[i]);
  return c;
}

struct FbEval {
  std::complex<double> empirical;
  double closed = 0;
  bool exact_closed = false;  // closed form decided exactly (rational k)
};

inline FbEval evaluate_fb(const AnySystem& sys, const empirical::SievedSet& s, const Frequency& k,
                          const std::optional<spectra::SpectrumContext>& bctx,
                          const std::optional<spectra::QuadSpectrumContext>& qctx) {
  FbEval e;
  if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys)) {
    if (k.exact) {
      e.empirical = empirical::empirical_fb(s, *k.exact);
      e.closed = static_cast<double>(bctx->coefficient(*k.exact).value.mid());
      e.exact_closed = true;
    } else {
      e.empirical = empirical::empirical_fb(s, k.real);
    }
    (void)b;
    return e;
  }
  const auto& q = std::get<quad::QuadKappaSystem>(sys);
  if (k.exact) {
    quad::QuadElem kk(q.field(), (*k.exact)[0], (*k.exact)[1]);
    const quad::QuadElem one(q.field(), 1), w = quad::QuadElem::omega(q.field());
    exact::RationalVector bt{quad::bilinear(one, kk), quad::bilinear(w, kk)};
    e.empirical = empirical::empirical_fb(coordinate_view(s), bt);
    e.closed = static_cast<double>(qctx->coefficient(kk).value.mid());
    e.exact_closed = true;
  } else {
    e.empirical = empirical::empirical_fb(s, k.real);
  }
  return e;
}

inline json density_json(const bfree::Interval& iv) { return json{{"lo", static_cast<double>(iv.lo)}, {"hi", static_cast<double>(iv.hi)}}; }

inline bfree::Interval closed_density(const AnySystem& sys, const json& cfg) {
  if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys)) return bfree::density_limit(*b);
  auto nb = io::get_int(cfg, "density.norm_bound", 1'000'000);
  if (nb < 2) throw ConfigError("density.norm_bound: must be >= 2");
  return quad::quad_density_limit(std::get<quad::QuadKappaSystem>(sys), static_cast<std::uint64_t>(nb));
}

}  // namespace detail

// ---------------------------------------------------------------- sieve

inline int cmd_sieve(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  const double r = detail::single_radius(cfg, "sieve.r", 100);
  auto s = detail::sieve_any(sys, r, detail::sieve_options(cfg, detail::dim_of(sys)));
  json summary = io::with_provenance({{"system", s.system},
                                      {"r", r},
                                      {"region", s.region == empirical::Region::ball ? "ball" : "cube"},
                                      {"count", s.size()},
                                      {"volume", s.volume},
                                      {"density", empirical::empirical_density(s)}},
                                     cfg, detail::seed_of(cfg));
  auto files = detail::write_points(cfg, s, summary);
  if (files.empty()) {
    io::write_points_csv(out, s,
                         io::provenance_line(summary["config_hash"], summary["seed"],
                                             "system=" + s.system + " r=" + detail::format_double(r) + " count=" +
                                                 std::to_string(s.size()) + " density=" +
                                                 detail::format_double(empirical::empirical_density(s))));
  } else {
    summary["files"] = files;
    out << summary.dump(2) << '\n';
  }
  return kPass;
}

// ---------------------------------------------------------------- density

inline int cmd_density(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  auto radii = number_list(cfg, "sieve.r", {100});
  auto opt = detail::sieve_options(cfg, detail::dim_of(sys));
  bfree::Interval closed = detail::closed_density(sys, cfg);
  const bool check = io::has(cfg, "density.tolerance");
  const double tol = io::get_double(cfg, "density.tolerance", 0.01);
  json rows = json::array();
  bool all = true;
  for (double r : radii) {
    auto s = detail::sieve_any(sys, r, opt);
    double emp = empirical::empirical_density(s);
    double err = static_cast<double>(closed.distance(emp));
    bool pass = err <= tol;
    all = all && pass;
    rows.push_back({{"r", r}, {"count", s.size()}, {"volume", s.volume}, {"empirical", emp}, {"distance", err}, {"pass", pass}});
  }
  json rep = io::with_provenance({{"system", system_name(sys)}, {"closed_form", detail::density_json(closed)},
                                  {"tolerance", tol}, {"rows", rows}, {"pass", all}},
                                 cfg, detail::seed_of(cfg));
  detail::emit_json(out, cfg, rep);
  return check && !all ? kVerificationFailed : kPass;
}

// ---------------------------------------------------------------- spectrum

inline std::vector<std::uint64_t> spectrum_primes(const json& cfg) {
  const json* v = io::find_path(cfg, "spectrum.primes");
  if (!v) return primes_up_to(5);
  if (v->is_number_integer()) return primes_up_to(v->get<std::int64_t>());
  if (!v->is_array()) throw ConfigError("spectrum.primes: expected a bound or a list of primes");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number_integer()) throw ConfigError("spectrum.primes[" + std::to_string(i) + "]: expected a prime");
    out.push_back(static_cast<std::uint64_t>(parse_prime_key(std::to_string((*v)[i].get<std::int64_t>()), "spectrum.primes")));
  }
  return out;
}

inline int cmd_spectrum(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  const std::string mode = io::get_string(cfg, "spectrum.mode", "torus");
  if (mode != "torus" && mode != "ball") throw ConfigError("spectrum.mode: expected \"torus\" or \"ball\"");
  const json summary = io::with_provenance(json::object(), cfg, detail::seed_of(cfg));
  std::ostringstream body;
  body << std::setprecision(17);
  std::size_t rows = 0;
  std::string extra;

  if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys)) {
    spectra::SpectrumContext ctx(*b);
    std::vector<std::size_t> positions;
    if (b->is_arithmetic()) {
      positions = spectra::positions_for_primes(*b, spectrum_primes(cfg));
    } else {
      for (std::size_t i = 0; i < b->truncation(); ++i) positions.push_back(i);
    }
    spectra::SpectrumListing listing =
        mode == "torus" ? spectra::enumerate_spectrum_torus(ctx, positions)
                        : spectra::enumerate_spectrum_ball(ctx, positions, io::parse_rational(io::require(cfg, "spectrum.radius"), "spectrum.radius"));
    const std::size_t d = b->dim();
    for (std::size_t j = 0; j < d; ++j) body << 'k' << j << ',';
    body << "den,support,factor,coeff_lo,coeff_hi,intensity_lo,intensity_hi\n";
    for (const auto& p : listing.points) {
      for (const auto& c : p.k) body << exact::to_string(c) << ',';
      auto in = p.coeff.intensity();
      body << p.den << ',' << spectra::support_string(*b, p.coeff.support) << ',' << exact::to_string(p.coeff.factor) << ','
           << static_cast<double>(p.coeff.value.lo) << ',' << static_cast<double>(p.coeff.value.hi) << ','
           << static_cast<double>(in.lo) << ',' << static_cast<double>(in.hi) << '\n';
      ++rows;
    }
    extra = " beyond_truncation=" + std::string(listing.beyond_truncation ? "true" : "false");
  } else {
    if (mode != "torus") throw ConfigError("spectrum.mode: quadratic systems support the torus listing only");
    const auto& q = std::get<quad::QuadKappaSystem>(sys);
    spectra::QuadSpectrumContext ctx(q, static_cast<std::uint64_t>(io::get_int(cfg, "density.norm_bound", 1'000'000)));
    auto listing = spectra::enumerate_quad_spectrum_torus(ctx, spectra::quad_positions_for_primes(q, spectrum_primes(cfg)));
    body << "m_a,m_b,k_a,k_b,den_norm,support,bt0,bt1,emb0,emb1,factor,coeff_lo,coeff_hi,intensity_lo,intensity_hi\n";
    for (const auto& p : listing.points) {
      std::string support;
      for (auto i : p.coeff.support) support += (support.empty() ? "" : " ") + q.removed()[i].prime.handle.str();
      auto in = p.coeff.intensity();
      body << exact::to_string(p.core.a) << ',' << exact::to_string(p.core.b) << ',' << exact::to_string(p.k.a) << ','
           << exact::to_string(p.k.b) << ',' << p.den_norm << ',' << support << ',' << exact::to_string(p.bt[0]) << ','
           << exact::to_string(p.bt[1]) << ',' << static_cast<double>(p.embedded[0]) << ',' << static_cast<double>(p.embedded[1])
           << ',' << exact::to_string(p.coeff.factor) << ',' << static_cast<double>(p.coeff.value.lo) << ','
           << static_cast<double>(p.coeff.value.hi) << ',' << static_cast<double>(in.lo) << ',' << static_cast<double>(in.hi)
           << '\n';
      ++rows;
    }
  }
  std::string head = io::provenance_line(summary["config_hash"], summary["seed"],
                                         "system=" + system_name(sys) + " mode=" + mode + " rows=" + std::to_string(rows) + extra);
  const std::string path = detail::output_path(cfg);
  if (!path.empty()) {
    auto f = detail::open_output(path);
    f << head << '\n' << body.str();
    out << json{{"system", system_name(sys)}, {"rows", rows}, {"files", {path}}, {"config_hash", summary["config_hash"]}}.dump(2)
        << '\n';
  } else {
    out << head << '\n' << body.str();
  }
  return kPass;
}

// ---------------------------------------------------------------- fb

inline std::vector<Frequency> fb_frequencies(const json& cfg, std::size_t dim) {
  auto ks = frequency_list(cfg, "fb.k", dim);
  if (ks.empty()) throw ConfigError("fb.k: missing (list of frequency vectors)");
  return ks;
}

inline int cmd_fb(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  const std::size_t d = detail::dim_of(sys);
  auto ks = fb_frequencies(cfg, d);
  auto radii = number_list(cfg, "sieve.r", {500});
  auto opt = detail::sieve_options(cfg, d);
  std::optional<spectra::SpectrumContext> bctx;
  std::optional<spectra::QuadSpectrumContext> qctx;
  if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys))
    bctx.emplace(*b);
  else
    qctx.emplace(std::get<quad::QuadKappaSystem>(sys), static_cast<std::uint64_t>(io::get_int(cfg, "density.norm_bound", 1'000'000)));

  // Tolerance: a number, or "calibrated" (periodic-approximant oracle) for Z^d systems.
  const json* tj = io::find_path(cfg, "fb.tolerance");
  const bool arithmetic = bctx && bctx->system().is_arithmetic();
  bool calibrated = arithmetic && (!tj || (tj->is_string() && tj->get<std::string>() == "calibrated"));
  double fixed = 0.02;
  if (tj && tj->is_number()) {
    fixed = tj->get<double>();
    calibrated = false;
  } else if (tj && !(tj->is_string() && tj->get<std::string>() == "calibrated")) {
    throw ConfigError("fb.tolerance: expected a number or \"calibrated\"");
  }

  json rows = json::array();
  bool all = true;
  for (double r : radii) {
    auto s = detail::sieve_any(sys, r, opt);
    std::vector<double> tol(ks.size(), fixed);
    if (calibrated) {
      std::vector<exact::RationalVector> exact_ks;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i].exact) {
          exact_ks.push_back(*ks[i].exact);
          idx.push_back(i);
        }
      if (!exact_ks.empty()) {
        auto cal = empirical::calibrate_fb(bctx->system(), r, exact_ks);
        for (std::size_t j = 0; j < idx.size(); ++j) tol[idx[j]] = cal.tolerance[j];
      }
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      auto e = detail::evaluate_fb(sys, s, ks[i], bctx, qctx);
      io::FbRow row{s.system, r, ks[i].text, e.empirical.real(), e.empirical.imag(), e.closed, tol[i], false};
      row.pass = std::abs(e.empirical - std::complex<double>(e.closed, 0)) <= tol[i];
      all = all && row.pass;
      json j = io::to_json(row);
      j["closed_form_exact"] = e.exact_closed;
      rows.push_back(j);
    }
  }
  json rep = io::with_provenance({{"system", system_name(sys)}, {"rows", rows}, {"pass", all}}, cfg, detail::seed_of(cfg));
  detail::emit_json(out, cfg, rep);
  return all ? kPass : kVerificationFailed;
}

// ---------------------------------------------------------------- thin

struct ThinOutcome {
  json report;
  bool pass = true;
};

inline ThinOutcome run_thinning(const AnySystem& sys, const empirical::SievedSet& parent, double p, std::uint64_t seed,
                                const std::vector<Frequency>& ks, double fb_tol,
                                const std::optional<spectra::SpectrumContext>& bctx,
                                const std::optional<spectra::QuadSpectrumContext>& qctx, empirical::SievedSet* kept_out = nullptr) {
  auto mask = empirical::bernoulli_thin(parent, p, seed);
  auto thin = empirical::apply_mask(parent, mask);
  const double n = static_cast<double>(parent.size());
  const double sigma = n > 0 ? std::sqrt(p * (1 - p) / n) : 0;
  const double ratio = n > 0 ? static_cast<double>(thin.size()) / n : 0;
  ThinOutcome o;
  const bool density_ok = std::fabs(ratio - p) <= 4 * sigma;
  o.pass = density_ok;
  json fb = json::array();
  for (const auto& k : ks) {
    auto a = detail::evaluate_fb(sys, parent, k, bctx, qctx).empirical;
    auto b = detail::evaluate_fb(sys, thin, k, bctx, qctx).empirical;
    double diff = std::abs(b - p * a);
    bool ok = diff <= fb_tol;
    o.pass = o.pass && ok;
    fb.push_back({{"k", k.text}, {"parent_re", a.real()}, {"parent_im", a.imag()}, {"thinned_re", b.real()},
                  {"thinned_im", b.imag()}, {"deviation", diff}, {"tolerance", fb_tol}, {"pass", ok}});
  }
  o.report = {{"p", p},
              {"seed", seed},
              {"generator", "mt19937_64, keep iff (draw >> 11) * 2^-53 < p"},
              {"parent_count", parent.size()},
              {"kept", thin.size()},
              {"parent_density", empirical::empirical_density(parent)},
              {"thinned_density", empirical::empirical_density(thin)},
              {"ratio", ratio},
              {"ci_lo", p - 4 * sigma},
              {"ci_hi", p + 4 * sigma},
              {"density_pass", density_ok},
              {"fb", fb},
              {"pass", o.pass}};
  if (kept_out) *kept_out = std::move(thin);
  return o;
}

inline int cmd_thin(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  const std::size_t d = detail::dim_of(sys);
  const double r = detail::single_radius(cfg, "sieve.r", 500);
  const double p = io::get_double(cfg, "thin.p", 0.5);
  const std::uint64_t seed = detail::seed_of(cfg);
  auto parent = detail::sieve_any(sys, r, detail::sieve_options(cfg, d));
  auto ks = frequency_list(cfg, "fb.k", d);
  std::optional<spectra::SpectrumContext> bctx;
  std::optional<spectra::QuadSpectrumContext> qctx;
  if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys))
    bctx.emplace(*b);
  else
    qctx.emplace(std::get<quad::QuadKappaSystem>(sys), 1000);
  empirical::SievedSet kept;
  auto o = run_thinning(sys, parent, p, seed, ks, io::get_double(cfg, "thin.fb_tolerance", 0.03), bctx, qctx, &kept);
  json rep = io::with_provenance(o.report, cfg, seed);
  rep["system"] = parent.system;
  rep["r"] = r;
  auto files = detail::write_points(cfg, kept, rep);
  if (!files.empty()) rep["files"] = files;
  out << rep.dump(2) << '\n';
  return o.pass ? kPass : kVerificationFailed;
}

// ---------------------------------------------------------------- equidist

inline std::vector<empirical::ResidueGroup> equidist_groups(const AnySystem& sys, const json& cfg) {
  auto bound = io::get_int(cfg, "equidist.primes", 5);
  if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys)) {
    if (!b->is_arithmetic()) throw DomainError("equidistribution needs visible points or kappa-free integers");
    std::size_t n = 0;
    while (n < b->truncation() && static_cast<std::int64_t>(b->labels()[n]) <= bound) ++n;
    for (std::size_t i = n; i < b->truncation(); ++i)
      if (static_cast<std::int64_t>(b->labels()[i]) <= bound)
        throw ConfigError("equidist.primes: lattice order is not by prime; list fewer primes");
    if (bound > static_cast<std::int64_t>(b->prime_bound())) throw DomainError("truncation exceeded: equidist.primes exceeds system.prime_bound");
    return empirical::residue_groups(*b, n);
  }
  const auto& q = std::get<quad::QuadKappaSystem>(sys);
  return empirical::residue_groups(q, spectra::quad_positions_for_primes(q, primes_up_to(bound)));
}

inline std::vector<empirical::Cylinder> equidist_cylinders(const AnySystem& sys, const json& cfg,
                                                          const std::vector<empirical::ResidueGroup>& groups,
                                                          std::vector<bool>& is_pair) {
  std::vector<empirical::Cylinder> out;
  const json* v = io::find_path(cfg, "equidist.cylinders");
  if (!v || v->is_string()) {
    std::string preset = v ? v->get<std::string>() : "both";
    if (preset != "single" && preset != "pairs" && preset != "both")
      throw ConfigError("equidist.cylinders: expected single, pairs, both or a list of cylinders");
    if (preset != "pairs")
      for (auto& c : empirical::single_class_cylinders(groups)) {
        out.push_back(std::move(c));
        is_pair.push_back(false);
      }
    if (preset != "single")
      for (auto& c : empirical::pair_class_cylinders(groups)) {
        out.push_back(std::move(c));
        is_pair.push_back(true);
      }
    return out;
  }
  if (!v->is_array()) throw ConfigError("equidist.cylinders: expected a preset name or a list");
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::string path = "equidist.cylinders[" + std::to_string(i) + "]";
    const json& c = (*v)[i];
    empirical::Cylinder cyl;
    cyl.label = c.value("label", "cylinder" + std::to_string(i));
    const json cons = c.value("constraints", json::array());
    for (std::size_t j = 0; j < cons.size(); ++j) {
      const std::string cp = path + ".constraints[" + std::to_string(j) + "]";
      const json& k = cons[j];
      empirical::CylinderConstraint con;
      if (k.contains("position")) {
        con.position = k["position"].get<std::size_t>();
      } else if (k.contains("prime")) {
        auto p = static_cast<std::uint64_t>(k["prime"].get<std::int64_t>());
        if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys)) {
          auto pos = b->position_of_prime(p);
          if (!pos) throw DomainError(cp + ": prime " + std::to_string(p) + " is beyond the truncation");
          con.position = *pos;
        } else {
          throw ConfigError(cp + ": quadratic cylinders name a handle or a position");
        }
      } else if (k.contains("handle")) {
        const auto& q = std::get<quad::QuadKappaSystem>(sys);
        auto h = quad::parse_handle(k["handle"].get<std::string>());
        bool found = false;
        for (std::size_t t = 0; t < q.removed().size(); ++t)
          if (q.removed()[t].prime.handle == h) {
            con.position = t;
            found = true;
          }
        if (!found) throw DomainError(cp + ": prime ideal " + h.str() + " is beyond the truncation");
      } else {
        throw ConfigError(cp + ": needs prime, handle or position");
      }
      for (const auto& r : k.value("residues", json::array())) con.residues.push_back(r.get<std::vector<std::int64_t>>());
      cyl.constraints.push_back(std::move(con));
    }
    is_pair.push_back(cyl.constraints.size() > 1);
    out.push_back(std::move(cyl));
  }
  return out;
}

struct EquidistOutcome {
  json rows = json::array();
  bool pass = true;
};

inline EquidistOutcome run_equidist(const empirical::SievedSet& s, const std::vector<empirical::ResidueGroup>& groups,
                                    const std::vector<empirical::Cylinder>& cyls, const std::vector<bool>& is_pair, double tol1,
                                    double tol2) {
  EquidistOutcome o;
  auto rows = empirical::equidist_check(s, groups, cyls);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double tol = is_pair[i] ? tol2 : tol1;
    bool ok = std::fabs(rows[i].observed - rows[i].expected) <= tol;
    o.pass = o.pass && ok;
    o.rows.push_back({{"label", rows[i].label}, {"hits", rows[i].hits}, {"n", rows[i].total}, {"observed", rows[i].observed},
                      {"expected", rows[i].expected}, {"tolerance", tol}, {"pass", ok}});
  }
  return o;
}

inline int cmd_equidist(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  const double r = detail::single_radius(cfg, "sieve.r", 500);
  auto s = detail::sieve_any(sys, r, detail::sieve_options(cfg, detail::dim_of(sys)));
  auto groups = equidist_groups(sys, cfg);
  std::vector<bool> is_pair;
  auto cyls = equidist_cylinders(sys, cfg, groups, is_pair);
  const double t1 = io::get_double(cfg, "equidist.tolerance_single", 0.01);
  const double t2 = io::get_double(cfg, "equidist.tolerance_pair", 0.02);
  auto base = run_equidist(s, groups, cyls, is_pair, t1, t2);
  json rep = {{"system", s.system}, {"r", r}, {"count", s.size()}, {"rows", base.rows}};
  bool pass = base.pass;
  if (io::has(cfg, "thin.p")) {
    const double p = io::get_double(cfg, "thin.p");
    auto thin = empirical::apply_mask(s, empirical::bernoulli_thin(s, p, detail::seed_of(cfg)));
    const double widen = io::get_double(cfg, "equidist.thinned_factor", 1.5);
    auto t = run_equidist(thin, groups, cyls, is_pair, t1 * widen, t2 * widen);
    rep["thinned"] = {{"p", p}, {"count", thin.size()}, {"rows", t.rows}, {"pass", t.pass}};
    pass = pass && t.pass;
  }
  rep["pass"] = pass;
  detail::emit_json(out, cfg, io::with_provenance(rep, cfg, detail::seed_of(cfg)));
  return pass ? kPass : kVerificationFailed;
}

// ---------------------------------------------------------------- holes

inline int cmd_holes(const json& cfg, std::ostream& out) {
  auto d = io::get_int(cfg, "holes.d", 2);
  auto m = io::get_int(cfg, "holes.m", 2);
  if (d < 2 || d > 8) throw ConfigError("holes.d: expected 2 <= d <= 8");
  if (m < 1 || m > 64) throw ConfigError("holes.m: expected 1 <= m <= 64");
  auto t = bfree::crt_hole(static_cast<std::size_t>(d), static_cast<std::size_t>(m));
  bool ok = bfree::verify_hole(t, static_cast<std::size_t>(m));
  std::vector<std::string> ts;
  for (const auto& c : t) ts.push_back(exact::to_string(c));
  json rep = io::with_provenance({{"d", d}, {"m", m}, {"t", ts}, {"verified", ok}, {"pass", ok}}, cfg, detail::seed_of(cfg));
  detail::emit_json(out, cfg, rep);
  return ok ? kPass : kVerificationFailed;
}

// ---------------------------------------------------------------- field-info

inline int cmd_field_info(const json& cfg, std::ostream& out) {
  std::int64_t d = io::has(cfg, "field.d") ? io::get_int(cfg, "field.d") : io::get_int(cfg, "system.d");
  quad::QuadField f(d);
  write_field_info(out, f, io::get_int(cfg, "field.prime_limit", 30));
  return kPass;
}

// ---------------------------------------------------------------- verify

/// Annihilator suite: random spectrum points of a truncated system, each
/// checked on a sample of lattice points; `corrupt` perturbs every image.
inline json annihilator_suite(const bfree::BFreeSystem& sys, std::size_t points, std::size_t samples, std::uint64_t seed,
                              bool corrupt) {
  std::mt19937_64 rng(seed);
  std::size_t passed = 0;
  const std::size_t d = sys.dim();
  for (std::size_t n = 0; n < points; ++n) {
    // u = c / q with q a product of admissible prime powers.
    exact::Integer q = 1;
    for (std::size_t i = 0; i < sys.truncation(); ++i) {
      auto kap = sys.exponents()[i];
      unsigned e = static_cast<unsigned>(rng() % (std::min<bfree::Kappa>(kap, 2) + 1));
      q *= bfree::ipow(exact::Integer(sys.labels()[i]), e);
    }
    exact::RationalVector u(d);
    for (auto& c : u) c = exact::Rational(exact::Integer(static_cast<long long>(rng() % 1000000)), q);
    auto img = spectra::dual_star_map(u, sys);
    if (corrupt) img.components[0][0] = exact::mod(img.components[0][0] + 1, img.moduli[0]);
    std::vector<exact::IntegerVector> xs;
    for (std::size_t s = 0; s < samples; ++s) {
      exact::IntegerVector x(d);
      for (auto& c : x) c = exact::Integer(static_cast<long long>(rng() % 2'000'001) - 1'000'000);
      xs.push_back(std::move(x));
    }
    passed += spectra::verify_annihilator(u, img, xs);
  }
  return {{"points", points}, {"samples", samples}, {"corrupted", corrupt}, {"passed", passed}, {"pass", passed == points}};
}

inline json quotient_suite(const quad::QuadField& f, std::uint32_t prime_limit, unsigned kappa_max) {
  std::size_t checked = 0, bad = 0;
  for (std::uint32_t p : bfree::PrimeTable::instance().primes_up_to(prime_limit)) {
    auto s = quad::split_type(p, f);
    for (unsigned k = 1; k <= kappa_max; ++k) {
      exact::Integer pk = bfree::ipow(exact::Integer(p), k);
      std::vector<exact::Integer> expect;
      switch (s.kind) {
        case quad::SplitKind::ramified: {
          exact::Integer lo = bfree::ipow(exact::Integer(p), k / 2), hi = bfree::ipow(exact::Integer(p), (k + 1) / 2);
          if (lo > 1) expect.push_back(lo);
          expect.push_back(hi);
          break;
        }
        case quad::SplitKind::inert: expect = {pk, pk}; break;
        case quad::SplitKind::split: expect = {pk}; break;
      }
      for (const auto& pi : s.ideals) {
        ++checked;
        bad += quad::quotient_structure(quad::ideal_pow(pi.ideal, k)) != expect;
      }
    }
  }
  return {{"field", f.d()}, {"checked", checked}, {"mismatches", bad}, {"pass", bad == 0}};
}

inline int cmd_verify(const json& cfg, std::ostream& out) {
  AnySystem sys = build_system(cfg);
  const std::uint64_t seed = detail::seed_of(cfg);
  json suites = json::object();
  bool all = true;
  auto record = [&](const std::string& name, json r) {
    all = all && r.value("pass", false);
    suites[name] = std::move(r);
  };
  std::vector<std::string> wanted;
  if (const json* v = io::find_path(cfg, "verify.suites")) {
    if (!v->is_array()) throw ConfigError("verify.suites: expected a list of suite names");
    for (const auto& x : *v) wanted.push_back(x.get<std::string>());
  } else if (const auto* b = std::get_if<bfree::BFreeSystem>(&sys)) {
    if (b->is_arithmetic())
      wanted = {"density", "fb", "thinning", "equidist", "annihilator"};
    else
      wanted = {"density", "fb", "thinning"};
  } else {
    wanted = {"density", "quotient"};
  }
  const std::size_t d = detail::dim_of(sys);
  auto opt = detail::sieve_options(cfg, d);
  for (const auto& name : wanted) {
    if (name == "density") {
      const bool quadratic = std::holds_alternative<quad::QuadKappaSystem>(sys);
      const double r = io::get_double(cfg, "verify.density_r", d == 1 ? 1e6 : (quadratic ? 400 : (d == 2 ? 1000 : 60)));
      auto s = detail::sieve_any(sys, r, opt);
      auto closed = detail::closed_density(sys, cfg);
      double emp = empirical::empirical_density(s);
      double tol = io::get_double(cfg, "density.tolerance", 0.01);
      double dist = static_cast<double>(closed.distance(emp));
      record(name, {{"r", r}, {"empirical", emp}, {"closed_form", detail::density_json(closed)}, {"distance", dist},
                    {"tolerance", tol}, {"pass", dist <= tol}});
    } else if (name == "fb" || name == "thinning" || name == "equidist") {
      const auto* b = std::get_if<bfree::BFreeSystem>(&sys);
      if (!b) throw ConfigError("verify.suites: '" + name + "' needs a Z^d system");
      const double r = io::get_double(cfg, "verify.r", d == 1 ? 1e6 : (d == 2 ? 500 : 40));
      auto s = detail::sieve_any(sys, r, opt);
      std::vector<Frequency> ks = frequency_list(cfg, "fb.k", d);
      if (ks.empty() && d <= 2) {
        json def = json::parse(d == 1 ? R"({"fb": {"k": [["1/4"], ["1/9"], ["1/6"], ["1/3"]]}})"
                                      : R"({"fb": {"k": [["1/2", "1/2"], ["1/3", 0], ["1/6", "1/6"], ["1/5", "2/5"]]}})");
        ks = frequency_list(def, "fb.k", d);
      }
      std::optional<spectra::SpectrumContext> bctx(std::in_place, *b);
      std::optional<spectra::QuadSpectrumContext> qctx;
      if (name == "fb") {
        std::vector<exact::RationalVector> exact_ks;
        for (const auto& k : ks)
          if (k.exact) exact_ks.push_back(*k.exact);
        std::vector<double> tol(exact_ks.size(), 0.02);
        if (b->is_arithmetic()) tol = empirical::calibrate_fb(*b, r, exact_ks).tolerance;
        json rows = json::array();
        bool ok = true;
        for (std::size_t i = 0, j = 0; i < ks.size(); ++i) {
          if (!ks[i].exact) continue;
          auto e = detail::evaluate_fb(sys, s, ks[i], bctx, qctx);
          double dev = std::abs(e.empirical - std::complex<double>(e.closed, 0));
          bool pass = dev <= tol[j];
          ok = ok && pass;
          rows.push_back(io::to_json({s.system, r, ks[i].text, e.empirical.real(), e.empirical.imag(), e.closed, tol[j], pass}));
          ++j;
        }
        record(name, {{"rows", rows}, {"pass", ok}});
      } else if (name == "thinning") {
        json runs = json::array();
        bool ok = true;
        for (double p : number_list(cfg, "thin.p", {0.5, 0.3})) {
          auto o = run_thinning(sys, s, p, seed, ks, io::get_double(cfg, "thin.fb_tolerance", 0.03), bctx, qctx);
          ok = ok && o.pass;
          runs.push_back(o.report);
        }
        record(name, {{"runs", runs}, {"pass", ok}});
      } else {
        auto groups = equidist_groups(sys, cfg);
        std::vector<bool> is_pair;
        auto cyls = equidist_cylinders(sys, cfg, groups, is_pair);
        const double t1 = io::get_double(cfg, "equidist.tolerance_single", 0.01);
        const double t2 = io::get_double(cfg, "equidist.tolerance_pair", 0.02);
        auto base = run_equidist(s, groups, cyls, is_pair, t1, t2);
        auto thin = empirical::apply_mask(s, empirical::bernoulli_thin(s, 0.5, seed));
        auto th = run_equidist(thin, groups, cyls, is_pair, 1.5 * t1, 1.5 * t2);
        std::size_t failed = 0;
        for (const auto& row : base.rows) failed += !row["pass"].get<bool>();
        for (const auto& row : th.rows) failed += !row["pass"].get<bool>();
        record(name, {{"cylinders", cyls.size()}, {"failed", failed}, {"pass", base.pass && th.pass}});
      }
    } else if (name == "annihilator") {
      const auto* b = std::get_if<bfree::BFreeSystem>(&sys);
      if (!b || !b->is_arithmetic()) throw ConfigError("verify.suites: 'annihilator' needs visible points or kappa-free integers");
      bfree::BFreeSystem small = b->family() == bfree::Family::visible ? bfree::BFreeSystem::visible(b->dim(), 13)
                                                                       : bfree::BFreeSystem::kappa_free_integers(b->kappa(), 13);
      record(name, annihilator_suite(small, 100, 50, seed, io::get_bool(cfg, "verify.corrupt", false)));
    } else if (name == "quotient") {
      const auto* q = std::get_if<quad::QuadKappaSystem>(&sys);
      if (!q) throw ConfigError("verify.suites: 'quotient' needs a quadratic system");
      record(name, quotient_suite(q->field(), 49, 4));
    } else {
      throw ConfigError("verify.suites: unknown suite '" + name + "'");
    }
  }
  json rep = io::with_provenance({{"system", system_name(sys)}, {"suites", suites}, {"pass", all}}, cfg, seed);
  detail::emit_json(out, cfg, rep);
  return all ? kPass : kVerificationFailed;
}

// ---------------------------------------------------------------- dispatch

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sieve", "density", "spectrum", "fb", "thin", "equidist", "holes", "field-info", "verify"};
  return names;
}

inline int run_command(const std::string& name, const json& cfg, std::ostream& out) {
  if (name == "sieve") return cmd_sieve(cfg, out);
  if (name == "density") return cmd_density(cfg, out);
  if (name == "spectrum") return cmd_spectrum(cfg, out);
  if (name == "fb") return cmd_fb(cfg, out);
  if (name == "thin") return cmd_thin(cfg, out);
  if (name == "equidist") return cmd_equidist(cfg, out);
  if (name == "holes") return cmd_holes(cfg, out);
  if (name == "field-info") return cmd_field_info(cfg, out);
  if (name == "verify") return cmd_verify(cfg, out);
  throw ConfigError("unknown command '" + name + "'");
}

/// Runs a command and maps exceptions onto exit codes, with the message on `err`.
inline int run_guarded(const std::string& name, const json& cfg, std::ostream& out, std::ostream& err) {
  try {
    return run_command(name, cfg, out);
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace bfspec::cli
