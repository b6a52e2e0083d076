#pragma once

#include "bfspec/empirical/fourier.hpp"
#include "bfspec/empirical/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bfspec::empirical {

/// a_{V_n}(k) of the periodic set V_n = Z^d \ (Γ_1 ∪ ... ∪ Γ_n), exact:
/// sum over S ⊆ {1..n} of (-1)^|S| [m_S k ∈ Z^d] / m_S^d, with m_S the product
/// of the moduli (the Γ_i are pairwise coprime for arithmetic families).
inline exact::Rational periodic_coefficient(const BFreeSystem& sys, std::size_t n, const exact::RationalVector& k) {
  if (!sys.is_arithmetic()) throw DomainError("periodic oracle needs visible points or kappa-free integers");
  if (n > sys.truncation()) throw DomainError("truncation exceeded");
  if (n > 20) throw BudgetError("periodic oracle limited to 20 lattices");
  if (k.size() != sys.dim()) throw DomainError("frequency dimension mismatch");
  std::vector<exact::Integer> mod(n);
  for (std::size_t i = 0; i < n; ++i) mod[i] = bfree::ipow(exact::Integer(sys.labels()[i]), sys.exponents()[i]);
  exact::Rational total = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    exact::Integer m = 1;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        m *= mod[i];
        ++bits;
      }
    bool hit = true;
    for (const auto& c : k) hit = hit && exact::is_integral(c * exact::Rational(m));
    if (!hit) continue;
    exact::Rational term(1, bfree::ipow(m, static_cast<unsigned>(sys.dim())));
    total += bits % 2 ? -term : term;
  }
  return total;
}

/// Points of V_n in the closed region, same ordering and volume as sieve_ball.
inline SievedSet sieve_periodic(const BFreeSystem& sys, std::size_t n, double r, Region region = Region::ball) {
  if (!sys.is_arithmetic()) throw DomainError("periodic sieve needs visible points or kappa-free integers");
  if (n > sys.truncation()) throw DomainError("truncation exceeded");
  const std::size_t d = sys.dim();
  if (detail::estimated_count(d, r) > kPointBudget) throw BudgetError("sieve region holds more than 2e8 lattice points");
  std::vector<std::int64_t> mod(n);
  for (std::size_t i = 0; i < n; ++i)
    mod[i] = exact::to_int64(bfree::ipow(exact::Integer(sys.labels()[i]), sys.exponents()[i]));
  SievedSet out{"periodic(" + sys.name() + ",n=" + std::to_string(n) + ")", d, r, region, region_volume(region, d, r),
                std::vector<std::int64_t>(d, 0), {}, {}};
  detail::for_each_integer_point(d, r, region, [&](const std::vector<std::int64_t>& y) {
    for (auto m : mod) {
      bool in = true;
      for (auto c : y) in = in && c % m == 0;
      if (in) return;
    }
    for (auto c : y) {
      out.coords.push_back(c);
      out.points.push_back(static_cast<double>(c));
    }
  });
  return out;
}

struct FbCalibration {
  std::size_t lattices = 0;          // n of the periodic approximant
  std::vector<double> periodic_err;  // |empirical_{V_n}(r, k) - a_{V_n}(k)| per k
  std::vector<double> tolerance;     // per k
};

inline constexpr double kCalibrationFactor = 10;
inline constexpr double kToleranceCap = 0.02;

/// Per-(r, k) tolerances from the finite-r error of the periodic approximant
/// over primes <= prime_limit: tol(k) = min(cap, 10 max(E(k), mean E)). The
/// mean acts as a floor where the periodic sum happens to cancel at one k.
inline FbCalibration calibrate_fb(const BFreeSystem& sys, double r, const std::vector<exact::RationalVector>& ks,
                                  std::uint64_t prime_limit = 13) {
  FbCalibration cal;
  while (cal.lattices < sys.truncation() && sys.labels()[cal.lattices] <= prime_limit) ++cal.lattices;
  auto per = sieve_periodic(sys, cal.lattices, r);
  double mean = 0;
  for (const auto& k : ks) {
    double exact_val = exact::to_double(periodic_coefficient(sys, cal.lattices, k));
    cal.periodic_err.push_back(std::abs(empirical_fb(per, k) - std::complex<double>(exact_val, 0)));
    mean += cal.periodic_err.back();
  }
  if (!ks.empty()) mean /= static_cast<double>(ks.size());
  for (double e : cal.periodic_err) cal.tolerance.push_back(std::min(kToleranceCap, kCalibrationFactor * std::max(e, mean)));
  return cal;
}

}  // namespace bfspec::empirical
