#pragma once

#include "bfspec/empirical/sieve.hpp"
#include "bfspec/exact/integer.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace bfspec::empirical {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

inline constexpr std::size_t kChunk = 4096;

/// Sum of term(i) over [0, n): compensated within fixed 4096-point chunks, then
/// pairwise over the chunk sums. The result depends only on n and the ordering.
template <class Term>
std::complex<double> stable_sum(std::size_t n, Term&& term) {
  std::vector<std::complex<double>> chunks;
  chunks.reserve(n / kChunk + 1);
  for (std::size_t start = 0; start < n; start += kChunk) {
    CompensatedSum re, im;
    const std::size_t end = std::min(n, start + kChunk);
    for (std::size_t i = start; i < end; ++i) {
      std::complex<double> z = term(i);
      re.add(z.real());
      im.add(z.imag());
    }
    chunks.emplace_back(re.value(), im.value());
  }
  if (chunks.empty()) return 0;
  while (chunks.size() > 1) {
    std::vector<std::complex<double>> next;
    next.reserve(chunks.size() / 2 + 1);
    for (std::size_t i = 0; i + 1 < chunks.size(); i += 2) next.push_back(chunks[i] + chunks[i + 1]);
    if (chunks.size() % 2) next.push_back(chunks.back());
    chunks.swap(next);
  }
  return chunks[0];
}

/// (1/vol) sum_{y in S} exp(-2πi k.y) for a real frequency k.
inline std::complex<double> empirical_fb(const SievedSet& s, const std::vector<double>& k) {
  if (k.size() != s.dim) throw DomainError("frequency dimension mismatch");
  if (s.volume <= 0) return 0;
  auto sum = stable_sum(s.size(), [&](std::size_t i) {
    const double* y = s.point(i);
    // Reduce the phase per coordinate to keep arguments small.
    double phase = 0;
    for (std::size_t j = 0; j < s.dim; ++j) {
      double t = k[j] * y[j];
      phase += t - std::nearbyint(t);
    }
    phase -= std::nearbyint(phase);
    return std::polar(1.0, -2 * M_PI * phase);
  });
  return sum / s.volume;
}

/// Same sum for rational k on an integral point set: phases are reduced exactly
/// mod 1 in integers, so only the exponential itself is rounded.
inline std::complex<double> empirical_fb(const SievedSet& s, const exact::RationalVector& k) {
  if (k.size() != s.dim) throw DomainError("frequency dimension mismatch");
  if (s.volume <= 0) return 0;
  exact::Integer q = 1;
  for (const auto& c : k) q = exact::lcm(q, exact::denominator(c));
  const exact::Integer qbig = q;
  // Positions y are integers for Z^d systems; fall back to the real path otherwise.
  bool integral = q <= 1'000'000'000;
  for (std::size_t i = 0; integral && i < s.points.size(); ++i) integral = s.points[i] == std::nearbyint(s.points[i]);
  if (!integral) {
    std::vector<double> kd;
    for (const auto& c : k) kd.push_back(exact::to_double(c));
    return empirical_fb(s, kd);
  }
  const auto qi = exact::to_int64(qbig);
  std::vector<std::int64_t> num;
  for (const auto& c : k) num.push_back(exact::to_int64(exact::mod(exact::numerator(c * exact::Rational(q)), qbig)));
  auto sum = stable_sum(s.size(), [&](std::size_t i) {
    const double* y = s.point(i);
    __int128 acc = 0;
    for (std::size_t j = 0; j < s.dim; ++j) acc += static_cast<__int128>(num[j]) * static_cast<std::int64_t>(y[j]);
    auto r = static_cast<std::int64_t>(acc % qi);
    if (r < 0) r += qi;
    return std::polar(1.0, -2 * M_PI * static_cast<double>(r) / static_cast<double>(qi));
  });
  return sum / s.volume;
}

}  // namespace bfspec::empirical
