#pragma once

#include <cstdint>
#include <limits>

#include "bifrost/errors.hpp"

// Closed-form online communication calculators, used both for analytic
// reports and for cross-checking measured traffic. All results are bit or
// byte counts in checked 64-bit arithmetic; the baseline estimator
// instantiates asymptotic terms with unit constants and is a trend
// indicator, never a reproduction of measured baselines.

namespace bifrost {

struct CostParams {
  std::uint64_t n = 0;
  std::uint64_t m_a = 0;
  std::uint64_t m_b = 0;
  std::uint64_t c = 0;
  std::uint64_t ell = 64;
  std::uint64_t sigma = 256;
  std::uint64_t h = 3;        // baseline hash count
  std::uint64_t lambda = 40;  // statistical security parameter
  std::uint64_t kappa = 128;  // computational security parameter
};

/// Index width used for the pair list: the packed information-theoretic
/// width, or the 64-bit-per-index wire encoding this artifact actually sends.
enum class IndexWidth { kPacked, kWire };

namespace costdetail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw Error("cost arithmetic overflow");
  return a + b;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw Error("cost arithmetic overflow");
  return a * b;
}

}  // namespace costdetail

inline std::uint64_t ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  std::uint64_t bits = 0;
  std::uint64_t v = n - 1;
  while (v > 0) {
    v >>= 1;
    ++bits;
  }
  return bits;
}

inline std::uint64_t index_bits(const CostParams& p, IndexWidth iw) {
  return iw == IndexWidth::kPacked ? ceil_log2(p.n) : 64;
}

/// Intersection-mapping phase: one n-point flight, one 2n-point flight, and
/// c pairs of two indices. 3*n*sigma + 2*c*idx bits.
inline std::uint64_t smig_online_bits(const CostParams& p, IndexWidth iw) {
  using costdetail::checked_add;
  using costdetail::checked_mul;
  const std::uint64_t points = checked_mul(checked_mul(3, p.n), p.sigma);
  const std::uint64_t pairs = checked_mul(checked_mul(2, p.c), index_bits(p, iw));
  return checked_add(points, pairs);
}

/// Feature-alignment phase: both masked matrices. n*(m_a+m_b)*ell bits.
inline std::uint64_t misfa_online_bits(const CostParams& p) {
  using costdetail::checked_add;
  using costdetail::checked_mul;
  return checked_mul(checked_mul(p.n, checked_add(p.m_a, p.m_b)), p.ell);
}

inline std::uint64_t bifrost_online_bits(const CostParams& p, IndexWidth iw) {
  return costdetail::checked_add(smig_online_bits(p, iw), misfa_online_bits(p));
}

/// Trend ESTIMATE of the OPPRF-based baseline's online bits, instantiating
/// its asymptotic terms with unit constants:
/// h*n*(lambda + log2(n) + m_b*kappa) + n*m_a*ell  plus  n*m*ell + n*kappa.
inline std::uint64_t iprivjoin_online_bits_estimate(const CostParams& p) {
  using costdetail::checked_add;
  using costdetail::checked_mul;
  const std::uint64_t opprf_inner =
      checked_add(checked_add(p.lambda, ceil_log2(p.n)), checked_mul(p.m_b, p.kappa));
  const std::uint64_t step1 =
      checked_add(checked_mul(checked_mul(p.h, p.n), opprf_inner), checked_mul(checked_mul(p.n, p.m_a), p.ell));
  const std::uint64_t step23 = checked_add(
      checked_mul(checked_mul(p.n, checked_add(p.m_a, p.m_b)), p.ell), checked_mul(p.n, p.kappa));
  return checked_add(step1, step23);
}

/// Exact online payload bytes of one join as framed on the wire: SMIG msg1
/// carries n_a points, msg2 carries n_a + n_b points, msg3 carries c pairs
/// of two 8-byte indices, and the two masked matrices carry every feature
/// cell once at ell/8 bytes.
inline std::uint64_t expected_wire_payload_bytes(std::uint64_t n_a, std::uint64_t n_b, std::uint64_t m_a,
                                                 std::uint64_t m_b, std::uint64_t ell, std::uint64_t c) {
  using costdetail::checked_add;
  using costdetail::checked_mul;
  const std::uint64_t point_bytes = checked_mul(checked_add(checked_mul(2, n_a), n_b), 32);
  const std::uint64_t pair_bytes = checked_mul(16, c);
  const std::uint64_t feature_bytes = checked_mul(
      checked_add(checked_mul(n_a, m_a), checked_mul(n_b, m_b)), ell / 8);
  return checked_add(checked_add(point_bytes, pair_bytes), feature_bytes);
}

}  // namespace bifrost
