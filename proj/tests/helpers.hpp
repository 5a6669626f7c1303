#pragma once

// Shared test utilities. The chi-square critical values are for the upper
// 0.001 tail and were computed once with an external statistics package,
// then frozen here.

#include <cstdint>
#include <span>
#include <vector>

namespace testutil {

inline constexpr double kChi2Crit255 = 330.51974363400586;  // dof 255
inline constexpr double kChi2Crit7 = 24.321886347856854;    // dof 7

inline double chi_square(const std::vector<std::uint64_t>& counts, double expected_each) {
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected_each;
    stat += d * d / expected_each;
  }
  return stat;
}

inline double chi_square_bytes(std::span<const unsigned char> bytes) {
  std::vector<std::uint64_t> counts(256, 0);
  for (unsigned char b : bytes) counts[b]++;
  return chi_square(counts, static_cast<double>(bytes.size()) / 256.0);
}

}  // namespace testutil
