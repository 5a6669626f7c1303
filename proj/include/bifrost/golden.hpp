#pragma once

#include <cstdint>
#include <vector>

#include "bifrost/join.hpp"
#include "bifrost/perm.hpp"
#include "bifrost/ring.hpp"
#include "bifrost/smig.hpp"

// Golden reference instance: a four-row join whose permutations, pair list,
// and share values are pinned byte-exactly for regression. The share values
// are arbitrary constants, so they are forced through a scripted dealer
// random source rather than a seed; everything downstream then reproduces
// exactly. Copies of the two tables and the sidecar with these constants
// ship under data/golden/.

namespace bifrost {

struct GoldenExample {
  PartyTable<std::uint64_t> table_a;
  PartyTable<std::uint64_t> table_b;

  // Private permutations (0-based): first layer and mapping layer per party.
  Permutation pi_a1, pi_a2, pi_b1, pi_b2;
  // Their composites, for harness checks.
  Permutation pi_1, pi_2;

  MIPairs pairs;  // 0-based mapped intersection pairs

  std::vector<std::uint64_t> shuffled_a;  // dual-shuffled A features, reconstructed
  std::vector<std::uint64_t> shuffled_b;  // dual-shuffled B features, reconstructed

  Matrix<std::uint64_t> aligned_a_at_alice, aligned_a_at_bob;  // shares of shuffled_a
  Matrix<std::uint64_t> aligned_b_at_alice, aligned_b_at_bob;  // shares of shuffled_b

  Matrix<std::uint64_t> joined_share_a, joined_share_b;  // c x (m_a+m_b) output shares
  Matrix<std::uint64_t> joined_plain;                    // reconstructed joined table

  // Byte stream for the dealer's scripted random source: R^a draw, then the
  // pinned sender share of the a-direction correlation, then R^b, then the
  // pinned sender share of the b-direction correlation.
  std::vector<unsigned char> dealer_script;

  std::uint64_t expected_c = 0;
  std::uint64_t expected_online_payload_bytes = 0;
};

namespace goldendetail {

inline void append_u64_le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline Matrix<std::uint64_t> column(std::vector<std::uint64_t> v) {
  const std::size_t n = v.size();
  return Matrix<std::uint64_t>(n, 1, std::move(v));
}

}  // namespace goldendetail

inline GoldenExample golden_example() {
  using goldendetail::append_u64_le;
  using goldendetail::column;
  GoldenExample g;
  g.table_a = {{"aaa", "bbb", "ccc", "ddd"}, column({12, 61, 37, 49})};
  g.table_b = {{"ddd", "bbb", "ggg", "eee"}, column({13, 51, 28, 36})};

  g.pi_a1 = Permutation({3, 1, 0, 2});
  g.pi_a2 = Permutation({2, 0, 3, 1});
  g.pi_b1 = Permutation({3, 0, 2, 1});
  g.pi_b2 = Permutation({0, 2, 3, 1});
  g.pi_1 = Permutation({1, 0, 3, 2});  // compose(pi_a1, pi_b1)
  g.pi_2 = Permutation({2, 3, 1, 0});  // compose(pi_b2, pi_a2)

  g.pairs = {{0, 3}, {2, 2}};

  g.shuffled_a = {61, 12, 49, 37};
  g.shuffled_b = {36, 28, 13, 51};

  g.aligned_a_at_alice = column({43, 8, 23, 9});
  g.aligned_a_at_bob = column({18, 4, 26, 28});
  g.aligned_b_at_alice = column({25, 15, 4, 16});
  g.aligned_b_at_bob = column({11, 13, 9, 35});

  g.joined_share_a = Matrix<std::uint64_t>(2, 2, {43, 16, 23, 4});
  g.joined_share_b = Matrix<std::uint64_t>(2, 2, {18, 35, 26, 9});
  g.joined_plain = Matrix<std::uint64_t>(2, 2, {61, 51, 49, 13});

  // R draws are free; only the share draws that follow them are pinned.
  for (std::uint64_t v : {101u, 102u, 103u, 104u}) append_u64_le(g.dealer_script, v);
  for (std::uint64_t v : {43u, 8u, 23u, 9u}) append_u64_le(g.dealer_script, v);
  for (std::uint64_t v : {201u, 202u, 203u, 204u}) append_u64_le(g.dealer_script, v);
  for (std::uint64_t v : {11u, 13u, 9u, 35u}) append_u64_le(g.dealer_script, v);

  g.expected_c = 2;
  // (2*n_a + n_b) points of 32 bytes, c pairs of 16 bytes, one 64-bit
  // feature cell per row per side: (8+4)*32 + 2*16 + 8*8 = 480.
  g.expected_online_payload_bytes = 480;
  return g;
}

/// Overrides that force the golden values through a real protocol run. The
/// scripted dealer source must outlive the returned overrides.
inline std::pair<JoinOverrides<std::uint64_t>, JoinOverrides<std::uint64_t>> golden_overrides(
    const GoldenExample& g, ScriptedRng& dealer) {
  JoinOverrides<std::uint64_t> for_alice;
  for_alice.pi_first = g.pi_a1;
  for_alice.pi_second = g.pi_a2;
  for_alice.dealer_rng = &dealer;
  JoinOverrides<std::uint64_t> for_bob;
  for_bob.pi_first = g.pi_b1;
  for_bob.pi_second = g.pi_b2;
  return {for_alice, for_bob};
}

}  // namespace bifrost
