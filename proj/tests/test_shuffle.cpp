#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

#include "bifrost/rng.hpp"
#include "bifrost/shuffle.hpp"
#include "helpers.hpp"

using namespace bifrost;

TEST_CASE("the two output shares reconstruct the permuted input, exhaustively", "[shuffle]") {
  SeededRng rng(seed_from_string("exhaustive"));
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<std::uint64_t> map(n);
    std::iota(map.begin(), map.end(), 0);
    do {
      const Permutation pi(map);
      auto corr = dealer_generate_correlation<std::uint8_t>(n, 2, pi, rng);
      const auto x = random_matrix<std::uint8_t>(n, 2, rng);
      const auto [wire, sender_share] = oshuffle_send(x, corr.sender);
      const auto receiver_share = oshuffle_receive(wire, corr.receiver);
      REQUIRE(add(sender_share, receiver_share) == pi.apply_rows(x));
    } while (std::next_permutation(map.begin(), map.end()));
  }
}

TEST_CASE("the receiver's output does not depend on the mask", "[shuffle]") {
  // Algebraically the receiver ends up holding pi(x) minus the sender's
  // share; the mask cancels. Pinned fixtures rely on this.
  SeededRng rng(seed_from_string("independent"));
  const Permutation pi = Permutation::sample(9, rng);
  auto corr = dealer_generate_correlation<std::uint32_t>(9, 3, pi, rng);
  const auto x = random_matrix<std::uint32_t>(9, 3, rng);
  const auto [wire, sender_share] = oshuffle_send(x, corr.sender);
  const auto receiver_share = oshuffle_receive(wire, corr.receiver);
  REQUIRE(receiver_share == sub(pi.apply_rows(x), sender_share));
}

TEST_CASE("correlation halves are single-use", "[shuffle]") {
  SeededRng rng(seed_from_string("reuse"));
  const Permutation pi = Permutation::sample(4, rng);
  auto corr = dealer_generate_correlation<std::uint16_t>(4, 1, pi, rng);
  const auto x = random_matrix<std::uint16_t>(4, 1, rng);
  const auto [wire, sender_share] = oshuffle_send(x, corr.sender);
  (void)sender_share;
  (void)oshuffle_receive(wire, corr.receiver);
  REQUIRE_THROWS_AS(oshuffle_send(x, corr.sender), CorrelationReuseError);
  REQUIRE_THROWS_AS(oshuffle_receive(wire, corr.receiver), CorrelationReuseError);
}

TEST_CASE("shapes are validated against the correlation", "[shuffle]") {
  SeededRng rng(seed_from_string("shape"));
  const Permutation pi = Permutation::sample(4, rng);
  auto corr = dealer_generate_correlation<std::uint16_t>(4, 2, pi, rng);
  const auto wrong = random_matrix<std::uint16_t>(4, 3, rng);
  REQUIRE_THROWS_AS(oshuffle_send(wrong, corr.sender), ShapeError);
  auto corr2 = dealer_generate_correlation<std::uint16_t>(4, 2, pi, rng);
  REQUIRE_THROWS_AS(oshuffle_receive(wrong, corr2.receiver), ShapeError);
}

TEST_CASE("the dealer's halves are consistent", "[shuffle]") {
  SeededRng rng(seed_from_string("dealer"));
  const Permutation pi = Permutation::sample(7, rng);
  auto corr = dealer_generate_correlation<std::uint64_t>(7, 2, pi, rng);
  REQUIRE(corr.receiver.pi == pi);
  REQUIRE(add(corr.sender.share, corr.receiver.share) == pi.apply_rows(corr.sender.mask));
}

TEST_CASE("masked wire traffic passes a uniformity screen", "[shuffle]") {
  // A constant input must still leave the sender as uniform-looking bytes.
  SeededRng rng(seed_from_string("mask-chi"));
  const Matrix<std::uint8_t> x(64, 16, std::vector<std::uint8_t>(64 * 16, 7));
  std::vector<unsigned char> wire_bytes;
  for (int run = 0; run < 128; ++run) {
    const Permutation pi = Permutation::sample(64, rng);
    auto corr = dealer_generate_correlation<std::uint8_t>(64, 16, pi, rng);
    const auto [wire, sender_share] = oshuffle_send(x, corr.sender);
    (void)sender_share;
    append_matrix_le(wire_bytes, wire);
  }
  REQUIRE(wire_bytes.size() == 131072);
  REQUIRE(testutil::chi_square_bytes(wire_bytes) < testutil::kChi2Crit255);
}
