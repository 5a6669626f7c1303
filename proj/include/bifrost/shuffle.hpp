#pragma once

#include <utility>

#include "bifrost/errors.hpp"
#include "bifrost/perm.hpp"
#include "bifrost/ring.hpp"
#include "bifrost/rng.hpp"

// Oblivious shuffle from dealer-made correlated randomness. The dealer hands
// the sender (R, <pi(R)>_s) and the receiver (pi, <pi(R)>_r). Online, the
// sender reveals only X - R; the receiver permutes that and adds its share.
// The two output shares then reconstruct pi(X) while neither side learns the
// other's input. Each half is single-use.

namespace bifrost {

template <RingWord W>
struct ShuffleSenderHalf {
  Matrix<W> mask;   // R, known only to the sender (and dealer)
  Matrix<W> share;  // sender's additive share of pi(R)
  bool consumed = false;
};

template <RingWord W>
struct ShuffleReceiverHalf {
  Permutation pi;   // known only to the receiver (and dealer)
  Matrix<W> share;  // receiver's additive share of pi(R)
  bool consumed = false;
};

template <RingWord W>
struct ShuffleCorrelation {
  ShuffleSenderHalf<W> sender;
  ShuffleReceiverHalf<W> receiver;
};

/// Samples R uniformly and splits pi(R) into additive shares. The first
/// share drawn is the sender's, which is what fixture injection pins.
template <RingWord W>
ShuffleCorrelation<W> dealer_generate_correlation(std::size_t n, std::size_t m, Permutation pi,
                                                  RandomSource& rng) {
  if (pi.size() != n) throw ShapeError("correlation permutation size does not match row count");
  Matrix<W> r = random_matrix<W>(n, m, rng);
  Matrix<W> permuted = pi.apply_rows(r);
  auto [sender_share, receiver_share] = share_matrix(permuted, rng);
  ShuffleCorrelation<W> corr;
  corr.sender = {std::move(r), std::move(sender_share), false};
  corr.receiver = {std::move(pi), std::move(receiver_share), false};
  return corr;
}

/// Sender flight: wire = x - R. The sender's output share is its offline
/// share, byte for byte, independent of x.
template <RingWord W>
std::pair<Matrix<W>, Matrix<W>> oshuffle_send(const Matrix<W>& x, ShuffleSenderHalf<W>& half) {
  if (half.consumed) throw CorrelationReuseError("sender correlation half already consumed");
  if (!x.same_shape(half.mask)) throw ShapeError("masked shuffle input shape does not match correlation");
  half.consumed = true;
  return {sub(x, half.mask), half.share};
}

/// Receiver side: permute the masked rows and unmask with the dealer share.
template <RingWord W>
Matrix<W> oshuffle_receive(const Matrix<W>& wire, ShuffleReceiverHalf<W>& half) {
  if (half.consumed) throw CorrelationReuseError("receiver correlation half already consumed");
  if (wire.rows != half.pi.size() || !wire.same_shape(half.share))
    throw ShapeError("masked shuffle wire shape does not match correlation");
  half.consumed = true;
  return add(half.pi.apply_rows(wire), half.share);
}

}  // namespace bifrost
