#pragma once

#include <exception>
#include <thread>
#include <utility>

#include "bifrost/ring.hpp"
#include "bifrost/shuffle.hpp"
#include "bifrost/smig.hpp"
#include "bifrost/transport.hpp"

// Mapped-intersection secure feature alignment (MI-SFA). Each party first
// shuffles its own feature rows locally (the first layer of its dual
// mapping), then plays oblivious-shuffle sender for that matrix while
// simultaneously playing receiver for the peer's. The exchange is one
// full-duplex round with exactly one masked-matrix flight per direction.
// Joined-table shares are then extracted locally from the pair list.

namespace bifrost {

/// One party's additive share of the joined table: c rows, the first m_a
/// columns from A's features, the remaining m_b from B's.
template <RingWord W>
struct JoinOutputShare {
  std::uint64_t m_a = 0;
  std::uint64_t m_b = 0;
  Matrix<W> rows;
};

/// Local first mapping layer plus the sender flight of the oblivious
/// shuffle: wire = pi_own_first(F) - R.
template <RingWord W>
std::pair<Matrix<W>, Matrix<W>> dual_shuffle_own_features(const Matrix<W>& features,
                                                          const Permutation& own_first,
                                                          ShuffleSenderHalf<W>& half) {
  return oshuffle_send(own_first.apply_rows(features), half);
}

/// Receiver side for the peer's matrix; the second mapping layer is the
/// permutation bound into the correlation half.
template <RingWord W>
Matrix<W> dual_shuffle_partner_features(const Matrix<W>& wire, ShuffleReceiverHalf<W>& half) {
  return oshuffle_receive(wire, half);
}

/// Pulls the matched rows out of the two aligned share matrices. Purely
/// local; row t is the concatenation of share_a[pairs[t].a_index] and
/// share_b[pairs[t].b_index].
template <RingWord W>
JoinOutputShare<W> extract_joined(const Matrix<W>& share_a, const Matrix<W>& share_b, const MIPairs& pairs) {
  JoinOutputShare<W> out;
  out.m_a = share_a.cols;
  out.m_b = share_b.cols;
  out.rows = Matrix<W>(pairs.size(), share_a.cols + share_b.cols);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const MIPair& p = pairs[t];
    if (p.a_index >= share_a.rows || p.b_index >= share_b.rows)
      throw ShapeError("pair index outside the aligned share matrices");
    for (std::size_t c = 0; c < share_a.cols; ++c) out.rows.at(t, c) = share_a.at(p.a_index, c);
    for (std::size_t c = 0; c < share_b.cols; ++c) out.rows.at(t, share_a.cols + c) = share_b.at(p.b_index, c);
  }
  return out;
}

template <RingWord W>
struct MisfaResult {
  Matrix<W> aligned_a;  // this party's share of the dual-shuffled A features
  Matrix<W> aligned_b;  // this party's share of the dual-shuffled B features
  JoinOutputShare<W> joined;
};

/// One concurrent masked exchange, then local extraction. The send runs on a
/// helper thread while this thread receives, so neither endpoint waits on
/// the other before flying its own matrix: one logical round.
template <RingWord W>
MisfaResult<W> run_misfa(Transport& t, Role role, const Matrix<W>& features, const Permutation& own_first,
                         ShuffleSenderHalf<W>& send_half, ShuffleReceiverHalf<W>& recv_half,
                         const MIPairs& pairs, std::uint64_t peer_rows, std::uint64_t peer_cols) {
  auto [wire, own_share] = dual_shuffle_own_features(features, own_first, send_half);

  std::vector<unsigned char> payload;
  append_matrix_le(payload, wire);
  const MsgType send_type = role == Role::kAlice ? MsgType::kMisfaMaskedA : MsgType::kMisfaMaskedB;
  const MsgType recv_type = role == Role::kAlice ? MsgType::kMisfaMaskedB : MsgType::kMisfaMaskedA;

  std::exception_ptr send_error;
  std::thread sender([&] {
    try {
      t.send(send_type, payload);
    } catch (...) {
      send_error = std::current_exception();
    }
  });
  Frame f;
  try {
    f = t.expect(recv_type);
  } catch (...) {
    sender.join();
    throw;
  }
  sender.join();
  if (send_error) std::rethrow_exception(send_error);
  t.round_barrier("misfa: concurrent masked feature exchange");

  const Matrix<W> peer_wire = read_matrix_le<W>(f.payload, peer_rows, peer_cols);
  const Matrix<W> peer_share = dual_shuffle_partner_features(peer_wire, recv_half);

  MisfaResult<W> out;
  if (role == Role::kAlice) {
    out.aligned_a = std::move(own_share);
    out.aligned_b = std::move(peer_share);
  } else {
    out.aligned_a = std::move(peer_share);
    out.aligned_b = std::move(own_share);
  }
  out.joined = extract_joined(out.aligned_a, out.aligned_b, pairs);
  return out;
}

}  // namespace bifrost
