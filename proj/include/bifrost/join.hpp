#pragma once

#include <algorithm>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bifrost/misfa.hpp"
#include "bifrost/ring.hpp"
#include "bifrost/rng.hpp"
#include "bifrost/shuffle.hpp"
#include "bifrost/smig.hpp"
#include "bifrost/transport.hpp"

// Top-level two-party join. Phases:
//   handshake  HELLO exchange negotiating version, ring width, table shapes
//   offline    dealer correlation material (input independent, accounted apart)
//   smig       three-flight mapped intersection generation
//   misfa      one full-duplex masked feature exchange, then local extraction
// The dealer is hosted by party A's process: B contributes only the
// permutation of its correlation over an OFFLINE frame and receives its
// halves the same way. Online rounds are 3 (smig) + 1 (misfa) = 4.

namespace bifrost {

inline constexpr std::uint16_t kProtocolVersion = 1;

template <RingWord W>
struct PartyTable {
  IdList ids;
  Matrix<W> features;  // rows == ids.size()
};

template <RingWord W>
void validate_table(const PartyTable<W>& t) {
  validate_id_list(t.ids);
  if (t.features.rows != t.ids.size()) throw ShapeError("feature rows do not match id count");
  if (t.ids.empty()) throw Error("table must have at least one row");
}

/// Test-only injection points. Absent fields fall back to the party RNG; a
/// scripted dealer source pins the correlation shares (and through them the
/// output shares).
template <RingWord W>
struct JoinOverrides {
  std::optional<Permutation> pi_first;
  std::optional<Permutation> pi_second;
  std::optional<GroupScalar> key;
  RandomSource* dealer_rng = nullptr;  // honored at party A, which hosts the dealer
};

struct MsgTypeCounters {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
};

struct RunStats {
  std::string role;
  unsigned ell = 0;
  std::uint64_t n_a = 0, n_b = 0, m_a = 0, m_b = 0, c = 0;
  PhaseStats phases[kPhaseCount];
  MsgTypeCounters frames[8];  // indexed in kTrackedMsgTypes order
  std::uint64_t online_payload_bytes = 0;
  std::uint64_t online_rounds = 0;
};

inline constexpr MsgType kTrackedMsgTypes[8] = {
    MsgType::kHello,      MsgType::kOfflinePerm,  MsgType::kOfflineShare, MsgType::kSmigMsg1,
    MsgType::kSmigMsg2,   MsgType::kSmigMsg3,     MsgType::kMisfaMaskedA, MsgType::kMisfaMaskedB,
};

/// Flat machine-readable form, one key per line; wall-clock keys are the
/// only non-reproducible fields.
inline std::string to_flat_json(const RunStats& s) {
  std::string out = "{\n";
  auto add_str = [&](const std::string& k, const std::string& v) {
    out += "  \"" + k + "\": \"" + v + "\",\n";
  };
  auto add_u64 = [&](const std::string& k, std::uint64_t v) {
    out += "  \"" + k + "\": " + std::to_string(v) + ",\n";
  };
  add_str("role", s.role);
  add_u64("ell", s.ell);
  add_u64("n_a", s.n_a);
  add_u64("n_b", s.n_b);
  add_u64("m_a", s.m_a);
  add_u64("m_b", s.m_b);
  add_u64("c", s.c);
  for (int p = 0; p < kPhaseCount; ++p) {
    const std::string prefix = phase_name(static_cast<Phase>(p));
    const PhaseStats& ps = s.phases[p];
    add_u64(prefix + ".payload_bytes_sent", ps.payload_bytes_sent);
    add_u64(prefix + ".payload_bytes_received", ps.payload_bytes_received);
    add_u64(prefix + ".frames_sent", ps.frames_sent);
    add_u64(prefix + ".frames_received", ps.frames_received);
    add_u64(prefix + ".rounds", ps.rounds);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ps.wall_ms);
    out += "  \"" + prefix + ".wall_ms\": " + buf + ",\n";
  }
  for (int i = 0; i < 8; ++i) {
    const std::string prefix = std::string("frames.") + msg_type_name(kTrackedMsgTypes[i]);
    add_u64(prefix + ".sent", s.frames[i].sent);
    add_u64(prefix + ".received", s.frames[i].received);
  }
  add_u64("online.payload_bytes", s.online_payload_bytes);
  out += "  \"online.rounds\": " + std::to_string(s.online_rounds) + "\n}\n";
  return out;
}

template <RingWord W>
struct JoinResult {
  JoinOutputShare<W> share;
  MIPairs pairs;
  Matrix<W> aligned_a;  // this party's share of the dual-shuffled A features
  Matrix<W> aligned_b;  // this party's share of the dual-shuffled B features
  RunStats stats;
};

namespace detail {

struct Hello {
  std::uint16_t version = 0;
  std::uint16_t ell = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
};

inline std::vector<unsigned char> encode_hello(const Hello& h) {
  std::vector<unsigned char> out;
  out.reserve(20);
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  };
  auto put64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
  };
  put16(h.version);
  put16(h.ell);
  put64(h.n);
  put64(h.m);
  return out;
}

inline Hello parse_hello(std::span<const unsigned char> in) {
  if (in.size() != 20) throw TransportError("malformed HELLO payload");
  Hello h;
  h.version = static_cast<std::uint16_t>(in[0] | (in[1] << 8));
  h.ell = static_cast<std::uint16_t>(in[2] | (in[3] << 8));
  for (int i = 7; i >= 0; --i) h.n = (h.n << 8) | in[4 + i];
  for (int i = 7; i >= 0; --i) h.m = (h.m << 8) | in[12 + i];
  return h;
}

inline std::vector<unsigned char> encode_perm(const Permutation& pi) {
  std::vector<unsigned char> out;
  out.reserve(pi.size() * 8);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const std::uint64_t v = pi(i);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
  }
  return out;
}

inline Permutation parse_perm(std::span<const unsigned char> in, std::size_t n) {
  if (in.size() != n * 8) throw TransportError("permutation payload does not match announced size");
  std::vector<std::uint64_t> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | in[i * 8 + b];
    m[i] = v;
  }
  return Permutation(std::move(m));
}

}  // namespace detail

/// Runs one party of the join over an established transport. `base_seed`
/// must agree between the endpoints for reproducible runs (each party
/// derives its own stream from it); omit it for OS randomness.
template <RingWord W>
JoinResult<W> run_join(Transport& t, Role role, const PartyTable<W>& table,
                       const std::optional<Seed>& base_seed = std::nullopt,
                       const JoinOverrides<W>* overrides = nullptr) {
  validate_table(table);
  const std::uint64_t n_own = table.ids.size();
  const std::uint64_t m_own = table.features.cols;

  std::unique_ptr<RandomSource> rng;
  if (base_seed)
    rng = std::make_unique<SeededRng>(derive_seed(*base_seed, role == Role::kAlice ? "party:a" : "party:b"));
  else
    rng = std::make_unique<OsRng>();

  Accounting& acct = t.accounting();
  acct.set_phase(Phase::kHandshake);
  const std::vector<unsigned char> hello =
      detail::encode_hello({kProtocolVersion, static_cast<std::uint16_t>(kRingBits<W>), n_own, m_own});
  detail::Hello peer;
  if (role == Role::kAlice) {
    t.send(MsgType::kHello, hello);
    peer = detail::parse_hello(t.expect(MsgType::kHello).payload);
  } else {
    peer = detail::parse_hello(t.expect(MsgType::kHello).payload);
    t.send(MsgType::kHello, hello);
  }
  if (peer.version != kProtocolVersion)
    throw ParamMismatchError("peer speaks protocol version " + std::to_string(peer.version) +
                             ", this side speaks " + std::to_string(kProtocolVersion));
  if (peer.ell != kRingBits<W>)
    throw ParamMismatchError("peer uses ring width " + std::to_string(peer.ell) + ", this side uses " +
                             std::to_string(kRingBits<W>));
  if (peer.n == 0) throw ParamMismatchError("peer announced an empty table");

  const std::uint64_t n_a = role == Role::kAlice ? n_own : peer.n;
  const std::uint64_t m_a = role == Role::kAlice ? m_own : peer.m;
  const std::uint64_t n_b = role == Role::kAlice ? peer.n : n_own;
  const std::uint64_t m_b = role == Role::kAlice ? peer.m : m_own;

  // Offline: keys, permutations, dealer correlations. Draw order is fixed
  // (key, first permutation, second permutation) for reproducibility.
  acct.set_phase(Phase::kOffline);
  GroupScalar key = overrides && overrides->key ? *overrides->key : keygen(*rng);
  Permutation pi_first = overrides && overrides->pi_first ? *overrides->pi_first : Permutation::sample(n_a, *rng);
  Permutation pi_second =
      overrides && overrides->pi_second ? *overrides->pi_second : Permutation::sample(n_b, *rng);
  if (pi_first.size() != n_a) throw ShapeError("first permutation must act on the a-side row count");
  if (pi_second.size() != n_b) throw ShapeError("second permutation must act on the b-side row count");

  ShuffleSenderHalf<W> send_half;
  ShuffleReceiverHalf<W> recv_half;
  if (role == Role::kAlice) {
    const Permutation peer_pi_first = detail::parse_perm(t.expect(MsgType::kOfflinePerm).payload, n_a);
    std::unique_ptr<RandomSource> dealer_local;
    RandomSource* dealer = overrides ? overrides->dealer_rng : nullptr;
    if (dealer == nullptr) {
      if (base_seed)
        dealer_local = std::make_unique<SeededRng>(derive_seed(*base_seed, "dealer"));
      else
        dealer_local = std::make_unique<OsRng>();
      dealer = dealer_local.get();
    }
    ShuffleCorrelation<W> corr_a = dealer_generate_correlation<W>(n_a, m_a, peer_pi_first, *dealer);
    ShuffleCorrelation<W> corr_b = dealer_generate_correlation<W>(n_b, m_b, pi_second, *dealer);
    std::vector<unsigned char> material;
    append_matrix_le(material, corr_a.receiver.share);
    append_matrix_le(material, corr_b.sender.mask);
    append_matrix_le(material, corr_b.sender.share);
    t.send(MsgType::kOfflineShare, material);
    send_half = std::move(corr_a.sender);
    recv_half = std::move(corr_b.receiver);
  } else {
    t.send(MsgType::kOfflinePerm, detail::encode_perm(pi_first));
    const Frame f = t.expect(MsgType::kOfflineShare);
    const std::size_t recv_bytes = n_a * m_a * sizeof(W);
    const std::size_t mask_bytes = n_b * m_b * sizeof(W);
    if (f.payload.size() != recv_bytes + 2 * mask_bytes)
      throw TransportError("dealer material does not match announced shapes");
    const std::span<const unsigned char> payload(f.payload);
    recv_half.pi = pi_first;
    recv_half.share = read_matrix_le<W>(payload.first(recv_bytes), n_a, m_a);
    send_half.mask = read_matrix_le<W>(payload.subspan(recv_bytes, mask_bytes), n_b, m_b);
    send_half.share = read_matrix_le<W>(payload.subspan(recv_bytes + mask_bytes), n_b, m_b);
  }

  acct.set_phase(Phase::kSmig);
  const MIPairs pairs = run_smig(t, role, table.ids, pi_first, pi_second, key, n_a, n_b);

  acct.set_phase(Phase::kMisfa);
  const Permutation& own_first = role == Role::kAlice ? pi_first : pi_second;
  const std::uint64_t peer_rows = role == Role::kAlice ? n_b : n_a;
  const std::uint64_t peer_cols = role == Role::kAlice ? m_b : m_a;
  MisfaResult<W> aligned =
      run_misfa<W>(t, role, table.features, own_first, send_half, recv_half, pairs, peer_rows, peer_cols);
  acct.finish();

  JoinResult<W> result;
  result.share = std::move(aligned.joined);
  result.pairs = pairs;
  result.aligned_a = std::move(aligned.aligned_a);
  result.aligned_b = std::move(aligned.aligned_b);
  result.stats.role = role_name(role);
  result.stats.ell = kRingBits<W>;
  result.stats.n_a = n_a;
  result.stats.n_b = n_b;
  result.stats.m_a = m_a;
  result.stats.m_b = m_b;
  result.stats.c = pairs.size();
  for (int p = 0; p < kPhaseCount; ++p) result.stats.phases[p] = acct.phase_stats(static_cast<Phase>(p));
  for (int i = 0; i < 8; ++i) {
    result.stats.frames[i].sent = acct.sent_count(kTrackedMsgTypes[i]);
    result.stats.frames[i].received = acct.received_count(kTrackedMsgTypes[i]);
  }
  result.stats.online_payload_bytes = acct.online_payload_bytes();
  result.stats.online_rounds = acct.online_rounds();
  return result;
}

/// Both parties on two threads over an in-process pair. Throws the first
/// party error encountered; a failing side closes its endpoint so the peer
/// unblocks.
template <RingWord W>
std::pair<JoinResult<W>, JoinResult<W>> run_join_loopback(const PartyTable<W>& table_a,
                                                          const PartyTable<W>& table_b,
                                                          const std::optional<Seed>& base_seed = std::nullopt,
                                                          const JoinOverrides<W>* overrides_a = nullptr,
                                                          const JoinOverrides<W>* overrides_b = nullptr) {
  auto [ta, tb] = make_loopback_pair();
  JoinResult<W> ra, rb;
  std::exception_ptr ea, eb;
  std::thread thread_b([&] {
    try {
      rb = run_join<W>(*tb, Role::kBob, table_b, base_seed, overrides_b);
    } catch (...) {
      eb = std::current_exception();
    }
    tb.reset();
  });
  try {
    ra = run_join<W>(*ta, Role::kAlice, table_a, base_seed, overrides_a);
  } catch (...) {
    ea = std::current_exception();
  }
  ta.reset();
  thread_b.join();
  if (ea) std::rethrow_exception(ea);
  if (eb) std::rethrow_exception(eb);
  return {std::move(ra), std::move(rb)};
}

/// Reference inner join on unique keys: rows ascend by id bytes, columns are
/// A's features followed by B's.
template <RingWord W>
struct PlainJoin {
  std::vector<std::string> ids;
  Matrix<W> rows;  // |ids| x (m_a + m_b)
};

template <RingWord W>
PlainJoin<W> plaintext_join_oracle(const PartyTable<W>& a, const PartyTable<W>& b) {
  validate_table(a);
  validate_table(b);
  std::unordered_map<std::string, std::size_t> b_pos;
  b_pos.reserve(b.ids.size());
  for (std::size_t j = 0; j < b.ids.size(); ++j) b_pos.emplace(b.ids[j], j);
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> matches;
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    const auto hit = b_pos.find(a.ids[i]);
    if (hit != b_pos.end()) matches.push_back({a.ids[i], {i, hit->second}});
  }
  std::sort(matches.begin(), matches.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  PlainJoin<W> out;
  out.rows = Matrix<W>(matches.size(), a.features.cols + b.features.cols);
  for (std::size_t t = 0; t < matches.size(); ++t) {
    out.ids.push_back(matches[t].first);
    const auto [i, j] = matches[t].second;
    for (std::size_t c = 0; c < a.features.cols; ++c) out.rows.at(t, c) = a.features.at(i, c);
    for (std::size_t c = 0; c < b.features.cols; ++c) out.rows.at(t, a.features.cols + c) = b.features.at(j, c);
  }
  return out;
}

struct VerifyReport {
  bool pass = false;
  std::string detail;
};

/// Reconstructs the two output shares and compares the rows, as a multiset,
/// with the plaintext oracle.
template <RingWord W>
VerifyReport verify_join(const JoinOutputShare<W>& share_a, const JoinOutputShare<W>& share_b,
                         const PartyTable<W>& table_a, const PartyTable<W>& table_b) {
  VerifyReport rep;
  if (!share_a.rows.same_shape(share_b.rows) || share_a.m_a != share_b.m_a || share_a.m_b != share_b.m_b) {
    rep.detail = "share files disagree on shape";
    return rep;
  }
  const Matrix<W> joined = reconstruct(share_a.rows, share_b.rows);
  const PlainJoin<W> oracle = plaintext_join_oracle(table_a, table_b);
  if (!joined.same_shape(oracle.rows)) {
    rep.detail = "reconstructed " + std::to_string(joined.rows) + "x" + std::to_string(joined.cols) +
                 " rows, oracle expects " + std::to_string(oracle.rows.rows) + "x" +
                 std::to_string(oracle.rows.cols);
    return rep;
  }
  std::vector<std::vector<W>> got, want;
  for (std::size_t r = 0; r < joined.rows; ++r) {
    got.emplace_back(joined.row(r).begin(), joined.row(r).end());
    want.emplace_back(oracle.rows.row(r).begin(), oracle.rows.row(r).end());
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  if (got == want) {
    rep.pass = true;
    rep.detail = "reconstructed " + std::to_string(joined.rows) + " rows match the plaintext join";
    return rep;
  }
  for (std::size_t r = 0; r < got.size(); ++r) {
    if (got[r] != want[r]) {
      rep.detail = "row multiset mismatch at sorted position " + std::to_string(r);
      return rep;
    }
  }
  rep.detail = "row multiset mismatch";
  return rep;
}

}  // namespace bifrost
