#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bifrost/errors.hpp"
#include "bifrost/group.hpp"
#include "bifrost/perm.hpp"
#include "bifrost/transport.hpp"

// Secure mapped intersection generation (SMIG): a three-flight exchange of
// group-encrypted, shuffled identifiers. Party A learns which positions of
// its dual-shuffled id vector intersect party B's, mapped through A's second
// permutation, and sends that pair list to B. Neither side learns which
// original rows matched, only the mapped positions and the intersection size.

namespace bifrost {

enum class Role : std::uint8_t { kAlice, kBob };

inline const char* role_name(Role r) { return r == Role::kAlice ? "alice" : "bob"; }

using IdList = std::vector<std::string>;

/// Join keys must be unique and 1..64 bytes; ids are opaque bytes, compared
/// verbatim.
inline void validate_id_list(const IdList& ids) {
  std::unordered_map<std::string, std::size_t> seen;
  seen.reserve(ids.size());
  for (const std::string& id : ids) {
    if (id.empty() || id.size() > 64) throw Error("ids must be 1 to 64 bytes");
    if (!seen.emplace(id, 0).second) throw DuplicateIdError("duplicate id: " + id);
  }
}

/// How many encryption layers a shuffled id vector carries.
enum class IdVectorStage : std::uint8_t {
  kOwnKey,   // holder's key only (setup output)
  kDualKey,  // both keys (after re-encryption)
  kPeerKey,  // peer's key only (after stripping one's own)
};

struct EncryptedIdVector {
  std::vector<GroupElement> points;
  IdVectorStage stage = IdVectorStage::kOwnKey;
};

/// Setup at either party: hash ids to the group, encrypt with the party's
/// key, and scatter through its local permutation. out[pi(i)] = key*H(ids[i]).
inline EncryptedIdVector smig_setup(const IdList& ids, const Permutation& pi, const GroupScalar& key) {
  validate_id_list(ids);
  if (pi.size() != ids.size()) throw ShapeError("setup permutation size does not match id count");
  EncryptedIdVector out;
  out.points.resize(ids.size());
  out.stage = IdVectorStage::kOwnKey;
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.points[pi(i)] = scalar_mul(key, hash_to_group(ids[i]));
  return out;
}

/// B's online step: shuffle the received vector with its first permutation
/// and add the second encryption layer. out[pi(k)] = key*in[k].
inline EncryptedIdVector smig_reencrypt_and_shuffle(const EncryptedIdVector& in, const Permutation& pi,
                                                    const GroupScalar& key) {
  if (pi.size() != in.points.size()) throw ShapeError("shuffle permutation size does not match vector");
  EncryptedIdVector out;
  out.points.resize(in.points.size());
  out.stage = IdVectorStage::kDualKey;
  for (std::size_t k = 0; k < in.points.size(); ++k) out.points[pi(k)] = scalar_mul(key, in.points[k]);
  return out;
}

/// A's online step: remove its own layer from the doubly encrypted vector,
/// leaving the peer's layer only.
inline EncryptedIdVector smig_strip_own_key(const EncryptedIdVector& in, const GroupScalar& key) {
  const GroupScalar inv = scalar_inverse(key);
  EncryptedIdVector out;
  out.points.resize(in.points.size());
  out.stage = IdVectorStage::kPeerKey;
  for (std::size_t k = 0; k < in.points.size(); ++k) out.points[k] = scalar_mul(inv, in.points[k]);
  return out;
}

/// One matched pair of mapped positions: a_index into the dual-shuffled a
/// vector, b_index into the mapped b vector.
struct MIPair {
  std::uint64_t a_index = 0;
  std::uint64_t b_index = 0;
  bool operator==(const MIPair&) const = default;
};

using MIPairs = std::vector<MIPair>;

namespace detail {

inline std::string encoding_key(const GroupElement& p) {
  return std::string(reinterpret_cast<const char*>(p.enc.data()), p.enc.size());
}

}  // namespace detail

/// Positional intersection of the two singly encrypted vectors. For every
/// a_side[i] == b_side[j], emits (i, pi_second(j)); output ascends by the
/// first entry. Both vectors must be collision-free (unique join keys).
inline MIPairs build_mipairs(const EncryptedIdVector& a_side, const EncryptedIdVector& b_side,
                             const Permutation& pi_second) {
  if (pi_second.size() != b_side.points.size())
    throw ShapeError("mapping permutation size does not match vector");
  std::unordered_map<std::string, std::uint64_t> b_index;
  b_index.reserve(b_side.points.size());
  for (std::size_t j = 0; j < b_side.points.size(); ++j)
    if (!b_index.emplace(detail::encoding_key(b_side.points[j]), j).second)
      throw DuplicateIdError("duplicate encrypted id encoding in received vector");
  MIPairs pairs;
  std::unordered_map<std::string, std::uint64_t> a_seen;
  a_seen.reserve(a_side.points.size());
  for (std::size_t i = 0; i < a_side.points.size(); ++i) {
    const std::string key = detail::encoding_key(a_side.points[i]);
    if (!a_seen.emplace(key, i).second)
      throw DuplicateIdError("duplicate encrypted id encoding in own vector");
    const auto hit = b_index.find(key);
    if (hit != b_index.end()) pairs.push_back({i, pi_second(hit->second)});
  }
  return pairs;
}

// Wire helpers. Points travel as raw 32-byte encodings; index pairs as two
// 64-bit little-endian integers each.

inline std::vector<unsigned char> points_to_bytes(const EncryptedIdVector& v) {
  std::vector<unsigned char> out;
  out.reserve(v.points.size() * kPointBytes);
  for (const GroupElement& p : v.points) out.insert(out.end(), p.enc.begin(), p.enc.end());
  return out;
}

inline std::vector<GroupElement> points_from_bytes(std::span<const unsigned char> in, std::size_t expected_n) {
  if (in.size() != expected_n * kPointBytes)
    throw TransportError("encrypted id vector length does not match announced row count");
  std::vector<GroupElement> pts;
  pts.reserve(expected_n);
  for (std::size_t i = 0; i < expected_n; ++i) pts.push_back(decode_point(in.subspan(i * kPointBytes, kPointBytes)));
  return pts;
}

inline std::vector<unsigned char> mipairs_to_bytes(const MIPairs& pairs) {
  std::vector<unsigned char> out;
  out.reserve(pairs.size() * 16);
  for (const MIPair& p : pairs) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((p.a_index >> (8 * i)) & 0xff));
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((p.b_index >> (8 * i)) & 0xff));
  }
  return out;
}

/// Parses and validates a pair list: canonical ascending order in the first
/// entry, in-range indices, no repeated position on either side.
inline MIPairs mipairs_from_bytes(std::span<const unsigned char> in, std::uint64_t n_a, std::uint64_t n_b) {
  if (in.size() % 16 != 0) throw TransportError("pair list payload is not a whole number of pairs");
  const std::size_t c = in.size() / 16;
  MIPairs pairs;
  pairs.reserve(c);
  std::vector<bool> b_used(n_b, false);
  for (std::size_t t = 0; t < c; ++t) {
    MIPair p;
    for (int i = 7; i >= 0; --i) p.a_index = (p.a_index << 8) | in[t * 16 + i];
    for (int i = 7; i >= 0; --i) p.b_index = (p.b_index << 8) | in[t * 16 + 8 + i];
    if (p.a_index >= n_a || p.b_index >= n_b) throw TransportError("pair index out of range");
    if (t > 0 && pairs.back().a_index >= p.a_index)
      throw TransportError("pair list is not in canonical ascending order");
    if (b_used[p.b_index]) throw TransportError("pair list repeats a mapped position");
    b_used[p.b_index] = true;
    pairs.push_back(p);
  }
  return pairs;
}

/// Full three-flight exchange. Alice passes her shuffle of her own ids as
/// pi_first and her mapping permutation as pi_second; Bob passes his shuffle
/// of Alice's vector as pi_first and his own setup shuffle as pi_second.
/// Both parties return the same pair list.
inline MIPairs run_smig(Transport& t, Role role, const IdList& ids, const Permutation& pi_first,
                        const Permutation& pi_second, const GroupScalar& key, std::uint64_t n_a,
                        std::uint64_t n_b) {
  if (role == Role::kAlice) {
    const EncryptedIdVector own = smig_setup(ids, pi_first, key);
    t.send(MsgType::kSmigMsg1, points_to_bytes(own));
    t.round_barrier("smig: encrypted ids a->b");

    const Frame f = t.expect(MsgType::kSmigMsg2);
    if (f.payload.size() != (n_a + n_b) * kPointBytes)
      throw TransportError("re-encrypted vectors do not match announced row counts");
    const std::span<const unsigned char> payload(f.payload);
    EncryptedIdVector dual{points_from_bytes(payload.first(n_a * kPointBytes), n_a), IdVectorStage::kDualKey};
    EncryptedIdVector peer{points_from_bytes(payload.subspan(n_a * kPointBytes), n_b), IdVectorStage::kOwnKey};
    t.round_barrier("smig: re-encrypted vectors b->a");

    const EncryptedIdVector stripped = smig_strip_own_key(dual, key);
    const MIPairs pairs = build_mipairs(stripped, peer, pi_second);
    t.send(MsgType::kSmigMsg3, mipairs_to_bytes(pairs));
    t.round_barrier("smig: mapped pairs a->b");
    return pairs;
  }

  const Frame f1 = t.expect(MsgType::kSmigMsg1);
  EncryptedIdVector from_a{points_from_bytes(f1.payload, n_a), IdVectorStage::kOwnKey};
  t.round_barrier("smig: encrypted ids a->b");

  const EncryptedIdVector dual = smig_reencrypt_and_shuffle(from_a, pi_first, key);
  const EncryptedIdVector own = smig_setup(ids, pi_second, key);
  std::vector<unsigned char> msg2 = points_to_bytes(dual);
  const std::vector<unsigned char> own_bytes = points_to_bytes(own);
  msg2.insert(msg2.end(), own_bytes.begin(), own_bytes.end());
  t.send(MsgType::kSmigMsg2, msg2);
  t.round_barrier("smig: re-encrypted vectors b->a");

  const Frame f3 = t.expect(MsgType::kSmigMsg3);
  const MIPairs pairs = mipairs_from_bytes(f3.payload, n_a, n_b);
  t.round_barrier("smig: mapped pairs a->b");
  return pairs;
}

}  // namespace bifrost
