#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bifrost/errors.hpp"
#include "bifrost/log.hpp"

// Framed duplex transport with byte/message/round accounting. Wire format of
// one frame: [msg_type: 1 byte][payload_len: 8 bytes LE][payload]. The
// accounting here is the authoritative source for all traffic statistics;
// header bytes are tracked separately from payload bytes so payload formulas
// can be checked exactly.

namespace bifrost {

enum class MsgType : std::uint8_t {
  kHello = 0x01,
  kOfflinePerm = 0x10,    // receiver permutation, party -> dealer
  kOfflineShare = 0x11,   // correlation material, dealer -> party
  kSmigMsg1 = 0x21,       // n_a encrypted ids, a -> b
  kSmigMsg2 = 0x22,       // n_a + n_b encrypted ids, b -> a
  kSmigMsg3 = 0x23,       // c index pairs, a -> b
  kMisfaMaskedA = 0x31,   // masked feature rows, a -> b
  kMisfaMaskedB = 0x32,   // masked feature rows, b -> a
};

inline bool is_registered_msg_type(std::uint8_t t) {
  switch (static_cast<MsgType>(t)) {
    case MsgType::kHello:
    case MsgType::kOfflinePerm:
    case MsgType::kOfflineShare:
    case MsgType::kSmigMsg1:
    case MsgType::kSmigMsg2:
    case MsgType::kSmigMsg3:
    case MsgType::kMisfaMaskedA:
    case MsgType::kMisfaMaskedB:
      return true;
  }
  return false;
}

inline const char* msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::kHello: return "HELLO";
    case MsgType::kOfflinePerm: return "OFFLINE_PERM";
    case MsgType::kOfflineShare: return "OFFLINE_SHARE";
    case MsgType::kSmigMsg1: return "SMIG_MSG1";
    case MsgType::kSmigMsg2: return "SMIG_MSG2";
    case MsgType::kSmigMsg3: return "SMIG_MSG3";
    case MsgType::kMisfaMaskedA: return "MISFA_MASKED_A";
    case MsgType::kMisfaMaskedB: return "MISFA_MASKED_B";
  }
  return "UNKNOWN";
}

struct Frame {
  MsgType type{};
  std::vector<unsigned char> payload;
};

inline constexpr std::size_t kFrameHeaderBytes = 9;
inline constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 32;

enum class Phase : int { kHandshake = 0, kOffline = 1, kSmig = 2, kMisfa = 3 };
inline constexpr int kPhaseCount = 4;

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kHandshake: return "handshake";
    case Phase::kOffline: return "offline";
    case Phase::kSmig: return "smig";
    case Phase::kMisfa: return "misfa";
  }
  return "?";
}

struct PhaseStats {
  std::uint64_t payload_bytes_sent = 0;
  std::uint64_t payload_bytes_received = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
  std::uint64_t rounds = 0;
  double wall_ms = 0.0;
};

/// Per-phase traffic counters plus per-message-type frame counts. One
/// instance per transport endpoint; updated from the send and receive lanes
/// under a lock.
class Accounting {
 public:
  void set_phase(Phase p) {
    std::lock_guard<std::mutex> g(m_);
    stamp_locked();
    phase_ = p;
  }

  Phase phase() const {
    std::lock_guard<std::mutex> g(m_);
    return phase_;
  }

  void on_send(MsgType t, std::size_t payload_len) {
    std::lock_guard<std::mutex> g(m_);
    auto& ps = phases_[static_cast<int>(phase_)];
    ps.payload_bytes_sent += payload_len;
    ps.frames_sent += 1;
    sent_by_type_[static_cast<std::uint8_t>(t)] += 1;
  }

  void on_receive(MsgType t, std::size_t payload_len) {
    std::lock_guard<std::mutex> g(m_);
    auto& ps = phases_[static_cast<int>(phase_)];
    ps.payload_bytes_received += payload_len;
    ps.frames_received += 1;
    received_by_type_[static_cast<std::uint8_t>(t)] += 1;
  }

  /// Marks the completion of one protocol round in the current phase. A round
  /// is a maximal set of flights needing no intervening wait; the two
  /// concurrent feature flights therefore count once, via a single barrier.
  void round_barrier(const std::string& label) {
    std::lock_guard<std::mutex> g(m_);
    phases_[static_cast<int>(phase_)].rounds += 1;
    log::debug("round barrier: " + label);
  }

  /// Folds the elapsed time of the still-open phase into its wall clock.
  void finish() {
    std::lock_guard<std::mutex> g(m_);
    stamp_locked();
  }

  PhaseStats phase_stats(Phase p) const {
    std::lock_guard<std::mutex> g(m_);
    return phases_[static_cast<int>(p)];
  }

  std::uint64_t sent_count(MsgType t) const {
    std::lock_guard<std::mutex> g(m_);
    return sent_by_type_[static_cast<std::uint8_t>(t)];
  }

  std::uint64_t received_count(MsgType t) const {
    std::lock_guard<std::mutex> g(m_);
    return received_by_type_[static_cast<std::uint8_t>(t)];
  }

  /// Has this endpoint seen the given message type in either direction?
  std::uint64_t total_count(MsgType t) const {
    std::lock_guard<std::mutex> g(m_);
    return sent_by_type_[static_cast<std::uint8_t>(t)] + received_by_type_[static_cast<std::uint8_t>(t)];
  }

  /// Payload bytes of the online phases (intersection mapping plus feature
  /// alignment), both directions. Handshake and dealer material are excluded.
  std::uint64_t online_payload_bytes() const {
    std::lock_guard<std::mutex> g(m_);
    std::uint64_t total = 0;
    for (Phase p : {Phase::kSmig, Phase::kMisfa}) {
      const auto& ps = phases_[static_cast<int>(p)];
      total += ps.payload_bytes_sent + ps.payload_bytes_received;
    }
    return total;
  }

  std::uint64_t online_rounds() const {
    std::lock_guard<std::mutex> g(m_);
    return phases_[static_cast<int>(Phase::kSmig)].rounds +
           phases_[static_cast<int>(Phase::kMisfa)].rounds;
  }

 private:
  void stamp_locked() {
    const auto now = std::chrono::steady_clock::now();
    phases_[static_cast<int>(phase_)].wall_ms +=
        std::chrono::duration<double, std::milli>(now - phase_start_).count();
    phase_start_ = now;
  }

  mutable std::mutex m_;
  Phase phase_ = Phase::kHandshake;
  std::chrono::steady_clock::time_point phase_start_ = std::chrono::steady_clock::now();
  PhaseStats phases_[kPhaseCount];
  std::uint64_t sent_by_type_[256] = {};
  std::uint64_t received_by_type_[256] = {};
};

/// Reliable, in-order framed channel. One sending thread and one receiving
/// thread may use the same endpoint concurrently; that full-duplex contract
/// is what lets the feature-alignment exchange complete in a single round.
class Transport {
 public:
  virtual ~Transport() = default;

  void send(MsgType t, std::span<const unsigned char> payload) {
    if (payload.size() >= kMaxPayloadBytes) throw TransportError("frame payload too large");
    Frame f{t, std::vector<unsigned char>(payload.begin(), payload.end())};
    send_frame(std::move(f));
    acct_.on_send(t, payload.size());
    log::debug(std::string("sent ") + msg_type_name(t) + " (" + std::to_string(payload.size()) + " bytes)");
  }

  Frame recv() {
    Frame f = recv_frame();
    if (!is_registered_msg_type(static_cast<std::uint8_t>(f.type)))
      throw TransportError("received unknown message type");
    acct_.on_receive(f.type, f.payload.size());
    log::debug(std::string("received ") + msg_type_name(f.type) + " (" + std::to_string(f.payload.size()) + " bytes)");
    return f;
  }

  Frame expect(MsgType t) {
    Frame f = recv();
    if (f.type != t)
      throw TransportError(std::string("expected ") + msg_type_name(t) + " but received " +
                           msg_type_name(f.type));
    return f;
  }

  void round_barrier(const std::string& label) { acct_.round_barrier(label); }

  Accounting& accounting() { return acct_; }
  const Accounting& accounting() const { return acct_; }

 protected:
  virtual void send_frame(Frame f) = 0;
  virtual Frame recv_frame() = 0;

 private:
  Accounting acct_;
};

namespace detail {

struct FrameQueue {
  std::mutex m;
  std::condition_variable cv;
  std::deque<Frame> q;
  bool closed = false;

  void push(Frame f) {
    {
      std::lock_guard<std::mutex> g(m);
      if (closed) throw TransportError("channel closed");
      q.push_back(std::move(f));
    }
    cv.notify_one();
  }

  Frame pop() {
    std::unique_lock<std::mutex> g(m);
    cv.wait(g, [&] { return !q.empty() || closed; });
    if (q.empty()) throw TransportError("channel closed by peer");
    Frame f = std::move(q.front());
    q.pop_front();
    return f;
  }

  void close() {
    {
      std::lock_guard<std::mutex> g(m);
      closed = true;
    }
    cv.notify_all();
  }
};

}  // namespace detail

/// In-process endpoint over a pair of frame queues; the loopback realization
/// used by tests and the loopback CLI mode.
class InProcTransport final : public Transport {
 public:
  InProcTransport(std::shared_ptr<detail::FrameQueue> out, std::shared_ptr<detail::FrameQueue> in)
      : out_(std::move(out)), in_(std::move(in)) {}

  ~InProcTransport() override {
    out_->close();
    in_->close();
  }

 protected:
  void send_frame(Frame f) override { out_->push(std::move(f)); }
  Frame recv_frame() override { return in_->pop(); }

 private:
  std::shared_ptr<detail::FrameQueue> out_;
  std::shared_ptr<detail::FrameQueue> in_;
};

/// Connected pair of in-process endpoints.
inline std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair() {
  auto ab = std::make_shared<detail::FrameQueue>();
  auto ba = std::make_shared<detail::FrameQueue>();
  return {std::make_unique<InProcTransport>(ab, ba), std::make_unique<InProcTransport>(ba, ab)};
}

}  // namespace bifrost
