#pragma once

#include <sodium.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

#include "bifrost/errors.hpp"

namespace bifrost {

inline void sodium_ready() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error("libsodium initialization failed");
}

using Seed = std::array<unsigned char, 32>;

/// Source of random bytes. Implementations are either cryptographically
/// strong (OsRng, SeededRng) or scripted replays for tests.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(void* out, std::size_t len) = 0;

  std::uint64_t u64() {
    unsigned char b[8];
    fill(b, sizeof b);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  /// Uniform value in [0, bound); rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw Error("uniform_below: empty range");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
      const std::uint64_t v = u64();
      if (v < limit) return v % bound;
    }
  }
};

/// Deterministic ChaCha20 keystream expansion of a 32-byte seed.
class SeededRng final : public RandomSource {
 public:
  explicit SeededRng(const Seed& seed) : seed_(seed) { sodium_ready(); }

  void fill(void* out, std::size_t len) override {
    auto* dst = static_cast<unsigned char*>(out);
    while (len > 0) {
      if (pos_ == buf_.size()) refill();
      const std::size_t take = std::min(len, buf_.size() - pos_);
      std::memcpy(dst, buf_.data() + pos_, take);
      pos_ += take;
      dst += take;
      len -= take;
    }
  }

 private:
  void refill() {
    unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
    for (int i = 0; i < 8; ++i) nonce[i] = static_cast<unsigned char>((block_ >> (8 * i)) & 0xff);
    crypto_stream_chacha20(buf_.data(), buf_.size(), nonce, seed_.data());
    ++block_;
    pos_ = 0;
  }

  Seed seed_;
  std::uint64_t block_ = 0;
  std::array<unsigned char, 4096> buf_{};
  std::size_t pos_ = buf_.size();
};

/// Operating-system CSPRNG.
class OsRng final : public RandomSource {
 public:
  OsRng() { sodium_ready(); }
  void fill(void* out, std::size_t len) override { randombytes_buf(out, len); }
};

/// Replays a fixed byte string, for injecting pinned values in tests.
class ScriptedRng final : public RandomSource {
 public:
  explicit ScriptedRng(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  void fill(void* out, std::size_t len) override {
    if (len > bytes_.size() - pos_) throw Error("scripted random source exhausted");
    std::memcpy(out, bytes_.data() + pos_, len);
    pos_ += len;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

/// Derives an independent subseed for the given label.
inline Seed derive_seed(const Seed& seed, std::string_view label) {
  sodium_ready();
  Seed out{};
  crypto_generichash(out.data(), out.size(),
                     reinterpret_cast<const unsigned char*>(label.data()), label.size(),
                     seed.data(), seed.size());
  return out;
}

/// Maps an arbitrary seed string (CLI flag) onto a 32-byte seed.
inline Seed seed_from_string(std::string_view s) {
  sodium_ready();
  Seed out{};
  crypto_generichash(out.data(), out.size(),
                     reinterpret_cast<const unsigned char*>(s.data()), s.size(),
                     nullptr, 0);
  return out;
}

}  // namespace bifrost
