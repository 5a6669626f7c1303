#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "bifrost/errors.hpp"
#include "bifrost/ring.hpp"
#include "bifrost/rng.hpp"

namespace bifrost {

/// A bijection on {0,...,n-1}. mapping()[i] is the image of i, and applying
/// the permutation to a vector scatters: out[map(i)] = in[i].
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::uint64_t> mapping) : map_(std::move(mapping)) {
    std::vector<bool> seen(map_.size(), false);
    for (std::uint64_t v : map_) {
      if (v >= map_.size() || seen[v]) throw Error("permutation mapping is not a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::uint64_t> m(n);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
  }

  /// Uniformly random bijection (Fisher-Yates over the rng).
  static Permutation sample(std::size_t n, RandomSource& rng) {
    if (n == 0) throw Error("cannot sample a permutation on zero elements");
    std::vector<std::uint64_t> m(n);
    std::iota(m.begin(), m.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::uint64_t j = rng.uniform_below(i + 1);
      std::swap(m[i], m[j]);
    }
    return Permutation(std::move(m));
  }

  std::size_t size() const { return map_.size(); }
  std::uint64_t operator()(std::size_t i) const { return map_[i]; }
  const std::vector<std::uint64_t>& mapping() const { return map_; }

  Permutation inverse() const {
    std::vector<std::uint64_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
    return Permutation(std::move(inv));
  }

  template <class T>
  std::vector<T> apply(const std::vector<T>& in) const {
    if (in.size() != map_.size()) throw ShapeError("permutation size does not match vector length");
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[map_[i]] = in[i];
    return out;
  }

  /// Permutes matrix rows: row i of the input lands at row map(i).
  template <RingWord W>
  Matrix<W> apply_rows(const Matrix<W>& in) const {
    if (in.rows != map_.size()) throw ShapeError("permutation size does not match row count");
    Matrix<W> out(in.rows, in.cols);
    for (std::size_t i = 0; i < in.rows; ++i)
      for (std::size_t c = 0; c < in.cols; ++c) out.at(map_[i], c) = in.at(i, c);
    return out;
  }

  bool operator==(const Permutation& o) const = default;

 private:
  std::vector<std::uint64_t> map_;
};

/// Composition "first, then second": apply(compose(f,s), x) == apply(s, apply(f, x)).
inline Permutation compose(const Permutation& first, const Permutation& second) {
  if (first.size() != second.size()) throw ShapeError("cannot compose permutations of different sizes");
  std::vector<std::uint64_t> m(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) m[i] = second(first(i));
  return Permutation(std::move(m));
}

}  // namespace bifrost
