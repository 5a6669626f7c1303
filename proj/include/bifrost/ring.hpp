#pragma once

#include <concepts>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bifrost/errors.hpp"
#include "bifrost/rng.hpp"

// Arithmetic over the ring Z_2^l, where l = 8*sizeof(Word) is one of
// 8, 16, 32, 64. Unsigned machine words give the wrapping add/sub for free;
// a matrix of words is the only aggregate the protocol needs.

namespace bifrost {

template <class W>
concept RingWord = std::same_as<W, std::uint8_t> || std::same_as<W, std::uint16_t> ||
                   std::same_as<W, std::uint32_t> || std::same_as<W, std::uint64_t>;

template <RingWord W>
inline constexpr unsigned kRingBits = 8 * sizeof(W);

/// Row-major matrix of ring elements. Also used for a single party's
/// additive share (same shape, share semantics).
template <RingWord W>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<W> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, W{0}) {}
  Matrix(std::size_t r, std::size_t c, std::vector<W> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != rows * cols) throw ShapeError("matrix data length does not match shape");
  }

  W& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const W& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const W> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<W> row(std::size_t r) { return {data.data() + r * cols, cols}; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Matrix& o) const = default;
};

template <RingWord W>
Matrix<W> add(const Matrix<W>& a, const Matrix<W>& b) {
  if (!a.same_shape(b)) throw ShapeError("matrix add: shape mismatch");
  Matrix<W> out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = static_cast<W>(out.data[i] + b.data[i]);
  return out;
}

template <RingWord W>
Matrix<W> sub(const Matrix<W>& a, const Matrix<W>& b) {
  if (!a.same_shape(b)) throw ShapeError("matrix sub: shape mismatch");
  Matrix<W> out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = static_cast<W>(out.data[i] - b.data[i]);
  return out;
}

/// Uniformly random matrix.
template <RingWord W>
Matrix<W> random_matrix(std::size_t rows, std::size_t cols, RandomSource& rng) {
  Matrix<W> out(rows, cols);
  std::vector<unsigned char> raw(out.data.size() * sizeof(W));
  rng.fill(raw.data(), raw.size());
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    W v = 0;
    for (unsigned b = 0; b < sizeof(W); ++b)
      v = static_cast<W>(v | (static_cast<W>(raw[i * sizeof(W) + b]) << (8 * b)));
    out.data[i] = v;
  }
  return out;
}

/// Splits x into two additive shares; the first share is drawn uniformly
/// from rng, the second is x minus it.
template <RingWord W>
std::pair<Matrix<W>, Matrix<W>> share_matrix(const Matrix<W>& x, RandomSource& rng) {
  Matrix<W> a = random_matrix<W>(x.rows, x.cols, rng);
  Matrix<W> b = sub(x, a);
  return {std::move(a), std::move(b)};
}

/// Elementwise wrapping sum of the two shares.
template <RingWord W>
Matrix<W> reconstruct(const Matrix<W>& a, const Matrix<W>& b) {
  return add(a, b);
}

// Little-endian (de)serialization: each element as sizeof(W) bytes, row-major.

template <RingWord W>
void append_matrix_le(std::vector<unsigned char>& out, const Matrix<W>& m) {
  out.reserve(out.size() + m.data.size() * sizeof(W));
  for (W v : m.data)
    for (unsigned b = 0; b < sizeof(W); ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
}

template <RingWord W>
Matrix<W> read_matrix_le(std::span<const unsigned char> in, std::size_t rows, std::size_t cols) {
  if (in.size() != rows * cols * sizeof(W)) throw ShapeError("matrix bytes do not match announced shape");
  Matrix<W> m(rows, cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    W v = 0;
    for (unsigned b = 0; b < sizeof(W); ++b)
      v = static_cast<W>(v | (static_cast<W>(in[i * sizeof(W) + b]) << (8 * b)));
    m.data[i] = v;
  }
  return m;
}

}  // namespace bifrost
