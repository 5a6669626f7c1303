#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bifrost/errors.hpp"
#include "bifrost/join.hpp"
#include "bifrost/ring.hpp"
#include "bifrost/rng.hpp"

// File formats: CSV for human-auditable inputs (header id,f1,...,fm; feature
// cells are unsigned decimals below 2^l), a small binary format for share
// outputs (shares are machine artifacts for downstream MPC), and the seeded
// dataset generator behind the gen-data subcommand.

namespace bifrost {

template <RingWord W>
std::string table_to_csv(const PartyTable<W>& t) {
  std::string out = "id";
  for (std::size_t c = 0; c < t.features.cols; ++c) out += ",f" + std::to_string(c + 1);
  out += "\n";
  for (std::size_t r = 0; r < t.ids.size(); ++r) {
    out += t.ids[r];
    for (std::size_t c = 0; c < t.features.cols; ++c)
      out += "," + std::to_string(static_cast<std::uint64_t>(t.features.at(r, c)));
    out += "\n";
  }
  return out;
}

template <RingWord W>
PartyTable<W> table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("table file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "id") throw IoError("table header must start with an id column");
  const std::size_t m = header.size() - 1;

  PartyTable<W> t;
  std::vector<W> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (cells.size() != m + 1)
      throw IoError("row " + std::to_string(rows + 1) + " has " + std::to_string(cells.size()) +
                    " columns, expected " + std::to_string(m + 1));
    if (cells[0].empty() || cells[0].size() > 64)
      throw IoError("row " + std::to_string(rows + 1) + ": ids must be 1 to 64 bytes");
    t.ids.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string& v = cells[c];
      if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw IoError("row " + std::to_string(rows + 1) + ": feature cells must be unsigned decimals");
      errno = 0;
      char* end = nullptr;
      const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
      if (errno != 0 || end != v.c_str() + v.size())
        throw IoError("row " + std::to_string(rows + 1) + ": cannot parse feature value " + v);
      if (parsed > static_cast<unsigned long long>(std::numeric_limits<W>::max()))
        throw IoError("row " + std::to_string(rows + 1) + ": feature value " + v +
                      " does not fit the ring width");
      data.push_back(static_cast<W>(parsed));
    }
    ++rows;
  }
  t.features = Matrix<W>(rows, m, std::move(data));
  validate_id_list(t.ids);
  return t;
}

template <RingWord W>
PartyTable<W> read_table_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open table file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return table_from_csv<W>(buf.str());
}

template <RingWord W>
void write_table_file(const std::string& path, const PartyTable<W>& t) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write table file " + path);
  f << table_to_csv(t);
  if (!f) throw IoError("failed while writing " + path);
}

// Share files: magic "BFRS", version u16 LE, row count u64 LE, column count
// u64 LE, ring width u16 LE, then row-major cells, each ell/8 bytes LE.

inline constexpr char kShareMagic[4] = {'B', 'F', 'R', 'S'};
inline constexpr std::uint16_t kShareFileVersion = 1;

template <RingWord W>
void write_share_file(const std::string& path, const JoinOutputShare<W>& share) {
  std::vector<unsigned char> out;
  out.insert(out.end(), kShareMagic, kShareMagic + 4);
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  };
  auto put64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
  };
  put16(kShareFileVersion);
  put64(share.rows.rows);
  put64(share.rows.cols);
  put16(kRingBits<W>);
  append_matrix_le(out, share.rows);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write share file " + path);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed while writing " + path);
}

/// Ring width recorded in a share file header, for dispatching the word type
/// before the typed read.
inline unsigned read_share_file_ell(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open share file " + path);
  unsigned char head[24];
  f.read(reinterpret_cast<char*>(head), sizeof head);
  if (f.gcount() != sizeof head) throw IoError("share file " + path + " is truncated");
  if (!std::equal(kShareMagic, kShareMagic + 4, head))
    throw IoError("share file " + path + " has a wrong magic number");
  return static_cast<unsigned>(head[22] | (head[23] << 8));
}

template <RingWord W>
Matrix<W> read_share_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open share file " + path);
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (raw.size() < 24) throw IoError("share file " + path + " is truncated");
  if (!std::equal(kShareMagic, kShareMagic + 4, raw.begin()))
    throw IoError("share file " + path + " has a wrong magic number");
  const std::uint16_t version = static_cast<std::uint16_t>(raw[4] | (raw[5] << 8));
  if (version != kShareFileVersion)
    throw IoError("share file " + path + " has unsupported version " + std::to_string(version));
  std::uint64_t c = 0, m = 0;
  for (int i = 7; i >= 0; --i) c = (c << 8) | raw[6 + i];
  for (int i = 7; i >= 0; --i) m = (m << 8) | raw[14 + i];
  const std::uint16_t ell = static_cast<std::uint16_t>(raw[22] | (raw[23] << 8));
  if (ell != kRingBits<W>)
    throw IoError("share file " + path + " uses ring width " + std::to_string(ell) + ", expected " +
                  std::to_string(kRingBits<W>));
  const std::size_t want = c * m * sizeof(W);
  if (raw.size() != 24 + want) throw IoError("share file " + path + " has a malformed body");
  return read_matrix_le<W>(std::span<const unsigned char>(raw).subspan(24), c, m);
}

/// Planted-overlap dataset pair: exactly floor(rho*min(n_a,n_b)) ids appear
/// in both tables at seed-determined positions, every other id is globally
/// unique, and features are uniform ring elements.
template <RingWord W>
std::pair<PartyTable<W>, PartyTable<W>> generate_tables(std::uint64_t n_a, std::uint64_t n_b,
                                                        std::uint64_t m_a, std::uint64_t m_b, double rho,
                                                        const Seed& seed) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error("intersection rate must lie in [0,1]");
  if (n_a == 0 || n_b == 0) throw Error("tables must have at least one row");
  const std::uint64_t n_min = std::min(n_a, n_b);
  const auto c = static_cast<std::uint64_t>(std::floor(rho * static_cast<double>(n_min) + 1e-9));

  SeededRng rng(seed);
  std::unordered_set<std::string> taken;
  auto fresh_id = [&](char prefix) {
    for (;;) {
      char buf[18];
      const std::uint64_t v = rng.u64();
      std::snprintf(buf, sizeof buf, "%c%016llx", prefix, static_cast<unsigned long long>(v));
      std::string id(buf);
      if (taken.insert(id).second) return id;
    }
  };

  std::vector<std::string> shared;
  shared.reserve(c);
  for (std::uint64_t i = 0; i < c; ++i) shared.push_back(fresh_id('s'));

  IdList ids_a = shared;
  for (std::uint64_t i = c; i < n_a; ++i) ids_a.push_back(fresh_id('a'));
  IdList ids_b = shared;
  for (std::uint64_t i = c; i < n_b; ++i) ids_b.push_back(fresh_id('b'));

  ids_a = Permutation::sample(n_a, rng).apply(ids_a);
  ids_b = Permutation::sample(n_b, rng).apply(ids_b);

  PartyTable<W> a{std::move(ids_a), random_matrix<W>(n_a, m_a, rng)};
  PartyTable<W> b{std::move(ids_b), random_matrix<W>(n_b, m_b, rng)};
  return {std::move(a), std::move(b)};
}

}  // namespace bifrost
