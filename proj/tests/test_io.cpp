#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

#include "bifrost/rng.hpp"
#include "bifrost/table_io.hpp"

using namespace bifrost;

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    char tmpl[] = "/tmp/bifrost-test-XXXXXX";
    path = mkdtemp(tmpl);
  }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

std::set<std::string> id_set(const std::vector<std::string>& ids) { return {ids.begin(), ids.end()}; }

}  // namespace

TEST_CASE("csv round-trips a table", "[io]") {
  PartyTable<std::uint16_t> t{{"alpha", "beta"}, Matrix<std::uint16_t>(2, 3, {1, 2, 3, 65535, 0, 7})};
  const std::string csv = table_to_csv(t);
  REQUIRE(csv == "id,f1,f2,f3\nalpha,1,2,3\nbeta,65535,0,7\n");
  const auto back = table_from_csv<std::uint16_t>(csv);
  REQUIRE(back.ids == t.ids);
  REQUIRE(back.features == t.features);
}

TEST_CASE("csv tolerates CRLF and skips blank lines", "[io]") {
  const auto t = table_from_csv<std::uint8_t>("id,f1\r\nx,4\r\n\r\ny,9\r\n");
  REQUIRE(t.ids == std::vector<std::string>{"x", "y"});
  REQUIRE(t.features.at(1, 0) == 9);
}

TEST_CASE("featureless tables are expressible", "[io]") {
  const auto t = table_from_csv<std::uint64_t>("id\nonly\n");
  REQUIRE(t.ids.size() == 1);
  REQUIRE(t.features.cols == 0);
  REQUIRE(table_to_csv(t) == "id\nonly\n");
}

TEST_CASE("malformed csv is diagnosed", "[io]") {
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("key,f1\nx,1\n"), IoError);   // wrong header
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("id,f1\nx,1,2\n"), IoError);  // ragged row
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("id,f1\nx\n"), IoError);
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("id,f1\nx,abc\n"), IoError);  // non-numeric
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("id,f1\nx,256\n"), IoError);  // over 2^8-1
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("id,f1\nx,-1\n"), IoError);
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>("id,f1\nx,1\nx,2\n"), DuplicateIdError);
  REQUIRE_THROWS_AS(table_from_csv<std::uint8_t>(""), IoError);
  REQUIRE_NOTHROW(table_from_csv<std::uint8_t>("id,f1\nx,255\n"));
}

TEST_CASE("table files round-trip on disk", "[io]") {
  TempDir dir;
  SeededRng rng(seed_from_string("disk"));
  const auto [ta, tb] = generate_tables<std::uint32_t>(9, 7, 2, 3, 0.5, seed_from_string("g"));
  (void)tb;
  write_table_file(dir.file("t.csv"), ta);
  const auto back = read_table_file<std::uint32_t>(dir.file("t.csv"));
  REQUIRE(back.ids == ta.ids);
  REQUIRE(back.features == ta.features);
  REQUIRE_THROWS_AS(read_table_file<std::uint32_t>(dir.file("absent.csv")), IoError);
}

TEST_CASE("share files round-trip and carry their own width", "[io]") {
  TempDir dir;
  SeededRng rng(seed_from_string("share-file"));
  const JoinOutputShare<std::uint16_t> share{2, 1, random_matrix<std::uint16_t>(5, 3, rng)};
  const std::string path = dir.file("s.bin");
  write_share_file(path, share);
  REQUIRE(read_share_file_ell(path) == 16);
  REQUIRE(read_share_file<std::uint16_t>(path) == share.rows);
  REQUIRE_THROWS_AS(read_share_file<std::uint32_t>(path), IoError);
}

TEST_CASE("an empty join writes a zero-row share file", "[io]") {
  TempDir dir;
  const JoinOutputShare<std::uint64_t> share{1, 1, Matrix<std::uint64_t>(0, 2)};
  write_share_file(dir.file("empty.bin"), share);
  const auto back = read_share_file<std::uint64_t>(dir.file("empty.bin"));
  REQUIRE(back.rows == 0);
  REQUIRE(back.cols == 2);
}

TEST_CASE("corrupted share files are rejected", "[io]") {
  TempDir dir;
  SeededRng rng(seed_from_string("corrupt"));
  const JoinOutputShare<std::uint8_t> share{1, 1, random_matrix<std::uint8_t>(3, 2, rng)};
  const std::string path = dir.file("s.bin");
  write_share_file(path, share);

  auto mutate = [&](std::size_t offset, char value, const std::string& name) {
    std::ifstream in(path, std::ios::binary);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    raw[offset] = value;
    const std::string out = dir.file(name);
    std::ofstream f(out, std::ios::binary);
    f << raw;
    return out;
  };
  REQUIRE_THROWS_AS(read_share_file<std::uint8_t>(mutate(0, 'X', "magic.bin")), IoError);
  REQUIRE_THROWS_AS(read_share_file<std::uint8_t>(mutate(4, 9, "version.bin")), IoError);

  std::ofstream trunc(dir.file("short.bin"), std::ios::binary);
  trunc << "BFRS";
  trunc.close();
  REQUIRE_THROWS_AS(read_share_file<std::uint8_t>(dir.file("short.bin")), IoError);
  REQUIRE_THROWS_AS(read_share_file_ell(dir.file("short.bin")), IoError);
}

TEST_CASE("generated tables plant exactly the requested overlap", "[io]") {
  for (double rho : {0.0, 0.25, 0.5, 0.8, 1.0}) {
    const auto [ta, tb] =
        generate_tables<std::uint64_t>(41, 29, 2, 2, rho, seed_from_string("plant"));
    const auto sa = id_set(ta.ids), sb = id_set(tb.ids);
    REQUIRE(sa.size() == 41);  // ids globally unique within each table
    REQUIRE(sb.size() == 29);
    std::vector<std::string> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    REQUIRE(common.size() == static_cast<std::size_t>(29 * rho + 1e-9));
  }
}

TEST_CASE("generation is reproducible from the seed alone", "[io]") {
  const auto [a1, b1] = generate_tables<std::uint8_t>(12, 12, 1, 1, 0.5, seed_from_string("r"));
  const auto [a2, b2] = generate_tables<std::uint8_t>(12, 12, 1, 1, 0.5, seed_from_string("r"));
  REQUIRE(a1.ids == a2.ids);
  REQUIRE(a1.features == a2.features);
  REQUIRE(b1.ids == b2.ids);
  REQUIRE(b1.features == b2.features);
  const auto [a3, b3] = generate_tables<std::uint8_t>(12, 12, 1, 1, 0.5, seed_from_string("rr"));
  (void)b3;
  REQUIRE_FALSE(a1.ids == a3.ids);
}

TEST_CASE("generation validates its parameters", "[io]") {
  REQUIRE_THROWS_AS(generate_tables<std::uint8_t>(4, 4, 1, 1, 1.5, seed_from_string("x")), Error);
  REQUIRE_THROWS_AS(generate_tables<std::uint8_t>(4, 4, 1, 1, -0.1, seed_from_string("x")), Error);
  REQUIRE_THROWS_AS(generate_tables<std::uint8_t>(0, 4, 1, 1, 0.5, seed_from_string("x")), Error);
}
