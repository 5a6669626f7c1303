// Command-line surface: dataset generation, protocol runs (single party over
// TCP or both parties in-process), share verification, and cost reporting.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "bifrost/cost.hpp"
#include "bifrost/errors.hpp"
#include "bifrost/join.hpp"
#include "bifrost/log.hpp"
#include "bifrost/rng.hpp"
#include "bifrost/table_io.hpp"
#include "bifrost/tcp.hpp"

namespace {

using namespace bifrost;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitParamMismatch = 2;
constexpr int kExitIo = 3;
constexpr int kExitProtocol = 4;

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParamMismatchError& e) {
    log::error(std::string("parameter mismatch: ") + e.what());
    return kExitParamMismatch;
  } catch (const IoError& e) {
    log::error(std::string("i/o error: ") + e.what());
    return kExitIo;
  } catch (const DuplicateIdError& e) {
    log::error(std::string("input error: ") + e.what());
    return kExitIo;
  } catch (const Error& e) {
    log::error(std::string("protocol error: ") + e.what());
    return kExitProtocol;
  } catch (const std::exception& e) {
    log::error(std::string("protocol error: ") + e.what());
    return kExitProtocol;
  }
}

/// Calls fn<W>() for the word type matching the ring width.
template <class Fn>
int with_ring_width(unsigned ell, Fn&& fn) {
  switch (ell) {
    case 8:
      return fn.template operator()<std::uint8_t>();
    case 16:
      return fn.template operator()<std::uint16_t>();
    case 32:
      return fn.template operator()<std::uint32_t>();
    case 64:
      return fn.template operator()<std::uint64_t>();
    default:
      throw IoError("ring width must be one of 8, 16, 32, 64");
  }
}

std::optional<Seed> seed_of(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return seed_from_string(s);
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << body;
  if (!f) throw IoError("failed while writing " + path);
}

struct GenArgs {
  std::uint64_t n_a = 0, n_b = 0, m_a = 0, m_b = 0;
  double rho = 0.0;
  unsigned ell = 64;
  std::string seed, out_a, out_b;
};

int cmd_gen_data(const GenArgs& a) {
  return with_ring_width(a.ell, [&]<RingWord W>() {
    auto [ta, tb] = generate_tables<W>(a.n_a, a.n_b, a.m_a, a.m_b, a.rho, seed_from_string(a.seed));
    write_table_file(a.out_a, ta);
    write_table_file(a.out_b, tb);
    std::printf("wrote %s (%zu rows) and %s (%zu rows)\n", a.out_a.c_str(), ta.ids.size(),
                a.out_b.c_str(), tb.ids.size());
    return kExitOk;
  });
}

struct RunArgs {
  std::string role;
  std::string table, table_a, table_b;
  std::uint16_t listen_port = 0;
  std::string connect;
  std::string seed;
  std::string out_share, out_share_a, out_share_b;
  std::string stats_out, stats_out_a, stats_out_b;
  unsigned ell = 64;
};

template <RingWord W>
int run_party(const RunArgs& a) {
  const Role role = a.role == "alice" ? Role::kAlice : Role::kBob;
  const PartyTable<W> table = read_table_file<W>(a.table);

  std::unique_ptr<TcpTransport> t;
  if (role == Role::kAlice) {
    TcpListener listener(a.listen_port);
    log::info("listening on port " + std::to_string(listener.port()));
    t = listener.accept_one();
  } else {
    const auto colon = a.connect.rfind(':');
    if (colon == std::string::npos) throw IoError("--connect expects HOST:PORT");
    const std::string host = a.connect.substr(0, colon);
    const int port = std::stoi(a.connect.substr(colon + 1));
    if (port <= 0 || port > 65535) throw IoError("--connect port out of range");
    t = TcpTransport::connect(host, static_cast<std::uint16_t>(port));
  }

  const JoinResult<W> res = run_join<W>(*t, role, table, seed_of(a.seed));
  write_share_file(a.out_share, res.share);
  if (!a.stats_out.empty()) write_text_file(a.stats_out, to_flat_json(res.stats));
  std::printf("%s: joined %llu rows, %llu online payload bytes, %llu online rounds\n",
              role_name(role), (unsigned long long)res.stats.c,
              (unsigned long long)res.stats.online_payload_bytes,
              (unsigned long long)res.stats.online_rounds);
  return kExitOk;
}

template <RingWord W>
int run_loopback(const RunArgs& a) {
  const PartyTable<W> ta = read_table_file<W>(a.table_a);
  const PartyTable<W> tb = read_table_file<W>(a.table_b);
  auto [ra, rb] = run_join_loopback<W>(ta, tb, seed_of(a.seed));
  write_share_file(a.out_share_a, ra.share);
  write_share_file(a.out_share_b, rb.share);
  if (!a.stats_out_a.empty()) write_text_file(a.stats_out_a, to_flat_json(ra.stats));
  if (!a.stats_out_b.empty()) write_text_file(a.stats_out_b, to_flat_json(rb.stats));
  std::printf("loopback: joined %llu rows, %llu online payload bytes, %llu online rounds\n",
              (unsigned long long)ra.stats.c, (unsigned long long)ra.stats.online_payload_bytes,
              (unsigned long long)ra.stats.online_rounds);
  return kExitOk;
}

int cmd_run(const RunArgs& a) {
  return with_ring_width(a.ell, [&]<RingWord W>() {
    if (a.role == "loopback") return run_loopback<W>(a);
    return run_party<W>(a);
  });
}

struct VerifyArgs {
  std::string share_a, share_b, table_a, table_b;
};

int cmd_verify(const VerifyArgs& a) {
  const unsigned ell = read_share_file_ell(a.share_a);
  return with_ring_width(ell, [&]<RingWord W>() {
    const PartyTable<W> ta = read_table_file<W>(a.table_a);
    const PartyTable<W> tb = read_table_file<W>(a.table_b);
    const Matrix<W> sa = read_share_file<W>(a.share_a);
    const Matrix<W> sb = read_share_file<W>(a.share_b);
    const std::uint64_t m_a = ta.features.cols, m_b = tb.features.cols;
    if (sa.cols != m_a + m_b || sb.cols != m_a + m_b) {
      std::printf("FAIL: share files carry %zu columns, tables imply %llu\n", sa.cols,
                  (unsigned long long)(m_a + m_b));
      return kExitVerifyFail;
    }
    const JoinOutputShare<W> share_a{m_a, m_b, sa};
    const JoinOutputShare<W> share_b{m_a, m_b, sb};
    const VerifyReport rep = verify_join(share_a, share_b, ta, tb);
    if (rep.pass) {
      std::printf("PASS: shares reconstruct the %zu-row plaintext join\n", sa.rows);
      return kExitOk;
    }
    std::printf("FAIL: %s\n", rep.detail.c_str());
    return kExitVerifyFail;
  });
}

struct CostArgs {
  std::uint64_t n = 0, m_a = 0, m_b = 0, c = 0;
  unsigned ell = 64, sigma = 256;
  bool packed_idx = false;
};

int cmd_cost(const CostArgs& a) {
  CostParams p;
  p.n = a.n;
  p.m_a = a.m_a;
  p.m_b = a.m_b;
  p.c = a.c;
  p.ell = a.ell;
  p.sigma = a.sigma;
  const IndexWidth iw = a.packed_idx ? IndexWidth::kPacked : IndexWidth::kWire;
  const std::uint64_t smig = smig_online_bits(p, iw);
  const std::uint64_t misfa = misfa_online_bits(p);
  const std::uint64_t total = bifrost_online_bits(p, iw);
  const std::uint64_t baseline = iprivjoin_online_bits_estimate(p);
  std::printf("n=%llu m_a=%llu m_b=%llu c=%llu ell=%u sigma=%u index_bits=%llu\n",
              (unsigned long long)p.n, (unsigned long long)p.m_a, (unsigned long long)p.m_b,
              (unsigned long long)p.c, a.ell, a.sigma,
              (unsigned long long)(a.packed_idx ? ceil_log2(p.n) : 64));
  std::printf("smig_online_bits=%llu\n", (unsigned long long)smig);
  std::printf("misfa_online_bits=%llu\n", (unsigned long long)misfa);
  std::printf("total_online_bits=%llu\n", (unsigned long long)total);
  std::printf("total_online_bytes=%llu\n", (unsigned long long)((total + 7) / 8));
  std::printf("expected_wire_payload_bytes=%llu\n",
              (unsigned long long)expected_wire_payload_bytes(p.n, p.n, p.m_a, p.m_b, p.ell, p.c));
  std::printf("iprivjoin_online_bits_estimate=%llu\n", (unsigned long long)baseline);
  std::printf("ratio_vs_iprivjoin=%.6f\n", static_cast<double>(total) / static_cast<double>(baseline));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  sodium_ready();
  CLI::App app{"two-party secure data join over additive shares"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a planted-overlap table pair");
  gen_cmd->add_option("--n-a", gen.n_a, "rows in table A")->required();
  gen_cmd->add_option("--n-b", gen.n_b, "rows in table B")->required();
  gen_cmd->add_option("--m-a", gen.m_a, "feature columns in table A")->required();
  gen_cmd->add_option("--m-b", gen.m_b, "feature columns in table B")->required();
  gen_cmd->add_option("--rho", gen.rho, "intersection rate against min(n_a, n_b)")->required();
  gen_cmd->add_option("--seed", gen.seed, "seed string; same seed reproduces the files")->required();
  gen_cmd->add_option("--out-a", gen.out_a, "output CSV for table A")->required();
  gen_cmd->add_option("--out-b", gen.out_b, "output CSV for table B")->required();
  gen_cmd->add_option("--ell", gen.ell, "ring width in bits")->check(CLI::IsMember({8, 16, 32, 64}));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run the join protocol");
  run_cmd->add_option("--role", run.role, "alice | bob | loopback")
      ->required()
      ->check(CLI::IsMember({"alice", "bob", "loopback"}));
  run_cmd->add_option("--table", run.table, "this party's table (alice/bob)");
  run_cmd->add_option("--table-a", run.table_a, "table A (loopback)");
  run_cmd->add_option("--table-b", run.table_b, "table B (loopback)");
  run_cmd->add_option("--listen", run.listen_port, "listening port (alice); 0 picks one");
  run_cmd->add_option("--connect", run.connect, "HOST:PORT of the listening peer (bob)");
  run_cmd->add_option("--seed", run.seed, "seed string; empty uses the OS entropy source");
  run_cmd->add_option("--out-share", run.out_share, "output share file (alice/bob)");
  run_cmd->add_option("--out-share-a", run.out_share_a, "output share file for A (loopback)");
  run_cmd->add_option("--out-share-b", run.out_share_b, "output share file for B (loopback)");
  run_cmd->add_option("--stats-out", run.stats_out, "stats record path (alice/bob)");
  run_cmd->add_option("--stats-out-a", run.stats_out_a, "stats record path for A (loopback)");
  run_cmd->add_option("--stats-out-b", run.stats_out_b, "stats record path for B (loopback)");
  run_cmd->add_option("--ell", run.ell, "ring width in bits")->check(CLI::IsMember({8, 16, 32, 64}));

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "reconstruct two share files and check them");
  ver_cmd->add_option("--share-a", ver.share_a, "share file from party A")->required();
  ver_cmd->add_option("--share-b", ver.share_b, "share file from party B")->required();
  ver_cmd->add_option("--table-a", ver.table_a, "plaintext table A")->required();
  ver_cmd->add_option("--table-b", ver.table_b, "plaintext table B")->required();

  CostArgs cost;
  auto* cost_cmd = app.add_subcommand("cost", "print the online communication breakdown");
  cost_cmd->add_option("--n", cost.n, "rows per table")->required();
  cost_cmd->add_option("--m-a", cost.m_a, "feature columns in table A")->required();
  cost_cmd->add_option("--m-b", cost.m_b, "feature columns in table B")->required();
  cost_cmd->add_option("--c", cost.c, "intersection size")->required();
  cost_cmd->add_option("--ell", cost.ell, "ring width in bits");
  cost_cmd->add_option("--sigma", cost.sigma, "group element width in bits");
  cost_cmd->add_flag("--packed-idx", cost.packed_idx, "count indices at ceil(log2 n) bits");

  CLI11_PARSE(app, argc, argv);

  if (gen_cmd->parsed()) return guarded([&] { return cmd_gen_data(gen); });
  if (run_cmd->parsed()) {
    return guarded([&] {
      if (run.role == "loopback") {
        if (run.table_a.empty() || run.table_b.empty() || run.out_share_a.empty() ||
            run.out_share_b.empty())
          throw IoError("loopback needs --table-a, --table-b, --out-share-a, --out-share-b");
      } else {
        if (run.table.empty() || run.out_share.empty())
          throw IoError("alice/bob need --table and --out-share");
        if (run.role == "bob" && run.connect.empty()) throw IoError("bob needs --connect");
      }
      return cmd_run(run);
    });
  }
  if (ver_cmd->parsed()) return guarded([&] { return cmd_verify(ver); });
  if (cost_cmd->parsed()) return guarded([&] { return cmd_cost(cost); });
  return kExitOk;
}
