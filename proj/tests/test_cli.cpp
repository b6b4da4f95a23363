#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "nam/cli.hpp"
#include "nam/generators.hpp"
#include "nam/lang_io.hpp"
#include "nam/network.hpp"
#include "support.hpp"

using namespace nam;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("nam_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kIdle = "fsm\nstates a\ninit a\n";
const char* kHashWriter = "fsm\nstates a b\ninit a\na w(#) b\n";
const char* kGuarded = "fsm\nstates a b\ninit a\na r(g) b\nb w(#) b\n";

}  // namespace

TEST_CASE("verify reports an unsafe network with a trace") {
  TempDir t;
  auto d = t.file("d.fsm", kIdle), c = t.file("c.fsm", kHashWriter);
  Run r = cli({"verify", "--leader", d, "--contrib", c});
  CHECK(r.code == 1);
  CHECK(r.out.find("unsafe") == 0);
  CHECK(r.out.find("tau: #") != std::string::npos);
  CHECK(r.out.find("c0 w(#)") != std::string::npos);

  Run quiet = cli({"verify", "--leader", d, "--contrib", c, "--no-witness"});
  CHECK(quiet.code == 1);
  CHECK(quiet.out.find("trace:") == std::string::npos);

  for (const char* mode : {"fsm-fsm", "pdm-fsm", "fsm-pdm", "pdm-pdm"})
    CHECK(cli({"verify", "--leader", d, "--contrib", c, "--mode", mode}).code == 1);
  CHECK(cli({"verify", "--leader", d, "--contrib", c, "--strategy", "enumerate"}).code == 1);
}

TEST_CASE("verify reports a safe network") {
  TempDir t;
  auto d = t.file("d.fsm", kIdle), c = t.file("c.fsm", kGuarded);
  Run r = cli({"verify", "--leader", d, "--contrib", c});
  CHECK(r.code == 0);
  CHECK(r.out.find("safe") == 0);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("bounded and oracle subcommands") {
  TempDir t;
  auto d = t.file("d.fsm", kIdle), c = t.file("c.fsm", kHashWriter);
  CHECK(cli({"bounded", "--leader", d, "--contrib", c, "--k", "0"}).code == 0);
  CHECK(cli({"bounded", "--leader", d, "--contrib", c, "--k", "1"}).code == 1);
  CHECK(cli({"oracle", "--leader", d, "--contrib", c, "--engine", "saturate"}).code == 1);
  Run e = cli({"oracle", "--leader", d, "--contrib", c, "--engine", "explore", "--k", "1", "--depth", "2"});
  CHECK(e.code == 1);
  CHECK(e.out.find("c0 w(#)") != std::string::npos);
  CHECK(cli({"oracle", "--leader", d, "--contrib", c, "--engine", "bounded", "--k", "1"}).code == 1);
  auto g = t.file("g.fsm", kGuarded);
  CHECK(cli({"oracle", "--leader", d, "--contrib", g, "--engine", "saturate"}).code == 0);
}

TEST_CASE("report JSON goes to a file or to standard output") {
  TempDir t;
  auto d = t.file("d.fsm", kIdle), c = t.file("c.fsm", kHashWriter);
  Run r = cli({"--report", "-", "verify", "--leader", d, "--contrib", c});
  CHECK(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["status"] == "unsafe");
  CHECK(j["witness"]["tau"] == nlohmann::json::array({"#"}));
  CHECK(j["witness"]["trace"].size() == 1);

  auto path = t.path("report.json");
  Run f = cli({"--report", path, "verify", "--leader", d, "--contrib", c});
  CHECK(f.code == 1);
  auto jf = nlohmann::json::parse(slurp(path));
  CHECK(jf["status"] == "unsafe");
  CHECK(jf.contains("stats"));
}

TEST_CASE("gen3sat output verifies to the satisfiability of the formula") {
  TempDir t;
  std::mt19937_64 rng(71);
  for (int i = 0; i < 12; ++i) {
    CnfFormula f = testkit::random_cnf(rng, 2 + i % 3, 3 + i);
    auto cnf = t.file("f" + std::to_string(i) + ".cnf", print_dimacs(f));
    auto dir = t.path("net" + std::to_string(i));
    REQUIRE(cli({"gen3sat", "--cnf", cnf, "--out-dir", dir}).code == 0);
    Run v = cli({"verify", "--leader", dir + "/leader.fsm", "--contrib", dir + "/contrib.fsm"});
    CHECK(v.code == (testkit::brute_force_sat(f) ? 1 : 0));
    CHECK(parse_dimacs(slurp(dir + "/formula.cnf")).clauses == f.clauses);
  }
  auto dir = t.path("random");
  CHECK(cli({"--seed", "5", "gen3sat", "--vars", "3", "--clauses", "6", "--out-dir", dir}).code == 0);
  CHECK(fs::exists(dir + "/leader.fsm"));
  CHECK(cli({"gen3sat", "--out-dir", dir}).code == 2);
}

TEST_CASE("emitted machines round-trip through the parser") {
  TempDir t;
  auto d = t.file("d.fsm", "fsm\nstates a b c\ninit a\na w(g) b\na w(h) c\nb r(g) a\n");
  auto c = t.file("c.fsm", "fsm\nstates a b c\ninit a\na r(g) b\na r(h) b\nb w(#) c\n");
  auto dir = t.path("det");
  REQUIRE(cli({"determinize", "--leader", d, "--contrib", c, "--out-dir", dir}).code == 0);
  Network net = load_network(dir + "/leader.fsm", dir + "/contrib.fsm");
  CHECK(print_machine(net.leader, net.values) == slurp(dir + "/leader.fsm"));
  CHECK(cli({"verify", "--leader", dir + "/leader.fsm", "--contrib", dir + "/contrib.fsm"}).code ==
        cli({"verify", "--leader", d, "--contrib", c}).code);
}

TEST_CASE("lang subcommands") {
  TempDir t;
  auto g = t.file("g.cfg", "cfg\nterminals a b\naxiom X0\nprod X0 -> A B\nprod A -> a\nprod B -> b\n");
  Run k1 = cli({"lang", "kindex-empty", g, "--k", "1"});
  CHECK(k1.code == 0);
  CHECK(k1.out == "empty\n");
  Run k2 = cli({"lang", "kindex-empty", g, "--k", "2"});
  CHECK(k2.code == 1);
  CHECK(k2.out == "nonempty\n");

  Run e = cli({"lang", "cfg-empty", g});
  CHECK(e.code == 1);
  CHECK(e.out == "nonempty: a b\n");

  auto one = t.file("one.cfg", "cfg\nterminals a\naxiom X0\nprod X0 -> a\n");
  Run s = cli({"lang", "support", one});
  REQUIRE(s.code == 0);
  ValueTable symbols;
  LangFile fa = parse_lang(s.out, symbols);
  REQUIRE(fa.kind == LangFile::Kind::Automaton);
  CHECK(fa.fsa.num_states == 2);

  Run words = cli({"lang", "enumerate", g, "--max-len", "3"});
  CHECK(words.out == "a b\n");

  Run cnf = cli({"lang", "cnf", t.file("s.cfg", "cfg\nterminals a b\naxiom S\nprod S -> a S b\nprod S -> eps\n")});
  REQUIRE(cnf.code == 0);
  auto back = t.file("back.cfg", cnf.out);
  CHECK(cli({"lang", "enumerate", back, "--max-len", "4"}).out == "eps\na a b b\na b\n");

  auto a = t.file("a.fsa", "fsa\nalphabet c\nstates p q\ninit p\nacc q\np c q\n");
  Run bt = cli({"lang", "bowtie", g, a});
  REQUIRE(bt.code == 0);
  auto prod = t.file("prod.cfg", bt.out);
  Run pw = cli({"lang", "enumerate", prod, "--max-len", "3"});
  CHECK(pw.out == "a b c\na c b\nc a b\n");
}

TEST_CASE("errors exit with code 2") {
  TempDir t;
  auto d = t.file("d.fsm", kIdle), c = t.file("c.fsm", kHashWriter);
  auto bad = t.file("bad.fsm", "fsm\nstates a\ninit a\na jump(x) a\n");
  Run p = cli({"verify", "--leader", bad, "--contrib", c});
  CHECK(p.code == 2);
  CHECK(p.err.find("parse error") != std::string::npos);
  CHECK(p.err.find("4") != std::string::npos);
  CHECK(cli({"verify", "--leader", t.path("missing.fsm"), "--contrib", c}).code == 2);
  CHECK(cli({"verify", "--leader", d, "--contrib", c, "--mode", "nonsense"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"lang", "kindex-empty", t.file("bad.cfg", "cfg\nprod X a\n"), "--k", "1"}).code == 2);

  auto loop = t.file("loop.pdm", "pdm\nstates p\nstack Z\ninit p Z\np Z w(x) p Z,Z\n");
  auto reader = t.file("r.fsm", "fsm\nstates a b c d\ninit a\na r(x) b\nb w(y) a\na r(y) c\nc r(x) d\nd w(#) a\n");
  Run cap = cli({"--state-cap", "50", "oracle", "--leader", loop, "--contrib", reader, "--engine", "explore", "--k",
                 "3", "--depth", "40"});
  CHECK(cap.code == 2);
  CHECK(cli({"--help"}).code == 0);
}
