#include "nam/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nam/generators.hpp"
#include "nam/lang_io.hpp"
#include "nam/verifier.hpp"

namespace nam {

namespace {

struct Common {
  std::string report;
  std::size_t state_cap = kDefaultStateCap;
  std::size_t guess_cap = 1'000'000;
  std::size_t support_cap = kDefaultSupportCap;
  int jobs = 1;
  std::uint64_t seed = 1;
  ProcessLimits limits;
  int population_cap = 8;
  int witness_population = 4;
  int witness_depth = 24;
};

struct Pair {
  std::string leader, contrib;
};

void add_pair(CLI::App* sub, Pair& p) {
  sub->add_option("--leader", p.leader, "leader machine file")->required()->check(CLI::ExistingFile);
  sub->add_option("--contrib", p.contrib, "contributor machine file")->required()->check(CLI::ExistingFile);
}

VerifyOptions verify_options(const Common& c) {
  VerifyOptions o;
  o.state_cap = c.state_cap;
  o.guess_cap = c.guess_cap;
  o.support_cap = c.support_cap;
  o.jobs = c.jobs;
  o.limits = c.limits;
  o.witness_population = c.witness_population;
  o.witness_depth = c.witness_depth;
  return o;
}

Network load(const Pair& p, std::ostream& err) {
  std::vector<std::string> warnings;
  Network net = load_network(p.leader, p.contrib, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return net;
}

void write_report(const Common& c, const std::string& text, std::ostream& out) {
  if (c.report.empty()) return;
  if (c.report == "-") {
    out << text << '\n';
    return;
  }
  std::ofstream f(c.report);
  if (!f) throw std::runtime_error("cannot write " + c.report);
  f << text << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void print_trace(const ConcreteTrace& t, const ValueTable& values, std::ostream& out) {
  for (std::size_t i = 0; i < t.letters.size(); ++i)
    out << "  " << (t.owner[i] < 0 ? std::string("leader") : "c" + std::to_string(t.owner[i])) << ' '
        << format_plain(t.letters[i], values) << '\n';
}

int verdict_exit(Status s) {
  switch (s) {
    case Status::Safe: return 0;
    case Status::Unsafe: return 1;
    case Status::Unknown: return 2;
  }
  return 2;
}

int report_verdict(const Verdict& v, const Network& net, const Common& c, std::ostream& out) {
  const bool quiet = c.report == "-";
  if (!quiet) {
    out << status_name(v.status) << " (" << v.procedure << ")\n";
    if (v.witness) {
      const Witness& w = *v.witness;
      out << "tau:";
      for (int g : w.tau) out << ' ' << net.values.name(g);
      out << '\n';
      if (!w.simulation.empty()) out << "simulation: " << format_word(w.simulation, net.values) << '\n';
      if (!w.trace.empty()) {
        out << "trace:\n";
        print_trace(w.trace, net.values, out);
      }
      if (!w.note.empty()) out << "note: " << w.note << '\n';
    }
    for (const auto& n : v.notes) out << "note: " << n << '\n';
  }
  write_report(c, verdict_report(v, net.values), out);
  return verdict_exit(v.status);
}

Verdict run_mode(const Network& net, const std::string& mode, const VerifyOptions& o) {
  if (mode == "auto") return verify_auto(net, o);
  if (mode == "fsm-fsm") return verify_fsm_fsm(net, o);
  if (mode == "pdm-fsm") return verify_pdm_fsm(net, o);
  if (mode == "fsm-pdm") return verify_fsm_pdm(net, o);
  return verify_pdm_pdm(net, o);
}

CnfFormula random_formula(int vars, int clauses, std::uint64_t seed) {
  if (vars < 1 || clauses < 1) throw std::invalid_argument("--vars and --clauses must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> var(1, vars), sign(0, 1);
  CnfFormula f;
  f.num_vars = vars;
  for (int j = 0; j < clauses; ++j) {
    std::array<int, 3> c{};
    for (int& l : c) l = var(rng) * (sign(rng) ? 1 : -1);
    f.clauses.push_back(c);
  }
  return f;
}

const Cfg& need_grammar(const LangFile& f, const std::string& path) {
  if (f.kind != LangFile::Kind::Grammar) throw std::invalid_argument(path + " is not a grammar file");
  return f.cfg;
}

const Fsa& need_automaton(const LangFile& f, const std::string& path) {
  if (f.kind != LangFile::Kind::Automaton) throw std::invalid_argument(path + " is not an automaton file");
  return f.fsa;
}

Cfg as_cnf(const Cfg& g) { return is_cnf(g) ? g : cfg_to_cnf(g); }

bool index_ready(const Cfg& g) {
  for (const auto& p : g.prods) {
    int vars = 0;
    for (Sym s : p.rhs) vars += is_var(s) ? 1 : 0;
    if (vars > 2) return false;
  }
  return true;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Safety verification for non-atomic shared-register networks", "navc"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--report", c.report, "write a JSON record to this file ('-' for standard output)");
  app.add_option("--state-cap", c.state_cap, "explored state cap")->capture_default_str();
  app.add_option("--guess-cap", c.guess_cap, "enumerated guess cap")->capture_default_str();
  app.add_option("--support-cap", c.support_cap, "support automaton state cap")->capture_default_str();
  app.add_option("--jobs", c.jobs, "parallel guess evaluation")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--stack-cap", c.limits.stack_cap, "pushdown stack height cap")->capture_default_str();
  app.add_option("--tape-cap", c.limits.tape_cap, "tape cell cap")->capture_default_str();
  app.add_option("--step-budget", c.limits.silent_budget, "tape steps per register operation")->capture_default_str();
  app.add_option("--population-cap", c.population_cap, "contributor cap of the bounded oracle")->capture_default_str();
  app.add_option("--witness-population", c.witness_population, "population for concrete witness search")
      ->capture_default_str();
  app.add_option("--witness-depth", c.witness_depth, "depth for concrete witness search")->capture_default_str();

  Pair vp;
  std::string mode = "auto", strategy = "search";
  bool no_witness = false;
  auto* verify = app.add_subcommand("verify", "decide safety");
  add_pair(verify, vp);
  verify->add_option("--mode", mode, "procedure")
      ->check(CLI::IsMember({"auto", "fsm-fsm", "pdm-fsm", "fsm-pdm", "pdm-pdm"}))
      ->capture_default_str();
  verify->add_option("--strategy", strategy, "first-write search of the finite-contributor procedure")
      ->check(CLI::IsMember({"search", "enumerate"}))
      ->capture_default_str();
  verify->add_flag("--no-witness", no_witness, "skip witness extraction");

  Pair bp;
  int bk = 1;
  auto* bounded = app.add_subcommand("bounded", "safety when every process makes at most k register operations");
  add_pair(bounded, bp);
  bounded->add_option("--k", bk, "operation bound")->required()->check(CLI::NonNegativeNumber);

  Pair op;
  std::string engine = "saturate";
  int ok = 1, odepth = 12;
  auto* oracle = app.add_subcommand("oracle", "explicit-state ground truth");
  add_pair(oracle, op);
  oracle->add_option("--engine", engine, "explore: k contributors up to --depth; saturate: finite machines; "
                                         "bounded: at most k operations per process")
      ->check(CLI::IsMember({"explore", "saturate", "bounded"}))
      ->capture_default_str();
  oracle->add_option("--k", ok, "population (explore) or operation bound (bounded)")->capture_default_str();
  oracle->add_option("--depth", odepth, "exploration depth")->capture_default_str();

  std::string cnf_path, out_dir;
  int gvars = 0, gclauses = 0;
  auto* gen = app.add_subcommand("gen3sat", "network that is unsafe iff a 3-CNF formula is satisfiable");
  auto* cnf_opt = gen->add_option("--cnf", cnf_path, "DIMACS file")->check(CLI::ExistingFile);
  auto* vars_opt = gen->add_option("--vars", gvars, "random formula: variables");
  gen->add_option("--clauses", gclauses, "random formula: clauses")->needs(vars_opt);
  vars_opt->excludes(cnf_opt);
  gen->add_option("--out-dir", out_dir, "output directory")->required();

  Pair dp;
  std::string det_dir;
  auto* det = app.add_subcommand("determinize", "equivalent network with deterministic machines");
  add_pair(det, dp);
  det->add_option("--out-dir", det_dir, "output directory")->required();

  auto* lang = app.add_subcommand("lang", "grammar and automaton operations");
  lang->require_subcommand(1);
  std::string lfile, lfsa;
  int lk = 1, max_len = 5;
  bool to_cnf = false;
  auto* l_empty = lang->add_subcommand("cfg-empty", "emptiness of a grammar");
  l_empty->add_option("file", lfile)->required()->check(CLI::ExistingFile);
  auto* l_kindex = lang->add_subcommand("kindex-empty", "emptiness of the k-index language");
  l_kindex->add_option("file", lfile)->required()->check(CLI::ExistingFile);
  l_kindex->add_option("--k", lk, "index")->required()->check(CLI::PositiveNumber);
  l_kindex->add_flag("--cnf", to_cnf, "convert to Chomsky normal form first");
  auto* l_support = lang->add_subcommand("support", "automaton recognizing a support of the grammar");
  l_support->add_option("file", lfile)->required()->check(CLI::ExistingFile);
  auto* l_bowtie = lang->add_subcommand("bowtie", "grammar for the asynchronous product with an automaton");
  l_bowtie->add_option("grammar", lfile)->required()->check(CLI::ExistingFile);
  l_bowtie->add_option("automaton", lfsa)->required()->check(CLI::ExistingFile);
  auto* l_cnf = lang->add_subcommand("cnf", "Chomsky normal form");
  l_cnf->add_option("file", lfile)->required()->check(CLI::ExistingFile);
  auto* l_enum = lang->add_subcommand("enumerate", "words up to a length");
  l_enum->add_option("file", lfile)->required()->check(CLI::ExistingFile);
  l_enum->add_option("--max-len", max_len, "maximal word length")->capture_default_str()->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (verify->parsed()) {
      Network net = load(vp, err);
      VerifyOptions o = verify_options(c);
      o.strategy = strategy == "search" ? Strategy::Search : Strategy::Enumerate;
      o.witness = !no_witness;
      return report_verdict(run_mode(net, mode, o), net, c, out);
    }
    if (bounded->parsed()) {
      Network net = load(bp, err);
      return report_verdict(verify_bounded(net, bk, verify_options(c)), net, c, out);
    }
    if (oracle->parsed()) {
      Network net = load(op, err);
      nlohmann::json j;
      j["engine"] = engine;
      int code = 0;
      ConcreteTrace witness;
      std::string status;
      if (engine == "saturate") {
        auto r = saturate_fsm(net);
        status = r.unsafe ? "unsafe" : "safe";
        code = r.unsafe ? 1 : 0;
        j["states"] = r.states;
        std::vector<std::string> path;
        for (Letter l : r.abstract_path) path.push_back(format_letter(l, net.values));
        j["abstract_path"] = path;
        if (c.report != "-") {
          out << status << " (saturation, " << r.states << " states)\n";
          if (r.unsafe) {
            out << "abstract path:\n";
            for (Letter l : r.abstract_path) out << "  " << format_letter(l, net.values) << '\n';
          }
        }
      } else if (engine == "explore") {
        ExploreOptions eo;
        eo.limits = c.limits;
        eo.state_cap = c.state_cap;
        auto r = explore_bounded(net, ok, odepth, eo);
        status = bounded_status_name(r.status);
        code = r.status == BoundedStatus::Unsafe ? 1 : r.status == BoundedStatus::SafeAtBound ? 0 : 2;
        j["states"] = r.states;
        witness = r.witness;
        if (c.report != "-") out << status << " (k=" << ok << ", depth=" << odepth << ", " << r.states << " states)\n";
      } else {
        BoundedOracleOptions bo;
        bo.limits = c.limits;
        bo.population_cap = c.population_cap;
        bo.state_cap = c.state_cap;
        auto r = bounded_safety_oracle(net, ok, bo);
        status = r.unsafe ? "unsafe" : r.incomplete ? "incomplete" : "safe";
        code = r.unsafe ? 1 : r.incomplete ? 2 : 0;
        j["states"] = r.states;
        j["max_population"] = r.max_population;
        witness = r.witness;
        if (c.report != "-") out << status << " (k=" << ok << ", " << r.states << " states)\n";
      }
      j["status"] = status;
      if (!witness.empty()) {
        nlohmann::json t = nlohmann::json::array();
        for (std::size_t i = 0; i < witness.letters.size(); ++i)
          t.push_back({{"action", format_plain(witness.letters[i], net.values)},
                       {"process", witness.owner[i] < 0 ? std::string("leader") : "c" + std::to_string(witness.owner[i])}});
        j["trace"] = t;
        if (c.report != "-") {
          out << "trace:\n";
          print_trace(witness, net.values, out);
        }
      }
      write_report(c, j.dump(2), out);
      return code;
    }
    if (gen->parsed()) {
      CnfFormula f;
      if (!cnf_path.empty()) f = load_dimacs(cnf_path);
      else if (gvars > 0) f = random_formula(gvars, gclauses > 0 ? gclauses : gvars * 4, c.seed);
      else throw std::invalid_argument("give --cnf or --vars");
      Network net = gen_3sat(f);
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path dir(out_dir);
      write_file(dir / "leader.fsm", print_machine(net.leader, net.values));
      write_file(dir / "contrib.fsm", print_machine(net.contributor, net.values));
      write_file(dir / "formula.cnf", print_dimacs(f));
      nlohmann::json j;
      j["variables"] = f.num_vars;
      j["clauses"] = f.clauses.size();
      j["values"] = net.nvalues();
      j["leader_states"] = net.leader.fsm.num_states;
      j["contributor_states"] = net.contributor.fsm.num_states;
      if (c.report != "-")
        out << "wrote " << (dir / "leader.fsm").string() << " (" << net.leader.fsm.num_states << " states), "
            << (dir / "contrib.fsm").string() << " (" << net.contributor.fsm.num_states << " states), "
            << net.nvalues() << " values\n";
      write_report(c, j.dump(2), out);
      return 0;
    }
    if (det->parsed()) {
      Network net = load(dp, err);
      if (net.leader.kind != MachineKind::Fsm || net.contributor.kind != MachineKind::Fsm)
        throw std::invalid_argument("determinize needs finite-state machines");
      auto r = determinize(net);
      std::filesystem::create_directories(det_dir);
      const std::filesystem::path dir(det_dir);
      write_file(dir / "leader.fsm", print_machine(r.net.leader, r.net.values));
      write_file(dir / "contrib.fsm", print_machine(r.net.contributor, r.net.values));
      nlohmann::json j;
      j["leader_states_added"] = r.leader_states_added;
      j["contributor_states_added"] = r.contributor_states_added;
      if (c.report != "-")
        out << "leader +" << r.leader_states_added << " states, contributor +" << r.contributor_states_added
            << " states\n";
      write_report(c, j.dump(2), out);
      return 0;
    }
    if (lang->parsed()) {
      ValueTable symbols;
      LangFile f = load_lang(lfile, symbols);
      nlohmann::json j;
      int code = 0;
      const bool quiet = c.report == "-";
      if (l_empty->parsed()) {
        const Cfg& g = need_grammar(f, lfile);
        auto w = cfg_extract_word(g);
        code = w ? 1 : 0;
        j["empty"] = !w;
        if (w) j["word"] = format_symbols(*w, symbols);
        if (!quiet) out << (w ? "nonempty: " + format_symbols(*w, symbols) : std::string("empty")) << '\n';
      } else if (l_kindex->parsed()) {
        Cfg g = need_grammar(f, lfile);
        if (to_cnf) g = cfg_to_cnf(g);
        if (!index_ready(g)) throw std::invalid_argument("a production has more than two variables; use --cnf");
        const bool ne = k_index_nonempty(g, lk);
        code = ne ? 1 : 0;
        j["k"] = lk;
        j["empty"] = !ne;
        if (!quiet) out << (ne ? "nonempty" : "empty") << '\n';
      } else if (l_support->parsed()) {
        Fsa a = support_fsa(as_cnf(need_grammar(f, lfile)), c.support_cap);
        j["states"] = a.num_states;
        if (!quiet) out << print_fsa(a, symbols);
      } else if (l_bowtie->parsed()) {
        Cfg g = as_cnf(need_grammar(f, lfile));
        LangFile fa = load_lang(lfsa, symbols);
        Cfg prod = bowtie(g, need_automaton(fa, lfsa));
        j["variables"] = prod.num_vars;
        j["productions"] = prod.prods.size();
        if (!quiet) out << print_cfg(prod, symbols);
      } else if (l_cnf->parsed()) {
        Cfg g = cfg_to_cnf(need_grammar(f, lfile));
        j["variables"] = g.num_vars;
        j["productions"] = g.prods.size();
        if (!quiet) out << print_cfg(g, symbols);
      } else {
        std::set<Word> words =
            f.kind == LangFile::Kind::Grammar ? enumerate_words(f.cfg, max_len) : enumerate_words(f.fsa, max_len);
        std::vector<std::string> list;
        for (const auto& w : words) list.push_back(format_symbols(w, symbols));
        j["words"] = list;
        if (!quiet)
          for (const auto& s : list) out << s << '\n';
      }
      write_report(c, j.dump(2), out);
      return code;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace nam
