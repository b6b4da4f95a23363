#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <optional>
#include <random>
#include <set>

#include "nam/cfg.hpp"
#include "nam/lang_io.hpp"
#include "nam/process.hpp"
#include "nam/store.hpp"
#include "support.hpp"

using namespace nam;

namespace {

constexpr Letter a = 0, b = 1, c = 2;

Cfg grammar(int vars, std::vector<Letter> terms) {
  Cfg g;
  for (int i = 0; i < vars; ++i) g.add_var();
  g.set_terminals(std::move(terms));
  return g;
}

std::set<Word> prefixes(const std::set<Word>& words) {
  std::set<Word> out;
  for (const auto& w : words)
    for (std::size_t i = 0; i <= w.size(); ++i) out.insert(Word(w.begin(), w.begin() + i));
  return out;
}

Pdm random_pdm(std::mt19937_64& rng, int states, int symbols, const std::vector<Letter>& alpha, int rules) {
  Pdm p;
  p.num_states = states;
  p.num_symbols = symbols;
  p.alphabet = alpha;
  std::uniform_int_distribution<int> st(0, states - 1), sy(0, symbols - 1), lt(0, static_cast<int>(alpha.size())),
      push(0, 2);
  for (int i = 0; i < rules; ++i) {
    const int l = lt(rng);
    std::vector<int> w(push(rng));
    for (int& s : w) s = sy(rng);
    p.rules.push_back({st(rng), sy(rng), l == static_cast<int>(alpha.size()) ? kEps : alpha[l], st(rng), w});
  }
  return p;
}

// Traces with at most `max_len` letters; nullopt when a process cap was hit.
std::optional<std::set<Word>> process_traces(const Pdm& p, int max_len) {
  Machine m;
  m.kind = MachineKind::Pdm;
  m.pdm = p;
  bool capped = false;
  Process pr(m, ProcessLimits{32, 64, 10'000});
  auto t = pr.traces(max_len, &capped);
  if (capped) return std::nullopt;
  return std::set<Word>(t.begin(), t.end());
}

}  // namespace

TEST_CASE("pdm_to_cfg on hand-built machines") {
  Pdm loop;
  loop.num_states = 1;
  loop.num_symbols = 1;
  loop.alphabet = {wd(0)};
  loop.rules.push_back({0, 0, wd(0), 0, {0}});
  CHECK(enumerate_words(pdm_to_cfg(loop), 3) == std::set<Word>{{}, {wd(0)}, {wd(0), wd(0)}, {wd(0), wd(0), wd(0)}});

  Pdm silent = loop;
  silent.rules = {{0, 0, kEps, 0, {0, 0}}};
  CHECK(enumerate_words(pdm_to_cfg(silent), 4) == std::set<Word>{{}});

  // p Z -a-> p A Z ; p A -a-> p A A ; p A -eps-> q A ; q A -b-> q (pop)
  Pdm counter;
  counter.num_states = 2;
  counter.num_symbols = 2;
  counter.alphabet = {wd(0), wd(1)};
  counter.rules = {{0, 0, wd(0), 0, {1, 0}}, {0, 1, wd(0), 0, {1, 1}}, {0, 1, kEps, 1, {1}}, {1, 1, wd(1), 1, {}}};
  std::set<Word> expect;
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= n && n + m <= 6; ++m) {
      Word w(n, wd(0));
      w.insert(w.end(), m, wd(1));
      expect.insert(w);
    }
  CHECK(enumerate_words(pdm_to_cfg(counter), 6) == expect);
}

TEST_CASE("pdm_to_cfg agrees with the operational semantics and is prefix closed") {
  std::mt19937_64 rng(41);
  int compared = 0;
  for (int i = 0; i < 80; ++i) {
    Pdm p = random_pdm(rng, 2, 2, {wd(0), wd(1)}, 6);
    auto words = enumerate_words(pdm_to_cfg(p), 5);
    CHECK(prefixes(words) == words);
    auto traces = process_traces(p, 5);
    if (!traces) continue;
    ++compared;
    CHECK(words == *traces);
  }
  CHECK(compared >= 40);
}

TEST_CASE("cfg_to_cnf preserves the language") {
  Cfg g = grammar(2, {a, b});
  g.add(0, {tsym(a), 1, tsym(b)});
  g.add(1, {});
  g.add(1, {tsym(a), 1, tsym(b)});
  Cfg n = cfg_to_cnf(g);
  CHECK(is_cnf(n));
  CHECK(enumerate_words(n, 6) == enumerate_words(g, 6));
  CHECK(enumerate_words(g, 6) == std::set<Word>{{a, b}, {a, a, b, b}, {a, a, a, b, b, b}});

  Cfg already = grammar(2, {a});
  already.add(0, {1, 1});
  already.add(1, {tsym(a)});
  CHECK(is_cnf(cfg_to_cnf(already)));
  CHECK(enumerate_words(cfg_to_cnf(already), 3) == std::set<Word>{{a, a}});

  Cfg empty = grammar(1, {a});
  empty.add(0, {0, tsym(a)});
  CHECK(cfg_is_empty(cfg_to_cnf(empty)));

  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    Pdm p = random_pdm(rng, 2, 2, {0, 1}, 6);
    Cfg raw = pdm_to_cfg(p);
    Cfg cnf = cfg_to_cnf(raw);
    CHECK(is_cnf(cnf));
    CHECK(enumerate_words(cnf, 5) == enumerate_words(raw, 5));
  }
}

TEST_CASE("bowtie examples") {
  Cfg g = grammar(1, {a});
  g.add(0, {0, 0});
  g.add(0, {tsym(a)});
  // Disjoint alphabets: the product is the shuffle.
  Fsa bs = prefix_closure(word_automaton({b, b}, {b}));
  auto lg = enumerate_words(g, 5), la = enumerate_words(bs, 5);
  CHECK(enumerate_words(bowtie(g, bs), 5) == testkit::sync_merge(lg, {a}, la, {b}, 5));
  // An automaton accepting only eps over a disjoint alphabet changes nothing.
  Fsa eps;
  eps.add_state(true);
  eps.set_alphabet({b});
  CHECK(enumerate_words(bowtie(g, eps), 5) == lg);
  // Shared letter: a+ synchronized with exactly aa.
  Fsa aa = word_automaton({a, a}, {a});
  CHECK(enumerate_words(bowtie(g, aa), 5) == std::set<Word>{{a, a}});
  CHECK(enumerate_words(bowtie(g, aa, BowtieMode::Full), 5) == std::set<Word>{{a, a}});
}

TEST_CASE("bowtie commutes with the index bound") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 40; ++i) {
    Cfg g = testkit::random_cnf_grammar(rng, 1 + i % 3, 2, 3 + i % 4);
    Fsa au = testkit::random_fsa(rng, 1 + i % 3, (i % 2) ? std::vector<Letter>{0, 2} : std::vector<Letter>{1}, 4);
    Cfg full = bowtie(g, au, BowtieMode::Full), trimmed = bowtie(g, au);
    for (int k = 1; k <= 3; ++k) {
      auto expect = testkit::sync_merge(testkit::kindex_words(g, k, 5), g.terminals, enumerate_words(au, 5),
                                        au.alphabet, 5);
      CHECK(testkit::kindex_words(trimmed, k, 5) == expect);
      CHECK(testkit::kindex_words(full, k, 5) == expect);
      const bool nonempty = k_index_nonempty(full, k);
      CHECK(k_index_nonempty(trimmed, k) == nonempty);
      CHECK(product_check(g, au, k).nonempty == nonempty);
      if (!expect.empty()) CHECK(nonempty);
    }
    CHECK(product_check(g, au, 0).nonempty == !cfg_is_empty(full));
  }
}

TEST_CASE("product_check witnesses belong to both sides") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 60; ++i) {
    Cfg g = testkit::random_cnf_grammar(rng, 2, 2, 5);
    Fsa au = testkit::random_fsa(rng, 3, {0, 1}, 6);
    auto r = product_check(g, au, 0, true);
    if (!r.nonempty) continue;
    REQUIRE(r.witness);
    CHECK(accepts(au, *r.witness));
    CHECK(enumerate_words(g, static_cast<int>(r.witness->size())).count(*r.witness));
  }
}

TEST_CASE("k-index emptiness examples") {
  Cfg one = grammar(1, {a});
  one.add(0, {tsym(a)});
  CHECK(k_index_nonempty(one, 1));

  Cfg loop = grammar(1, {a});
  loop.add(0, {0, 0});
  for (int k = 1; k <= 5; ++k) CHECK_FALSE(k_index_nonempty(loop, k));

  Cfg ab = grammar(3, {a, b});
  ab.add(0, {1, 2});
  ab.add(1, {tsym(a)});
  ab.add(2, {tsym(b)});
  CHECK_FALSE(k_index_nonempty(ab, 1));
  CHECK(k_index_nonempty(ab, 2));
  CHECK(testkit::kindex_words(ab, 1, 4).empty());
  CHECK(testkit::kindex_words(ab, 2, 4) == std::set<Word>{{a, b}});
}

TEST_CASE("k-index emptiness is monotone and matches the derivation oracle") {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 200; ++i) {
    Cfg g = testkit::random_cnf_grammar(rng, 1 + i % 5, 2, 2 + i % 8);
    bool prev = false;
    for (int k = 1; k <= 6; ++k) {
      const bool ne = k_index_nonempty(g, k);
      if (prev) CHECK(ne);
      prev = ne;
      if (k <= 3) CHECK(ne == !testkit::kindex_words(g, k, 5).empty());
    }
    CHECK(k_index_nonempty(g, cover_index(g)) == !cfg_is_empty(g));
  }
}

TEST_CASE("grammar SCCs and cover index") {
  Cfg self = grammar(1, {a});
  self.add(0, {0, 0});
  self.add(0, {tsym(a)});
  CHECK(grammar_scc_count(self) == 1);
  CHECK(cover_index(self) == 3);

  Cfg ab = grammar(3, {a, b});
  ab.add(0, {1, 2});
  ab.add(1, {tsym(a)});
  ab.add(2, {tsym(b)});
  CHECK(grammar_scc_count(ab) == 3);
  CHECK(cover_index(ab) == 9);

  Cfg mutual = grammar(2, {a});
  mutual.add(0, {1, 1});
  mutual.add(1, {0, 0});
  mutual.add(1, {tsym(a)});
  CHECK(grammar_scc_count(mutual) == 1);

  std::mt19937_64 rng(81);
  for (int i = 0; i < 100; ++i) {
    Cfg g = testkit::random_cnf_grammar(rng, 1 + i % 6, 2, 1 + i % 10);
    CHECK(cover_index(g) <= 3 * g.num_vars);
  }
}

TEST_CASE("support automaton examples") {
  Cfg one = grammar(1, {a});
  one.add(0, {tsym(a)});
  Fsa s = support_fsa(one);
  CHECK(s.num_states == 2);
  CHECK(enumerate_words(s, 3) == std::set<Word>{{a}});

  Cfg pump = grammar(2, {a, b});
  pump.add(0, {1, 0});
  pump.add(0, {tsym(b)});
  pump.add(1, {tsym(a)});
  Fsa p = support_fsa(pump);
  auto ls = enumerate_words(p, 5);
  CHECK(ls.count({b}));
  CHECK(ls.count({a, b}));
  auto lg = enumerate_words(pump, 5);
  CHECK(std::includes(lg.begin(), lg.end(), ls.begin(), ls.end()));
  for (const auto& w : lg)
    CHECK(std::any_of(ls.begin(), ls.end(), [&](const Word& v) { return subword_leq(v, w); }));
}

TEST_CASE("support automaton stops at the state cap") {
  Cfg g = grammar(4, {a});
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) g.add(x, {y, (x + y) % 4});
  for (int x = 0; x < 4; ++x) g.add(x, {tsym(a)});
  CHECK_THROWS_AS(support_fsa(g, 5), ResourceError);
}

TEST_CASE("automaton operations") {
  Fsa u;
  u.add_state(false);
  u.add_state(true);
  u.set_alphabet({a});
  u.add_edge(1, a, 1);
  CHECK(is_empty(u));
  CHECK(trim(u).num_states == 1);

  std::mt19937_64 rng(91);
  for (int i = 0; i < 50; ++i) {
    Fsa f = testkit::random_fsa(rng, 4, {a, b}, 6);
    Fsa pc = prefix_closure(f);
    CHECK(enumerate_words(prefix_closure(pc), 5) == enumerate_words(pc, 5));
    Fsa all;
    all.add_state(true);
    all.add_edge(0, a, 0);
    all.add_edge(0, b, 0);
    all.set_alphabet({a, b});
    CHECK(enumerate_words(async_product(f, all), 5) == enumerate_words(f, 5));
    auto w = shortest_word(f);
    CHECK(w.has_value() == !is_empty(f));
    if (w) {
      CHECK(accepts(f, *w));
      for (const auto& v : enumerate_words(f, static_cast<int>(w->size())))
        CHECK((v.size() > w->size() || (v.size() == w->size() && !(v < *w))));
    }
  }
}

TEST_CASE("grammar emptiness and word extraction") {
  Cfg loop = grammar(1, {a});
  loop.add(0, {0});
  CHECK(cfg_is_empty(loop));
  CHECK_FALSE(cfg_extract_word(loop));

  Cfg ab = grammar(2, {a, b});
  ab.add(0, {tsym(a), 1});
  ab.add(1, {tsym(b)});
  CHECK(cfg_extract_word(ab) == Word{a, b});

  Cfg eps = grammar(1, {a});
  eps.add(0, {});
  eps.add(0, {tsym(a)});
  CHECK(cfg_extract_word(eps) == Word{});

  std::mt19937_64 rng(101);
  for (int i = 0; i < 100; ++i) {
    Cfg g = testkit::random_cnf_grammar(rng, 1 + i % 4, 3, 2 + i % 6);
    auto w = cfg_extract_word(g);
    CHECK(w.has_value() == !cfg_is_empty(g));
    if (!w) continue;
    auto words = enumerate_words(g, static_cast<int>(w->size()));
    CHECK(words.count(*w));
    for (const auto& v : words) CHECK((v.size() > w->size() || (v.size() == w->size() && !(v < *w))));
  }
}

TEST_CASE("word enumeration of the store") {
  auto words = enumerate_words(build_store(1), 2);
  CHECK(words.size() == 11);
  CHECK(words.count({wd(0), rc(0)}));
  CHECK_FALSE(words.count({rd(0)}));

  // A grammar and an automaton for (ab)*.
  Cfg g = grammar(2, {a, b});
  g.add(0, {});
  g.add(0, {tsym(a), 1});
  g.add(1, {tsym(b), 0});
  Fsa f;
  f.add_state(true);
  f.add_state(false);
  f.add_edge(0, a, 1);
  f.add_edge(1, b, 0);
  f.set_alphabet({a, b});
  CHECK(enumerate_words(g, 6) == enumerate_words(f, 6));
}

TEST_CASE("lang files round-trip") {
  const std::string cfg_text = "cfg\nterminals a b\naxiom S\nprod S -> a S b\nprod S -> eps\nprod T -> S S\n";
  ValueTable sym;
  LangFile lf = parse_lang(cfg_text, sym);
  REQUIRE(lf.kind == LangFile::Kind::Grammar);
  CHECK(enumerate_words(lf.cfg, 4) ==
        std::set<Word>{{}, {sym.find("a"), sym.find("b")}, {sym.find("a"), sym.find("a"), sym.find("b"), sym.find("b")}});
  const std::string printed = print_cfg(lf.cfg, sym);
  ValueTable sym2;
  LangFile again = parse_lang(printed, sym2);
  CHECK(print_cfg(again.cfg, sym2) == printed);
  CHECK(again.cfg.prods == lf.cfg.prods);

  const std::string fsa_text = "fsa\nalphabet a b\nstates p q\ninit p\nacc q\np a q\nq eps p\nq b r\n";
  ValueTable s3;
  LangFile af = parse_lang(fsa_text, s3);
  REQUIRE(af.kind == LangFile::Kind::Automaton);
  CHECK(af.fsa.num_states == 3);
  CHECK(accepts(af.fsa, {s3.find("a"), s3.find("a")}));
  const std::string fp = print_fsa(af.fsa, s3, af.state_names);
  ValueTable s4;
  LangFile af2 = parse_lang(fp, s4);
  CHECK(print_fsa(af2.fsa, s4, af2.state_names) == fp);
  CHECK(af2.fsa.edges == af.fsa.edges);

  CHECK(format_symbols({}, s3) == "eps");
  CHECK_THROWS_AS(parse_lang("fsa\nalphabet a\nstates p\ninit p\np z p\n", s4), ParseError);
  CHECK_THROWS_AS(parse_lang("nonsense\n", s4), ParseError);
}
