#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "featfirst/first_follow.hpp"
#include "support/grammars.hpp"

using namespace featfirst;
using featfirst::testing::LabelPairs;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(FEATFIRST_GRAMMAR_DIR) + "/" + name);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Pair make_pair(const char* text, bool epsilon = false) {
  Pair p;
  p.structure = parse_categories(text);
  p.lhs_arity = p.structure.arity() - 1;
  p.epsilon = epsilon;
  p.restricted = true;
  return p;
}

/// Every expected pair matches exactly one element and nothing is left over.
bool same_pairs(const PairSet& set, const std::vector<Pair>& expected) {
  if (set.size() != expected.size()) return false;
  for (const auto& e : expected) {
    std::size_t hits = 0;
    for (const Pair* p : set.elements()) hits += pair_equivalent(*p, e);
    if (hits != 1) return false;
  }
  return true;
}

bool shares(const Space& s, NodeId a, NodeId b, const char* feature) {
  const auto x = s.get(a, feature);
  const auto y = s.get(b, feature);
  return x && y && *x == *y;
}

std::vector<std::string> rhs_texts(const std::vector<QueryAnswer>& answers) {
  std::vector<std::string> out;
  for (const auto& a : answers) out.push_back(a.epsilon ? "ε" : format(a.category));
  std::sort(out.begin(), out.end());
  return out;
}

bool restricted_ok(const PairSet& set, const Restrictor& phi) {
  for (const Pair* p : set.elements()) {
    for (const auto& path : phi.paths()) {
      if (contains_path(p->structure, path)) return false;
    }
  }
  return true;
}

const std::vector<Pair>& fig1_first() {
  static const std::vector<Pair> expected = [] {
    std::vector<Pair> v;
    v.push_back(make_pair("$1:Det[ter=+] $1"));
    v.push_back(make_pair("$1:N[ter=+] $1"));
    v.push_back(make_pair("$1:Vtra[ter=+] $1"));
    v.push_back(make_pair("VP[agr=$1] Vtra[agr=$1, ter=+]"));
    v.push_back(make_pair("NP[] Det[ter=+]"));
    v.push_back(make_pair("NP[] NP[]", true));
    v.push_back(make_pair("S[] Det[ter=+]"));
    v.push_back(make_pair("S[] Vtra[ter=+]"));
    return v;
  }();
  return expected;
}

}  // namespace

TEST_CASE("adding an equivalent pair changes nothing") {
  PairSet s(1);
  CHECK(s.add(make_pair("NP[] Det[ter=+]")));
  CHECK_FALSE(s.add(make_pair("NP[] Det[ter=+]")));
  CHECK(s.size() == 1);
  CHECK_FALSE(s.add(make_pair("NP[agr=sg] Det[ter=+]")));
  CHECK(s.size() == 1);
}

TEST_CASE("a reentrant pair and an atom-valued pair are both kept") {
  const auto atoms = make_pair("VP[agr=sg] Vtra[agr=sg]");
  const auto shared = make_pair("VP[agr=$1] Vtra[agr=$1]");
  CHECK_FALSE(pair_subsumes(atoms, shared));
  CHECK_FALSE(pair_subsumes(shared, atoms));
  PairSet s(1);
  CHECK(s.add(atoms));
  CHECK(s.add(shared));
  CHECK(s.size() == 2);
  CHECK(s.is_antichain());
}

TEST_CASE("a pair that subsumes two elements replaces both") {
  PairSet s(2);
  CHECK(s.add(make_pair("NP[agr=sg] Det[ter=+]")));
  CHECK(s.add(make_pair("NP[agr=pl] Det[ter=+]")));
  CHECK(s.add(make_pair("NP[] Vtra[ter=+]")));
  s.mark_tested(0, 0);
  CHECK(s.add(make_pair("NP[] Det[ter=+]")));
  CHECK(s.size() == 2);
  CHECK(s.created() == 4);
  CHECK_FALSE(s.alive(0));
  CHECK_FALSE(s.alive(1));
  CHECK_FALSE(s.tested(3, 0));
  CHECK(s.is_antichain());
}

TEST_CASE("the pair set rejects unrestricted pairs and tracks tests per rule") {
  PairSet s(2);
  Pair p = make_pair("NP[] Det[]");
  p.restricted = false;
  CHECK_THROWS_AS(s.add(p), std::logic_error);
  CHECK(s.add(make_pair("NP[] Det[]")));
  CHECK(s.mark_tested(0, 1));
  CHECK_FALSE(s.mark_tested(0, 1));
  CHECK(s.tested(0, 1));
  CHECK_FALSE(s.tested(0, 0));
}

TEST_CASE("epsilon and non-epsilon pairs never subsume each other") {
  CHECK_FALSE(pair_subsumes(make_pair("NP[] NP[]", true), make_pair("NP[] NP[]")));
  CHECK_FALSE(pair_subsumes(make_pair("NP[] NP[]"), make_pair("NP[] NP[]", true)));
}

TEST_CASE("FIRST of the example grammar") {
  const auto g = parse_grammar(slurp("fig1.gr"));
  for (Mode m : {Mode::active, Mode::naive}) {
    CAPTURE(to_string(m));
    const auto r = compute_first(g, m);
    CHECK(same_pairs(r.pairs, fig1_first()));
    REQUIRE_FALSE(r.stats.iterations.empty());
    CHECK_FALSE(r.stats.iterations.back().changed);
    CHECK(r.stats.iterations.size() == 3);
    for (const Pair* p : r.pairs.elements()) {
      if (label_of(p->structure.space(), p->lhs_root()) == "vp") {
        CHECK(shares(p->structure.space(), p->lhs_root(), p->rhs_root(), "agr"));
      }
    }
  }
}

TEST_CASE("without a restrictor the example grammar loses (S, Vtra)") {
  auto g = parse_grammar(slurp("fig1.gr"));
  g.set_restrictor({});
  const auto r = compute_first(g);
  std::vector<Pair> expected;
  expected.push_back(make_pair("$1:Det[ter=+] $1"));
  expected.push_back(make_pair("$1:N[ter=+] $1"));
  expected.push_back(make_pair("$1:Vtra[ter=+] $1"));
  expected.push_back(make_pair("VP[agr=$1] Vtra[agr=$1, ter=+]"));
  expected.push_back(make_pair("NP[slash=null] Det[ter=+]"));
  expected.push_back(make_pair("NP[slash=NP[]] NP[slash=NP[]]", true));
  expected.push_back(make_pair("S[] Det[ter=+]"));
  CHECK(same_pairs(r.pairs, expected));
}

TEST_CASE("a lone epsilon rule") {
  const auto g = parse_grammar("S -> .");
  const auto first = compute_first(g);
  CHECK(same_pairs(first.pairs, {make_pair("S[] S[]", true)}));
  const auto follow = compute_follow(g, first.pairs);
  CHECK(same_pairs(follow.pairs, {make_pair("S[] $[]")}));
  CHECK(equivalent(*epsilon_category(g), parse_category("S[]")));
}

TEST_CASE("the epsilon category generalizes all epsilon mothers") {
  const auto g = parse_grammar("S -> NP.\nNP[agr=sg, case=nom] -> .\nNP[agr=pl, case=nom] -> .");
  CHECK(equivalent(*epsilon_category(g), parse_category("NP[agr=[], case=nom]")));
  CHECK_FALSE(epsilon_category(parse_grammar("S -> term Det.")));
}

TEST_CASE("the end marker unifies with no grammar category") {
  CHECK_FALSE(unify(end_mark(), parse_category("S[]")));
  CHECK(unify(end_mark(), parse_category("[]")));
}

TEST_CASE("FIRST of a category string") {
  const auto g = parse_grammar(slurp("fig1.gr"));
  const auto first = compute_first(g);

  auto rhs = [&](const char* cats) {
    const auto s = first_of_string(first.pairs, g, parse_categories(cats));
    std::vector<std::string> out;
    for (const Pair* p : s.elements()) {
      CHECK(p->lhs_arity == parse_categories(cats).arity());
      out.push_back(p->epsilon ? "ε" : label_of(p->structure.space(), p->rhs_root()));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  CHECK(rhs("NP[] NP[] VP[]") == std::vector<std::string>{"det", "vtra"});
  // The Det reached through the second NP adds nothing new.
  CHECK(first_of_string(first.pairs, g, parse_categories("NP[] NP[] VP[]")).size() == 2);
  CHECK(rhs("Det[ter=+]") == std::vector<std::string>{"det"});
  CHECK(rhs("NP[]") == std::vector<std::string>{"det", "ε"});
  CHECK(rhs("NP[] NP[]") == std::vector<std::string>{"det", "ε"});
  CHECK_THROWS_AS(first_of_string(first.pairs, g, parse_categories("NP[] PP[]")), UnknownCategory);
  try {
    first_of_string(first.pairs, g, parse_categories("NP[] PP[]"));
  } catch (const UnknownCategory& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("queries apply the bindings of the match") {
  const auto g = parse_grammar(slurp("fig1.gr"));
  const auto first = compute_first(g);
  CHECK(rhs_texts(query(first.pairs, parse_category("S[]"))) ==
        std::vector<std::string>{"det[ter=+]", "vtra[ter=+]"});
  CHECK(rhs_texts(query(first.pairs, parse_category("VP[agr=sg]"))) ==
        std::vector<std::string>{"vtra[agr=sg, ter=+]"});
  CHECK(query(first.pairs, parse_category("[cat=zzz]")).empty());
}

TEST_CASE("FOLLOW keeps bindings between a category and what follows it") {
  const auto g = parse_grammar(slurp("agr.gr"));
  const auto first = compute_first(g);
  const auto follow = compute_follow(g, first.pairs);
  const auto target = make_pair("N[agr=$1, ter=+] Vint[agr=$1, ter=+]");
  bool found = false;
  for (const Pair* p : follow.pairs.elements()) {
    if (!pair_equivalent(*p, target)) continue;
    found = true;
    CHECK(shares(p->structure.space(), p->lhs_root(), p->rhs_root(), "agr"));
  }
  CHECK(found);
}

TEST_CASE("FIRST and FOLLOW of the introductory grammar project to the classic sets") {
  const auto g = parse_grammar(slurp("cf-intro.gr"));
  const auto first = compute_first(g);
  const auto follow = compute_follow(g, first.pairs);
  const LabelPairs expected_first{{"s", "det"},  {"np", "det"},   {"vp", "vtra"},
                                  {"det", "det"}, {"noun", "noun"}, {"vtra", "vtra"}};
  CHECK(testing::project(first.pairs) == expected_first);
  const LabelPairs expected_follow{{"s", "$"},     {"np", "vtra"},   {"np", "$"},  {"vp", "$"},
                                   {"det", "noun"}, {"noun", "vtra"}, {"noun", "$"}, {"vtra", "det"}};
  CHECK(testing::project(follow.pairs) == expected_follow);
}

TEST_CASE("the restrictor is what makes an accumulating grammar terminate") {
  auto g = parse_grammar(slurp("orth.gr"));
  const auto ok = compute_first(g);
  CHECK(ok.pairs.size() > 0);
  CHECK(compute_follow(g, ok.pairs).pairs.size() > 0);

  g.set_restrictor({});
  try {
    compute_first(g);
    FAIL("expected LimitExceeded");
  } catch (const LimitExceeded& e) {
    CHECK(e.kind() == LimitExceeded::Kind::iterations);
    CHECK(e.stats().iterations.size() == g.limits().max_iterations);
  }
  g.limits().max_pairs = 20;
  try {
    compute_first(g);
    FAIL("expected LimitExceeded");
  } catch (const LimitExceeded& e) {
    CHECK(e.kind() == LimitExceeded::Kind::pairs);
  }
}

TEST_CASE("results are antichains free of restricted paths") {
  for (const char* name : {"fig1.gr", "cf-intro.gr", "agr.gr", "orth.gr", "bench13.gr", "bench21.gr"}) {
    CAPTURE(name);
    const auto g = parse_grammar(slurp(name));
    for (Mode m : {Mode::active, Mode::naive}) {
      const auto first = compute_first(g, m);
      const auto follow = compute_follow(g, first.pairs, m);
      CHECK(first.pairs.is_antichain());
      CHECK(follow.pairs.is_antichain());
      CHECK(restricted_ok(first.pairs, g.restrictor()));
      CHECK(restricted_ok(follow.pairs, g.restrictor()));
    }
  }
}

TEST_CASE("both modes agree, and the active agenda never does more work") {
  auto check = [](const Grammar& g, const std::string& src) {
    const auto report = compare_modes(g);
    CHECK_MESSAGE(report.first_equivalent, src);
    CHECK_MESSAGE(report.follow_equivalent, src);
    CHECK(report.active.first.attempts() <= report.naive.first.attempts());
    CHECK(report.active.follow.attempts() <= report.naive.follow.attempts());
    CHECK(report.active.first.test_events <= report.naive.first.test_events);
  };
  for (const char* name : {"fig1.gr", "cf-intro.gr", "agr.gr", "orth.gr", "bench13.gr", "bench21.gr"}) {
    check(parse_grammar(slurp(name)), name);
  }
  std::mt19937 rng(1234);
  for (int n = 0; n < 100; ++n) {
    const auto src = testing::random_feature_grammar(rng);
    check(parse_grammar(src), src);
  }
}

TEST_CASE("each element is offered to each rule once in active mode") {
  std::mt19937 rng(555);
  for (int n = 0; n < 50; ++n) {
    const auto src = testing::random_feature_grammar(rng);
    const auto g = parse_grammar(src);
    const auto r = compute_first(g, Mode::active);
    const std::size_t rules = g.rules().size();
    CHECK(r.stats.test_events >= rules * r.pairs.size());
    CHECK(r.stats.test_events <= rules * r.pairs.created());
    for (std::size_t id : r.pairs.ids()) {
      for (std::size_t k = 0; k < rules; ++k) CHECK(r.pairs.tested(id, k));
    }
  }
}

TEST_CASE("considered never exceeds total") {
  for (const char* name : {"fig1.gr", "bench13.gr", "bench21.gr"}) {
    const auto g = parse_grammar(slurp(name));
    for (const auto& it : compute_first(g).stats.iterations) {
      CHECK(it.considered <= it.total);
      CHECK(it.considered >= 0);
    }
  }
}

TEST_CASE("the solution does not depend on rule order") {
  std::mt19937 rng(31337);
  for (int n = 0; n < 60; ++n) {
    const auto src = testing::random_feature_grammar(rng);
    std::vector<std::string> lines;
    std::string header;
    std::istringstream in(src);
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("restrict", 0) == 0) {
        header = line + "\n";
      } else {
        lines.push_back(line);
      }
    }
    // Keep the first rule in place so the start category is unchanged.
    std::shuffle(lines.begin() + 1, lines.end(), rng);
    std::string permuted = header;
    for (const auto& l : lines) permuted += l + "\n";

    const auto a = parse_grammar(src);
    const auto b = parse_grammar(permuted);
    const auto fa = compute_first(a);
    const auto fb = compute_first(b);
    CHECK_MESSAGE(equivalent_sets(fa.pairs, fb.pairs), permuted);
    CHECK_MESSAGE(equivalent_sets(compute_follow(a, fa.pairs).pairs, compute_follow(b, fb.pairs).pairs), permuted);
  }
}

TEST_CASE("the stored pairs carry their origin") {
  const auto g = parse_grammar(slurp("fig1.gr"));
  const auto r = compute_first(g);
  for (const Pair* p : r.pairs.elements()) {
    CHECK(p->restricted);
    // Identity pairs for preterminals are seeds, not derived by a rule.
    if (p->origin_rule == kNoRule) {
      CHECK(p->generation == 0);
      CHECK(p->lhs_root() == p->rhs_root());
      continue;
    }
    CHECK(p->origin_rule < g.rules().size());
    CHECK(p->generation >= 1);
    CHECK(p->generation <= r.stats.iterations.size());
  }
}
