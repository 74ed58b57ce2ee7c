// Feature-free grammars: projected pair sets against the classic set-based
// FIRST/FOLLOW computation, and against bounded derivations.

#include <doctest.h>

#include <random>

#include "featfirst/first_follow.hpp"
#include "support/grammars.hpp"

using namespace featfirst;
using namespace featfirst::testing;

TEST_CASE("projected FIRST and FOLLOW match the set-based computation") {
  std::mt19937 rng(2026);
  int checked = 0;
  for (int n = 0; n < 300; ++n) {
    const auto cf = random_cf(rng);
    const auto g = parse_grammar(cf.to_dsl());
    for (Mode m : {Mode::active, Mode::naive}) {
      const auto first = compute_first(g, m);
      const auto follow = compute_follow(g, first.pairs, m);
      CHECK_MESSAGE(project(first.pairs) == cf_first(cf), cf.to_dsl());
      CHECK_MESSAGE(project(follow.pairs) == cf_follow(cf), cf.to_dsl());
    }
    ++checked;
  }
  CHECK(checked == 300);
}

namespace {

using Firsts = std::map<std::string, std::set<std::string>>;

/// First terminals (or ε) of all derivation trees of height <= depth.
Firsts bounded(const CfGrammar& cf, int depth) {
  Firsts d;
  for (const auto& t : cf.terminals) d[t] = {t};
  for (int k = 0; k < depth; ++k) {
    Firsts next = d;
    for (const auto& r : cf.rules) {
      const auto f = cf_first_of(d, r.rhs.begin(), r.rhs.end());
      next[r.lhs].insert(f.begin(), f.end());
    }
    d = std::move(next);
  }
  return d;
}

}  // namespace

TEST_CASE("every first terminal of a bounded derivation is predicted") {
  std::mt19937 rng(99);
  for (int n = 0; n < 200; ++n) {
    const auto cf = random_cf(rng, 3, 8, 3);
    const auto g = parse_grammar(cf.to_dsl());
    const auto got = project(compute_first(g).pairs);
    for (const auto& [x, as] : bounded(cf, 6)) {
      if (cf.terminal(x)) continue;
      for (const auto& a : as) {
        const std::string why = cf.to_dsl() + " misses " + x + "," + a;
        CHECK_MESSAGE(got.count({x, a}), why);
      }
    }
  }
}
