#include "featfirst/grammar.hpp"

#include <deque>
#include <stdexcept>

namespace featfirst {

Rule::Rule(std::size_t id, FeatureStructure structure, std::size_t line)
    : id_(id), line_(line), structure_(std::move(structure)) {
  if (structure_.arity() == 0) throw std::invalid_argument("rule without mother");
}

bool Rule::daughter_is_preterminal(std::size_t i) const {
  return is_preterminal(structure_, i);
}

Rule Rule::instantiate() const { return Rule(id_, clone(structure_), line_); }

Grammar::Grammar(std::vector<Rule> rules, Restrictor restrictor,
                 std::optional<FeatureStructure> declared_start, LabelMap labels)
    : rules_(std::move(rules)),
      restrictor_(std::move(restrictor)),
      declared_start_(std::move(declared_start)),
      labels_(std::move(labels)) {
  if (rules_.empty()) throw std::invalid_argument("grammar has no rules");
}

FeatureStructure Grammar::start() const {
  if (declared_start_) return clone(*declared_start_);
  return rules_.front().mother();
}

std::string format_grammar(const Grammar& g) {
  std::string out;
  if (!g.restrictor().empty()) out += "restrict " + g.restrictor().str() + ".\n";
  if (g.start_declared()) out += "start " + format(g.start(), &g.labels()) + ".\n";
  for (const auto& rule : g.rules()) {
    const auto& fs = rule.structure();
    const auto cats = format_roots(fs.space(), fs.roots(), &g.labels());
    out += cats[0] + " ->";
    for (std::size_t i = 1; i < cats.size(); ++i) out += " " + cats[i];
    out += ".\n";
  }
  return out;
}

namespace {

bool unifiable(const FeatureStructure& a, const FeatureStructure& b) {
  return unify(a, b).has_value();
}

}  // namespace

std::vector<Diagnostic> validate(const Grammar& g) {
  std::vector<Diagnostic> out;
  const auto& phi = g.restrictor();
  const auto& rules = g.rules();

  std::vector<FeatureStructure> mothers;
  mothers.reserve(rules.size());
  for (const auto& r : rules) mothers.push_back(restrict(r.mother(), phi));

  auto matching_mothers = [&](const FeatureStructure& cat) {
    std::vector<std::size_t> hits;
    for (std::size_t m = 0; m < mothers.size(); ++m) {
      if (unifiable(cat, mothers[m])) hits.push_back(m);
    }
    return hits;
  };

  for (const auto& r : rules) {
    const auto text = format_roots(r.structure().space(), r.structure().roots(), &g.labels());
    if (is_preterminal(r.structure(), 0)) {
      if (r.is_epsilon()) {
        out.push_back({Severity::warning, r.id(), 0, r.line(),
                       "rule " + std::to_string(r.id() + 1) + ": epsilon rule has a preterminal mother " + text[0]});
      } else {
        out.push_back({Severity::error, r.id(), 0, r.line(),
                       "rule " + std::to_string(r.id() + 1) + ": mother " + text[0] + " is marked preterminal"});
      }
    }
    for (std::size_t d = 1; d <= r.daughter_count(); ++d) {
      if (r.daughter_is_preterminal(d)) continue;
      if (matching_mothers(restrict(r.category(d), phi)).empty()) {
        out.push_back({Severity::error, r.id(), d, r.line(),
                       "rule " + std::to_string(r.id() + 1) + ", daughter " + std::to_string(d) + ": " +
                           text[d] + " unifies with no rule mother"});
      }
    }
  }

  // Reachability from the start category through non-preterminal daughters.
  std::vector<bool> reached(rules.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t m : matching_mothers(restrict(g.start(), phi))) {
    reached[m] = true;
    queue.push_back(m);
  }
  while (!queue.empty()) {
    const auto& r = rules[queue.front()];
    queue.pop_front();
    for (std::size_t d = 1; d <= r.daughter_count(); ++d) {
      if (r.daughter_is_preterminal(d)) continue;
      for (std::size_t m : matching_mothers(restrict(r.category(d), phi))) {
        if (!reached[m]) {
          reached[m] = true;
          queue.push_back(m);
        }
      }
    }
  }
  for (const auto& r : rules) {
    if (!reached[r.id()]) {
      out.push_back({Severity::warning, r.id(), 0, r.line(),
                     "rule " + std::to_string(r.id() + 1) + " is unreachable from the start category"});
    }
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

}  // namespace featfirst
