#include <numeric>

#include "featfirst/first_follow.hpp"

namespace featfirst {

FeatureStructure Pair::lhs() const {
  std::vector<std::size_t> idx(lhs_arity);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return structure.select(idx);
}

bool pair_subsumes(const Pair& a, const Pair& b) {
  if (a.lhs_arity != b.lhs_arity || a.epsilon != b.epsilon) return false;
  return subsumes(a.structure, b.structure);
}

bool pair_equivalent(const Pair& a, const Pair& b) {
  return pair_subsumes(a, b) && pair_subsumes(b, a);
}

Pair restrict(const Pair& p, const Restrictor& phi) {
  Pair out = p;
  out.structure = prune_empty(restrict(p.structure, phi));
  out.restricted = true;
  return out;
}

bool PairSet::add(Pair p) {
  if (!p.restricted) throw std::logic_error("PairSet::add: pair has not been restricted");
  for (const auto& e : entries_) {
    if (e.alive && pair_subsumes(e.pair, p)) return false;
  }
  for (auto& e : entries_) {
    if (e.alive && pair_subsumes(p, e.pair)) {
      e.alive = false;
      --live_;
    }
  }
  entries_.push_back(Entry{std::move(p), true, std::vector<bool>(rule_count_, false)});
  ++live_;
  return true;
}

std::vector<const Pair*> PairSet::elements() const {
  std::vector<const Pair*> out;
  out.reserve(live_);
  for (const auto& e : entries_) {
    if (e.alive) out.push_back(&e.pair);
  }
  return out;
}

std::vector<std::size_t> PairSet::ids() const {
  std::vector<std::size_t> out;
  out.reserve(live_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].alive) out.push_back(i);
  }
  return out;
}

bool PairSet::tested(std::size_t id, std::size_t rule) const {
  return entries_.at(id).tested.at(rule);
}

bool PairSet::mark_tested(std::size_t id, std::size_t rule) {
  auto&& bit = entries_.at(id).tested.at(rule);
  if (bit) return false;
  bit = true;
  return true;
}

bool PairSet::is_antichain() const {
  const auto live = elements();
  for (std::size_t i = 0; i < live.size(); ++i) {
    for (std::size_t j = 0; j < live.size(); ++j) {
      if (i != j && pair_subsumes(*live[i], *live[j])) return false;
    }
  }
  return true;
}

const char* to_string(Mode m) { return m == Mode::naive ? "naive" : "active"; }

std::size_t IterationStats::attempts() const {
  std::size_t n = 0;
  for (const auto& it : iterations) n += it.attempts;
  return n;
}

bool equivalent_sets(const PairSet& a, const PairSet& b) {
  const auto ea = a.elements();
  const auto eb = b.elements();
  if (ea.size() != eb.size()) return false;
  std::vector<bool> used(eb.size(), false);
  for (const Pair* p : ea) {
    bool found = false;
    for (std::size_t j = 0; j < eb.size() && !found; ++j) {
      if (!used[j] && pair_equivalent(*p, *eb[j])) {
        used[j] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace featfirst
