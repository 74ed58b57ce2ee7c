#include "featfirst/first_follow.hpp"

#include <chrono>
#include <unordered_set>

namespace featfirst {

LimitExceeded::LimitExceeded(Kind kind, std::size_t limit, IterationStats stats)
    : std::runtime_error(std::string(kind == Kind::iterations ? "max_iterations" : "max_pairs") +
                         " limit of " + std::to_string(limit) +
                         " exceeded; the restrictor does not force a finite solution"),
      kind_(kind),
      stats_(std::move(stats)) {}

UnknownCategory::UnknownCategory(std::size_t index)
    : std::runtime_error("category " + std::to_string(index + 1) +
                         " is neither preterminal nor unifiable with any FIRST lhs"),
      index_(index) {}

std::optional<FeatureStructure> epsilon_category(const Grammar& g) {
  std::optional<FeatureStructure> eps;
  for (const auto& r : g.rules()) {
    if (!r.is_epsilon()) continue;
    auto m = restrict(r.mother(), g.restrictor());
    eps = eps ? generalize(*eps, m) : std::move(m);
  }
  return eps;
}

FeatureStructure end_mark() {
  Space s;
  const NodeId root = s.add_complex();
  s.set_arc(root, kCatFeature, s.add_atom(std::string(kEndMarkAtom)));
  return FeatureStructure(std::move(s), {root});
}

namespace {

// A partial assignment: the rule (or string) space after some unifications,
// plus the rhs node of the most recently unified pair.
struct Branch {
  Space space;
  NodeId rhs = 0;
};

bool cat_clash(const Space& a, NodeId x, const Space& b, NodeId y) {
  const auto ca = a.get(x, kCatFeature);
  const auto cb = b.get(y, kCatFeature);
  return ca && cb && a.is_atom(*ca) && b.is_atom(*cb) && a.atom_name(*ca) != b.atom_name(*cb);
}

// Joins `pair` into a copy of `base` and unifies `target` with its lhs.
std::optional<Branch> attempt(const Space& base, NodeId target, const Pair& pair,
                              std::size_t& attempts) {
  ++attempts;
  if (cat_clash(base, target, pair.structure.space(), pair.lhs_root())) return std::nullopt;
  Branch b{base, 0};
  const auto imported = b.space.import(pair.structure.space(), pair.structure.roots());
  if (b.space.unify(target, imported.front()) != UnifyOutcome::ok) return std::nullopt;
  b.rhs = imported.back();
  return b;
}

Pair make_pair(const Space& space, const std::vector<NodeId>& lhs, NodeId rhs) {
  std::vector<NodeId> roots = lhs;
  roots.push_back(rhs);
  Space out;
  auto r = out.import(space, roots);
  Pair p;
  p.structure = FeatureStructure(std::move(out), std::move(r));
  p.lhs_arity = lhs.size();
  return p;
}

Pair make_epsilon_pair(const Space& space, const std::vector<NodeId>& lhs,
                       const FeatureStructure& eps) {
  Space out;
  auto roots = out.import(space, lhs);
  roots.push_back(out.import(eps.space(), eps.roots()).front());
  Pair p;
  p.structure = FeatureStructure(std::move(out), std::move(roots));
  p.lhs_arity = lhs.size();
  p.epsilon = true;
  return p;
}

Pair identity_pair(const FeatureStructure& category) {
  Pair p;
  const NodeId root = category.roots().front();
  p.structure = FeatureStructure(category.space(), {root, root});
  return p;
}

// Shared fixpoint bookkeeping for FIRST and FOLLOW.
class Fixpoint {
 public:
  Fixpoint(const Grammar& g, Mode mode, PairSet& set, IterationStats& stats)
      : g_(g), mode_(mode), set_(set), stats_(stats) {}

  bool active() const { return mode_ == Mode::active; }
  std::size_t iteration() const { return iteration_; }
  PairSet& set() { return set_; }
  std::size_t& attempts() { return current_.attempts; }

  void add(Pair p, std::size_t rule) {
    p.origin_rule = rule;
    p.generation = iteration_;
    if (!set_.add(restrict(p, g_.restrictor()))) return;
    current_.changed = true;
    if (set_.size() > g_.limits().max_pairs) {
      auto partial = stats_;
      current_.size_at_end = set_.size();
      partial.iterations.push_back(current_);
      throw LimitExceeded(LimitExceeded::Kind::pairs, g_.limits().max_pairs, std::move(partial));
    }
  }

  /// `visit(rule, snapshot)` returns the number of distinct elements whose
  /// lhs it tried to unify.
  template <class Visit>
  void run(Visit visit) {
    for (iteration_ = 1;; ++iteration_) {
      current_ = {};
      double considered = 0;
      double total = 0;
      for (const Rule& r : g_.rules()) {
        const auto snapshot = set_.ids();
        const std::size_t n = visit(r, snapshot);
        if (!r.is_epsilon()) {
          considered += static_cast<double>(n);
          total += static_cast<double>(snapshot.size());
          ++current_.visits;
        }
        for (std::size_t id : snapshot) {
          const bool fresh = set_.mark_tested(id, r.id());
          if (fresh || !active()) ++stats_.test_events;
        }
      }
      current_.size_at_end = set_.size();
      if (current_.visits > 0) {
        current_.considered = considered / static_cast<double>(current_.visits);
        current_.total = total / static_cast<double>(current_.visits);
      } else {
        current_.total = static_cast<double>(set_.size());
      }
      stats_.iterations.push_back(current_);
      if (!current_.changed) return;
      if (iteration_ >= g_.limits().max_iterations) {
        throw LimitExceeded(LimitExceeded::Kind::iterations, g_.limits().max_iterations, stats_);
      }
    }
  }

 private:
  const Grammar& g_;
  Mode mode_;
  PairSet& set_;
  IterationStats& stats_;
  IterationStat current_;
  std::size_t iteration_ = 0;
};

struct Partition {
  std::vector<std::size_t> nonempty;
  std::vector<std::size_t> empty;
};

Partition partition(const PairSet& set, const std::vector<std::size_t>& ids) {
  Partition out;
  for (std::size_t id : ids) {
    if (!set.alive(id)) continue;
    (set.at(id).epsilon ? out.empty : out.nonempty).push_back(id);
  }
  return out;
}

std::vector<NodeId> as_vector(std::span<const NodeId> s) { return {s.begin(), s.end()}; }

}  // namespace

Result compute_first(const Grammar& g, Mode mode) {
  Result result{PairSet(g.rules().size()), {}};
  Fixpoint fp(g, mode, result.pairs, result.stats);
  const auto eps = epsilon_category(g);

  // Every preterminal daughter X contributes (X, X).
  for (const auto& r : g.rules()) {
    for (std::size_t d = 1; d <= r.daughter_count(); ++d) {
      if (r.daughter_is_preterminal(d)) fp.add(identity_pair(r.category(d)), kNoRule);
    }
  }

  fp.run([&](const Rule& rule, const std::vector<std::size_t>& snapshot) -> std::size_t {
    const auto& fs = rule.structure();
    const auto roots = as_vector(fs.roots());
    if (rule.is_epsilon()) {
      fp.add(make_epsilon_pair(fs.space(), {roots[0]}, *eps), rule.id());
      return 0;
    }
    PairSet& set = fp.set();
    const auto parts = partition(set, snapshot);
    const std::size_t r = rule.id();
    auto untested = [&](std::size_t id) { return !set.tested(id, r); };
    if (fp.active()) {
      bool any = false;
      for (std::size_t id : snapshot) any = any || untested(id);
      if (!any) return 0;
    }
    std::unordered_set<std::size_t> considered;
    const std::size_t k = rule.daughter_count();

    // Daughters 1..j-1 are already unified with ε-elements in `space`.
    auto dfs = [&](auto& self, const Space& space, std::size_t j, bool fresh) -> void {
      if (j > k) {
        if (!fp.active() || fresh) fp.add(make_epsilon_pair(space, {roots[0]}, *eps), r);
        return;
      }
      for (std::size_t id : parts.nonempty) {
        const bool nu = untested(id);
        if (fp.active() && !fresh && !nu) continue;
        considered.insert(id);
        if (auto b = attempt(space, roots[j], set.at(id), fp.attempts())) {
          fp.add(make_pair(b->space, {roots[0]}, b->rhs), r);
        }
      }
      for (std::size_t id : parts.empty) {
        considered.insert(id);
        if (auto b = attempt(space, roots[j], set.at(id), fp.attempts())) {
          self(self, b->space, j + 1, fresh || untested(id));
        }
      }
    };
    dfs(dfs, fs.space(), 1, false);
    return considered.size();
  });
  return result;
}

Result compute_follow(const Grammar& g, const PairSet& first, Mode mode) {
  Result result{PairSet(g.rules().size()), {}};
  Fixpoint fp(g, mode, result.pairs, result.stats);
  const auto first_parts = partition(first, first.ids());

  {
    const auto start = g.start();
    const auto end = end_mark();
    Space s = start.space();
    const NodeId rhs = s.import(end.space(), end.roots()).front();
    fp.add(make_pair(s, {start.roots().front()}, rhs), kNoRule);
  }

  fp.run([&](const Rule& rule, const std::vector<std::size_t>& snapshot) -> std::size_t {
    if (rule.is_epsilon()) return 0;
    PairSet& set = fp.set();
    const std::size_t r = rule.id();
    const bool first_visit = fp.iteration() == 1;
    auto untested = [&](std::size_t id) { return !set.tested(id, r); };
    if (fp.active() && !first_visit) {
      bool any = false;
      for (std::size_t id : snapshot) any = any || untested(id);
      if (!any) return 0;
    }
    const bool use_first = !fp.active() || first_visit;
    const auto& fs = rule.structure();
    const auto roots = as_vector(fs.roots());
    const std::size_t k = rule.daughter_count();
    std::unordered_set<std::size_t> considered;

    for (std::size_t i = 1; i <= k; ++i) {
      // Daughters i+1..m-1 are unified with ε-elements of FIRST in `space`.
      auto dfs = [&](auto& self, const Space& space, std::size_t m) -> void {
        if (m > k) {
          for (std::size_t id : snapshot) {
            if (!set.alive(id)) continue;
            if (fp.active() && !first_visit && !untested(id)) continue;
            considered.insert(id);
            if (auto b = attempt(space, roots[0], set.at(id), fp.attempts())) {
              fp.add(make_pair(b->space, {roots[i]}, b->rhs), r);
            }
          }
          return;
        }
        if (use_first) {
          for (std::size_t id : first_parts.nonempty) {
            if (auto b = attempt(space, roots[m], first.at(id), fp.attempts())) {
              fp.add(make_pair(b->space, {roots[i]}, b->rhs), r);
            }
          }
        }
        for (std::size_t id : first_parts.empty) {
          if (auto b = attempt(space, roots[m], first.at(id), fp.attempts())) {
            self(self, b->space, m + 1);
          }
        }
      };
      dfs(dfs, fs.space(), i + 1);
    }
    return considered.size();
  });
  return result;
}

PairSet first_of_string(const PairSet& first, const Grammar& g, const FeatureStructure& cats) {
  PairSet local = first;
  for (std::size_t c = 0; c < cats.arity(); ++c) {
    const auto cat = cats.select(c);
    if (is_preterminal(cat)) {
      auto p = restrict(identity_pair(cat), g.restrictor());
      local.add(std::move(p));
      continue;
    }
    bool known = false;
    for (const Pair* p : first.elements()) {
      if (p->lhs_arity == 1 && unify(cat, p->lhs())) {
        known = true;
        break;
      }
    }
    if (!known) throw UnknownCategory(c);
  }

  const auto eps = epsilon_category(g);
  const auto parts = partition(local, local.ids());
  const auto roots = as_vector(cats.roots());
  const std::size_t n = roots.size();
  PairSet out;
  std::size_t attempts = 0;
  auto add = [&](Pair p) { out.add(restrict(p, g.restrictor())); };

  auto dfs = [&](auto& self, const Space& space, std::size_t j) -> void {
    if (j == n) {
      if (eps) add(make_epsilon_pair(space, roots, *eps));
      return;
    }
    for (std::size_t id : parts.nonempty) {
      if (auto b = attempt(space, roots[j], local.at(id), attempts)) add(make_pair(b->space, roots, b->rhs));
    }
    for (std::size_t id : parts.empty) {
      if (auto b = attempt(space, roots[j], local.at(id), attempts)) self(self, b->space, j + 1);
    }
  };
  dfs(dfs, cats.space(), 0);
  return out;
}

std::vector<QueryAnswer> query(const PairSet& result, const FeatureStructure& c) {
  std::vector<QueryAnswer> out;
  for (const Pair* p : result.elements()) {
    if (p->lhs_arity != c.arity()) continue;
    Space s = p->structure.space();
    const auto mine = s.import(c.space(), c.roots());
    bool ok = true;
    for (std::size_t i = 0; i < mine.size() && ok; ++i) {
      ok = s.unify(p->structure.roots()[i], mine[i]) == UnifyOutcome::ok;
    }
    if (!ok) continue;
    Space rs;
    auto root = rs.import(s, std::vector<NodeId>{p->structure.roots()[p->lhs_arity]});
    QueryAnswer answer{FeatureStructure(std::move(rs), std::move(root)), p->epsilon};

    bool keep = true;
    for (auto& existing : out) {
      if (existing.epsilon != answer.epsilon) continue;
      if (subsumes(answer.category, existing.category)) {
        keep = false;  // existing is at least as specific
        break;
      }
      if (subsumes(existing.category, answer.category)) {
        existing = std::move(answer);
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(std::move(answer));
  }
  return out;
}

ModeReport compare_modes(const Grammar& g) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  ModeReport report;
  Result first[2];
  Result follow[2];
  for (int m = 0; m < 2; ++m) {
    const Mode mode = m == 0 ? Mode::naive : Mode::active;
    ModeRun& run = m == 0 ? report.naive : report.active;
    auto t0 = clock::now();
    first[m] = compute_first(g, mode);
    auto t1 = clock::now();
    follow[m] = compute_follow(g, first[m].pairs, mode);
    auto t2 = clock::now();
    run.first = first[m].stats;
    run.follow = follow[m].stats;
    run.first_ms = ms(t1 - t0);
    run.follow_ms = ms(t2 - t1);
    run.first_size = first[m].pairs.size();
    run.follow_size = follow[m].pairs.size();
  }
  report.first_equivalent = equivalent_sets(first[0].pairs, first[1].pairs);
  report.follow_equivalent = equivalent_sets(follow[0].pairs, follow[1].pairs);
  return report;
}

}  // namespace featfirst
