#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "featfirst/feature_structure.hpp"
#include "featfirst/grammar.hpp"

namespace featfirst {

inline constexpr std::size_t kNoRule = std::numeric_limits<std::size_t>::max();

/// An element of a FIRST or FOLLOW solution. The lhs (one category, or a
/// category string for on-demand FIRST) and the rhs share one space, so
/// bindings between them are node sharing. Roots: lhs..., rhs.
struct Pair {
  FeatureStructure structure;
  std::size_t lhs_arity = 1;
  /// rhs stands for the empty string; it then holds the grammar's ε-category.
  bool epsilon = false;
  bool restricted = false;
  std::size_t origin_rule = kNoRule;
  std::size_t generation = 0;

  NodeId lhs_root(std::size_t i = 0) const { return structure.root(i); }
  NodeId rhs_root() const { return structure.root(lhs_arity); }
  FeatureStructure lhs() const;
  FeatureStructure rhs() const { return structure.select(lhs_arity); }
};

/// Joint subsumption of the two-rooted spaces; also requires equal lhs
/// arity and the same ε flag.
bool pair_subsumes(const Pair& a, const Pair& b);
bool pair_equivalent(const Pair& a, const Pair& b);

/// Applies the negative restrictor to every root of the pair, then drops
/// empty values nothing else refers to.
Pair restrict(const Pair& p, const Restrictor& phi);

/// Subsumption antichain with the `+≤` insertion and a per-rule record of
/// which elements have already been tested against each rule.
class PairSet {
 public:
  explicit PairSet(std::size_t rule_count = 0) : rule_count_(rule_count) {}

  /// `+≤`: drops p if an element subsumes it, otherwise removes every
  /// element p subsumes and inserts p as a new, untested element.
  /// Returns true if the set changed. Throws std::logic_error for an
  /// unrestricted pair.
  bool add(Pair p);

  /// Live elements in creation order.
  std::vector<const Pair*> elements() const;
  std::vector<std::size_t> ids() const;
  const Pair& at(std::size_t id) const { return entries_.at(id).pair; }
  bool alive(std::size_t id) const { return entries_.at(id).alive; }
  std::size_t size() const { return live_; }
  std::size_t created() const { return entries_.size(); }

  bool tested(std::size_t id, std::size_t rule) const;
  /// Returns true when the mark is new.
  bool mark_tested(std::size_t id, std::size_t rule);

  /// True when no two live elements are related by subsumption.
  bool is_antichain() const;

 private:
  struct Entry {
    Pair pair;
    bool alive = true;
    std::vector<bool> tested;
  };
  std::size_t rule_count_;
  std::vector<Entry> entries_;
  std::size_t live_ = 0;
};

enum class Mode { naive, active };
const char* to_string(Mode m);

struct IterationStat {
  /// Mean, over visits to rules with daughters, of the number of distinct
  /// set elements whose lhs was unified against some daughter.
  double considered = 0;
  /// Mean set size at the start of those visits.
  double total = 0;
  std::size_t size_at_end = 0;
  std::size_t attempts = 0;
  std::size_t visits = 0;
  bool changed = false;
};

struct IterationStats {
  std::vector<IterationStat> iterations;
  /// (pair, rule) test events: each time an element is offered to a rule.
  std::size_t test_events = 0;

  std::size_t attempts() const;
};

struct Result {
  PairSet pairs;
  IterationStats stats;
};

class LimitExceeded : public std::runtime_error {
 public:
  enum class Kind { iterations, pairs };
  LimitExceeded(Kind kind, std::size_t limit, IterationStats stats);
  Kind kind() const { return kind_; }
  const IterationStats& stats() const { return stats_; }

 private:
  Kind kind_;
  IterationStats stats_;
};

class UnknownCategory : public std::runtime_error {
 public:
  explicit UnknownCategory(std::size_t index);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// The grammar's ε-category: the generalization of all restricted ε-rule
/// mothers, or std::nullopt without ε-rules.
std::optional<FeatureStructure> epsilon_category(const Grammar& g);

/// The reserved `[cat=$]`.
FeatureStructure end_mark();

Result compute_first(const Grammar& g, Mode mode = Mode::active);
Result compute_follow(const Grammar& g, const PairSet& first, Mode mode = Mode::active);

/// FIRST of a category string, computed on demand from a FIRST fixpoint.
/// Preterminal members count as their own FIRST. Throws UnknownCategory.
PairSet first_of_string(const PairSet& first, const Grammar& g, const FeatureStructure& cats);

struct QueryAnswer {
  FeatureStructure category;
  bool epsilon = false;
};

/// rhs values of every pair whose lhs unifies with `c`, with the bindings of
/// that unification applied; deduplicated up to equivalence.
std::vector<QueryAnswer> query(const PairSet& result, const FeatureStructure& c);

/// Pair-for-pair equivalence of two solutions.
bool equivalent_sets(const PairSet& a, const PairSet& b);

struct ModeRun {
  IterationStats first;
  IterationStats follow;
  double first_ms = 0;
  double follow_ms = 0;
  std::size_t first_size = 0;
  std::size_t follow_size = 0;
};

struct ModeReport {
  ModeRun naive;
  ModeRun active;
  bool first_equivalent = false;
  bool follow_equivalent = false;
};

/// Runs both modes for FIRST and FOLLOW. Propagates LimitExceeded.
ModeReport compare_modes(const Grammar& g);

}  // namespace featfirst
