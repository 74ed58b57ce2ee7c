#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace featfirst {

using NodeId = std::uint32_t;

struct Arc {
  std::string feature;
  NodeId target;
};

/// Result of an in-place unification.
enum class UnifyOutcome { ok, clash, cycle };

/// Arena of feature-structure nodes.
///
/// A node is either an atom or a complex node holding a feature->node map.
/// A complex node without arcs is the most general value and unifies with
/// anything, atoms included. Unification merges nodes by forwarding one to
/// the other, so every lookup goes through deref().
class Space {
 public:
  NodeId add_atom(std::string name);
  NodeId add_complex();

  /// Adds the arc `owner.feature -> target`. Returns false if `owner`
  /// already has that feature or is an atom.
  bool set_arc(NodeId owner, std::string_view feature, NodeId target);
  void remove_arc(NodeId owner, std::string_view feature);

  NodeId deref(NodeId id) const;
  bool is_atom(NodeId id) const;
  const std::string& atom_name(NodeId id) const;
  /// Arcs sorted by feature name. Targets are not dereferenced.
  std::span<const Arc> arcs(NodeId id) const;
  std::optional<NodeId> get(NodeId id, std::string_view feature) const;

  /// Destructive unification of two nodes of this space. On failure the
  /// space is left in an unspecified (but memory-safe) state.
  UnifyOutcome unify(NodeId a, NodeId b);

  /// Copies the graph reachable from `roots` in `src` into this space,
  /// preserving all sharing among them. Returns the new roots in order.
  std::vector<NodeId> import(const Space& src, std::span<const NodeId> roots);

  /// True when some cycle is reachable from `root`.
  bool has_cycle(NodeId root) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    bool atom = false;
    std::string name;
    std::vector<Arc> arcs;
    NodeId forward;
  };

  NodeId import_node(const Space& src, NodeId id,
                     std::unordered_map<NodeId, NodeId>& memo);

  std::vector<Node> nodes_;
};

/// One or more root nodes living in a private space. A category is the
/// single-rooted case; a rule or a FIRST/FOLLOW pair keeps several roots in
/// one space so that bindings between them are plain node sharing.
class FeatureStructure {
 public:
  FeatureStructure() = default;
  FeatureStructure(Space space, std::vector<NodeId> roots);

  /// The empty structure `[]`.
  static FeatureStructure top();
  static FeatureStructure atom(std::string name);

  const Space& space() const { return space_; }
  Space& space() { return space_; }
  std::span<const NodeId> roots() const { return roots_; }
  NodeId root(std::size_t i = 0) const { return space_.deref(roots_.at(i)); }
  std::size_t arity() const { return roots_.size(); }

  /// Copy holding only the nodes reachable from the selected roots.
  FeatureStructure select(std::span<const std::size_t> indices) const;
  FeatureStructure select(std::size_t index) const;

 private:
  Space space_;
  std::vector<NodeId> roots_;
};

class FeaturePath {
 public:
  /// Throws std::invalid_argument for an empty path or a malformed segment.
  explicit FeaturePath(std::vector<std::string> segments);
  /// Parses `a.b.c`.
  static FeaturePath parse(std::string_view dotted);
  static bool valid_segment(std::string_view s);

  const std::vector<std::string>& segments() const { return segments_; }
  std::string str() const;

  auto operator<=>(const FeaturePath&) const = default;

 private:
  std::vector<std::string> segments_;
};

/// Negative restrictor: the listed paths are discarded from a structure.
class Restrictor {
 public:
  Restrictor() = default;
  explicit Restrictor(std::set<FeaturePath> paths) : paths_(std::move(paths)) {}

  void add(FeaturePath p) { paths_.insert(std::move(p)); }
  const std::set<FeaturePath>& paths() const { return paths_; }
  bool empty() const { return paths_.empty(); }
  std::string str() const;

  friend bool operator==(const Restrictor&, const Restrictor&) = default;

 private:
  std::set<FeaturePath> paths_;
};

// Algebra. Multi-rooted operands are combined root by root inside one space,
// so binary operations require equal arity.

/// Unification; inputs are untouched. std::nullopt on clash or cycle, with
/// the reason stored in `why` when given.
std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b,
                                      UnifyOutcome* why = nullptr);

/// a is at most as informative as b (a subsumes b), reentrancies included.
bool subsumes(const FeatureStructure& a, const FeatureStructure& b);

bool equivalent(const FeatureStructure& a, const FeatureStructure& b);

/// Anti-unification: the most specific structure subsuming both.
FeatureStructure generalize(const FeatureStructure& a, const FeatureStructure& b);

/// Removes, at every node reachable from a root by a path prefix, the arc
/// named by the final segment.
FeatureStructure restrict(const FeatureStructure& fs, const Restrictor& phi);

/// Fresh copy sharing no node with the input.
FeatureStructure clone(const FeatureStructure& fs);

/// Drops arcs whose value is an empty complex node reached from nowhere
/// else. The result unifies with exactly the structures `fs` unifies with.
FeatureStructure prune_empty(const FeatureStructure& fs);

/// True when `p` is defined from any root of `fs`.
bool contains_path(const FeatureStructure& fs, const FeaturePath& p);

/// Node-level subsumption between two (possibly different) spaces, with a
/// joint mapping across all root pairs.
bool subsumes_roots(const Space& a, std::span<const NodeId> a_roots,
                    const Space& b, std::span<const NodeId> b_roots);

}  // namespace featfirst
