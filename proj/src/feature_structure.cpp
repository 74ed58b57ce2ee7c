#include "featfirst/feature_structure.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace featfirst {

namespace {

auto find_arc(std::vector<Arc>& arcs, std::string_view feature) {
  return std::lower_bound(arcs.begin(), arcs.end(), feature,
                          [](const Arc& a, std::string_view f) { return a.feature < f; });
}

}  // namespace

NodeId Space::add_atom(std::string name) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{true, std::move(name), {}, id});
  return id;
}

NodeId Space::add_complex() {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{false, {}, {}, id});
  return id;
}

bool Space::set_arc(NodeId owner, std::string_view feature, NodeId target) {
  Node& n = nodes_.at(deref(owner));
  if (n.atom) return false;
  auto it = find_arc(n.arcs, feature);
  if (it != n.arcs.end() && it->feature == feature) return false;
  n.arcs.insert(it, Arc{std::string(feature), target});
  return true;
}

void Space::remove_arc(NodeId owner, std::string_view feature) {
  Node& n = nodes_.at(deref(owner));
  auto it = find_arc(n.arcs, feature);
  if (it != n.arcs.end() && it->feature == feature) n.arcs.erase(it);
}

NodeId Space::deref(NodeId id) const {
  while (nodes_.at(id).forward != id) id = nodes_[id].forward;
  return id;
}

bool Space::is_atom(NodeId id) const { return nodes_[deref(id)].atom; }

const std::string& Space::atom_name(NodeId id) const { return nodes_[deref(id)].name; }

std::span<const Arc> Space::arcs(NodeId id) const { return nodes_[deref(id)].arcs; }

std::optional<NodeId> Space::get(NodeId id, std::string_view feature) const {
  const auto& arcs = nodes_[deref(id)].arcs;
  auto it = std::lower_bound(arcs.begin(), arcs.end(), feature,
                             [](const Arc& a, std::string_view f) { return a.feature < f; });
  if (it == arcs.end() || it->feature != feature) return std::nullopt;
  return deref(it->target);
}

UnifyOutcome Space::unify(NodeId a, NodeId b) {
  std::vector<std::pair<NodeId, NodeId>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    x = deref(x);
    y = deref(y);
    if (x == y) continue;
    Node& nx = nodes_[x];
    Node& ny = nodes_[y];
    if (nx.atom && ny.atom) {
      if (nx.name != ny.name) return UnifyOutcome::clash;
      nx.forward = y;
      continue;
    }
    if (nx.atom || ny.atom) {
      // An atom absorbs only an arc-less complex node.
      Node& complex = nx.atom ? ny : nx;
      if (!complex.arcs.empty()) return UnifyOutcome::clash;
      complex.forward = nx.atom ? x : y;
      continue;
    }
    auto moved = std::move(nx.arcs);
    nx.arcs.clear();
    nx.forward = y;
    for (auto& arc : moved) {
      auto it = find_arc(ny.arcs, arc.feature);
      if (it != ny.arcs.end() && it->feature == arc.feature) {
        work.emplace_back(arc.target, it->target);
      } else {
        ny.arcs.insert(it, std::move(arc));
      }
    }
  }
  if (has_cycle(a)) return UnifyOutcome::cycle;
  return UnifyOutcome::ok;
}

bool Space::has_cycle(NodeId root) const {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<unsigned char> color(nodes_.size(), 0);
  std::vector<std::pair<NodeId, std::size_t>> stack{{deref(root), 0}};
  color[stack.back().first] = 1;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const auto& arcs = nodes_[id].arcs;
    if (next == arcs.size()) {
      color[id] = 2;
      stack.pop_back();
      continue;
    }
    const NodeId child = deref(arcs[next++].target);
    if (color[child] == 1) return true;
    if (color[child] == 0) {
      color[child] = 1;
      stack.emplace_back(child, 0);
    }
  }
  return false;
}

NodeId Space::import_node(const Space& src, NodeId id,
                          std::unordered_map<NodeId, NodeId>& memo) {
  id = src.deref(id);
  if (auto it = memo.find(id); it != memo.end()) return it->second;
  if (src.is_atom(id)) {
    const NodeId n = add_atom(src.atom_name(id));
    memo.emplace(id, n);
    return n;
  }
  const NodeId n = add_complex();
  memo.emplace(id, n);
  // Copy arcs by value: recursion may grow nodes_ and src may alias *this.
  const std::vector<Arc> arcs(src.arcs(id).begin(), src.arcs(id).end());
  std::vector<Arc> out;
  out.reserve(arcs.size());
  for (const auto& arc : arcs) out.push_back(Arc{arc.feature, import_node(src, arc.target, memo)});
  nodes_[n].arcs = std::move(out);
  return n;
}

std::vector<NodeId> Space::import(const Space& src, std::span<const NodeId> roots) {
  std::unordered_map<NodeId, NodeId> memo;
  std::vector<NodeId> out;
  out.reserve(roots.size());
  for (NodeId r : roots) out.push_back(import_node(src, r, memo));
  return out;
}

FeatureStructure::FeatureStructure(Space space, std::vector<NodeId> roots)
    : space_(std::move(space)), roots_(std::move(roots)) {}

FeatureStructure FeatureStructure::top() {
  Space s;
  const NodeId r = s.add_complex();
  return FeatureStructure(std::move(s), {r});
}

FeatureStructure FeatureStructure::atom(std::string name) {
  Space s;
  const NodeId r = s.add_atom(std::move(name));
  return FeatureStructure(std::move(s), {r});
}

FeatureStructure FeatureStructure::select(std::span<const std::size_t> indices) const {
  std::vector<NodeId> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(roots_.at(i));
  Space s;
  auto roots = s.import(space_, picked);
  return FeatureStructure(std::move(s), std::move(roots));
}

FeatureStructure FeatureStructure::select(std::size_t index) const {
  const std::size_t idx[] = {index};
  return select(std::span<const std::size_t>(idx));
}

bool FeaturePath::valid_segment(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

FeaturePath::FeaturePath(std::vector<std::string> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("empty feature path");
  for (const auto& s : segments_) {
    if (!valid_segment(s)) throw std::invalid_argument("malformed feature name '" + s + "'");
  }
}

FeaturePath FeaturePath::parse(std::string_view dotted) {
  std::vector<std::string> segs;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    segs.emplace_back(dotted.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return FeaturePath(std::move(segs));
}

std::string FeaturePath::str() const {
  std::string out;
  for (const auto& s : segments_) {
    if (!out.empty()) out += '.';
    out += s;
  }
  return out;
}

std::string Restrictor::str() const {
  std::string out;
  for (const auto& p : paths_) {
    if (!out.empty()) out += ", ";
    out += p.str();
  }
  return out;
}

std::optional<FeatureStructure> unify(const FeatureStructure& a, const FeatureStructure& b,
                                      UnifyOutcome* why) {
  if (a.arity() != b.arity()) throw std::invalid_argument("unify: arity mismatch");
  Space s;
  auto ra = s.import(a.space(), a.roots());
  auto rb = s.import(b.space(), b.roots());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const auto outcome = s.unify(ra[i], rb[i]);
    if (why) *why = outcome;
    if (outcome != UnifyOutcome::ok) return std::nullopt;
  }
  if (why) *why = UnifyOutcome::ok;
  Space compact;
  auto roots = compact.import(s, ra);
  return FeatureStructure(std::move(compact), std::move(roots));
}

namespace {

bool subsumes_node(const Space& a, NodeId x, const Space& b, NodeId y,
                   std::unordered_map<NodeId, NodeId>& mapping) {
  x = a.deref(x);
  y = b.deref(y);
  if (auto it = mapping.find(x); it != mapping.end()) return it->second == y;
  mapping.emplace(x, y);
  if (a.is_atom(x)) return b.is_atom(y) && a.atom_name(x) == b.atom_name(y);
  const auto arcs = a.arcs(x);
  if (arcs.empty()) return true;
  if (b.is_atom(y)) return false;
  for (const auto& arc : arcs) {
    const auto target = b.get(y, arc.feature);
    if (!target || !subsumes_node(a, arc.target, b, *target, mapping)) return false;
  }
  return true;
}

}  // namespace

bool subsumes_roots(const Space& a, std::span<const NodeId> a_roots, const Space& b,
                    std::span<const NodeId> b_roots) {
  if (a_roots.size() != b_roots.size()) return false;
  std::unordered_map<NodeId, NodeId> mapping;
  for (std::size_t i = 0; i < a_roots.size(); ++i) {
    if (!subsumes_node(a, a_roots[i], b, b_roots[i], mapping)) return false;
  }
  return true;
}

bool subsumes(const FeatureStructure& a, const FeatureStructure& b) {
  return subsumes_roots(a.space(), a.roots(), b.space(), b.roots());
}

bool equivalent(const FeatureStructure& a, const FeatureStructure& b) {
  return subsumes(a, b) && subsumes(b, a);
}

namespace {

struct Generalizer {
  const Space& a;
  const Space& b;
  Space out;
  std::unordered_map<std::uint64_t, NodeId> memo;

  NodeId visit(NodeId x, NodeId y) {
    x = a.deref(x);
    y = b.deref(y);
    const std::uint64_t key = (std::uint64_t{x} << 32) | y;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (a.is_atom(x) && b.is_atom(y) && a.atom_name(x) == b.atom_name(y)) {
      const NodeId n = out.add_atom(a.atom_name(x));
      memo.emplace(key, n);
      return n;
    }
    const NodeId n = out.add_complex();
    memo.emplace(key, n);
    if (a.is_atom(x) || b.is_atom(y)) return n;
    for (const auto& arc : a.arcs(x)) {
      if (auto other = b.get(y, arc.feature)) {
        const NodeId child = visit(arc.target, *other);
        out.set_arc(n, arc.feature, child);
      }
    }
    return n;
  }
};

}  // namespace

FeatureStructure generalize(const FeatureStructure& a, const FeatureStructure& b) {
  if (a.arity() != b.arity()) throw std::invalid_argument("generalize: arity mismatch");
  Generalizer g{a.space(), b.space(), {}, {}};
  std::vector<NodeId> roots;
  for (std::size_t i = 0; i < a.arity(); ++i) roots.push_back(g.visit(a.roots()[i], b.roots()[i]));
  return FeatureStructure(std::move(g.out), std::move(roots));
}

namespace {

std::vector<NodeId> resolve(const Space& s, std::span<const NodeId> roots,
                            std::span<const std::string> prefix) {
  std::vector<NodeId> out;
  for (NodeId r : roots) {
    std::optional<NodeId> cur = s.deref(r);
    for (const auto& seg : prefix) {
      if (!cur) break;
      cur = s.get(*cur, seg);
    }
    if (cur) out.push_back(*cur);
  }
  return out;
}

}  // namespace

FeatureStructure restrict(const FeatureStructure& fs, const Restrictor& phi) {
  if (phi.empty()) return clone(fs);
  Space s;
  auto roots = s.import(fs.space(), fs.roots());
  std::vector<std::pair<NodeId, std::string>> removals;
  for (const auto& path : phi.paths()) {
    const auto& segs = path.segments();
    const std::span<const std::string> prefix(segs.data(), segs.size() - 1);
    for (NodeId n : resolve(s, roots, prefix)) removals.emplace_back(n, segs.back());
  }
  for (const auto& [n, feature] : removals) s.remove_arc(n, feature);
  Space compact;
  auto out = compact.import(s, roots);
  return FeatureStructure(std::move(compact), std::move(out));
}

FeatureStructure prune_empty(const FeatureStructure& fs) {
  Space s;
  auto roots = s.import(fs.space(), fs.roots());
  std::unordered_map<NodeId, std::size_t> refs;
  std::vector<NodeId> order;  // post-order
  auto count = [&](auto& self, NodeId n) -> void {
    if (refs[n]++ > 0) return;
    for (const auto& arc : s.arcs(n)) self(self, s.deref(arc.target));
    order.push_back(n);
  };
  for (NodeId r : roots) count(count, s.deref(r));
  for (NodeId n : order) {
    std::vector<std::string> drop;
    for (const auto& arc : s.arcs(n)) {
      const NodeId t = s.deref(arc.target);
      if (!s.is_atom(t) && s.arcs(t).empty() && refs[t] == 1) drop.push_back(arc.feature);
    }
    for (const auto& f : drop) s.remove_arc(n, f);
  }
  Space compact;
  auto out = compact.import(s, roots);
  return FeatureStructure(std::move(compact), std::move(out));
}

FeatureStructure clone(const FeatureStructure& fs) {
  Space s;
  auto roots = s.import(fs.space(), fs.roots());
  return FeatureStructure(std::move(s), std::move(roots));
}

bool contains_path(const FeatureStructure& fs, const FeaturePath& p) {
  return !resolve(fs.space(), fs.roots(), p.segments()).empty();
}

}  // namespace featfirst
