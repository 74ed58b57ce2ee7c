#pragma once

// Test-only generators of feature structures.

#include <optional>
#include <random>
#include <vector>

#include "featfirst/feature_structure.hpp"

namespace featfirst::testing {

/// Shape of a value: an atom, or a complex node with optional f and g
/// values that may be one shared node.
struct Shape {
  enum Kind { atom_a, atom_b, complex } kind = complex;
  std::vector<Shape> f;  // 0 or 1 element
  std::vector<Shape> g;  // 0 or 1 element
  bool shared = false;   // f and g are the same node (requires f == g)
};

inline NodeId build(Space& s, const Shape& shape) {
  switch (shape.kind) {
    case Shape::atom_a: return s.add_atom("a");
    case Shape::atom_b: return s.add_atom("b");
    case Shape::complex: break;
  }
  const NodeId n = s.add_complex();
  if (!shape.f.empty()) {
    const NodeId f = build(s, shape.f.front());
    s.set_arc(n, "f", f);
    if (shape.shared) {
      s.set_arc(n, "g", f);
      return n;
    }
  }
  if (!shape.g.empty()) s.set_arc(n, "g", build(s, shape.g.front()));
  return n;
}

inline FeatureStructure make(const Shape& shape) {
  Space s;
  const NodeId r = build(s, shape);
  return FeatureStructure(std::move(s), {r});
}

/// Every value of depth <= `depth` over features {f, g} and atoms {a, b},
/// with f/g sharing at any complex node.
inline std::vector<Shape> shapes(int depth) {
  std::vector<Shape> out{{Shape::atom_a, {}, {}, false}, {Shape::atom_b, {}, {}, false}};
  if (depth == 0) {
    out.push_back(Shape{});
    return out;
  }
  const auto inner = shapes(depth - 1);
  std::vector<std::vector<Shape>> options{{}};
  for (const auto& v : inner) options.push_back({v});
  for (const auto& f : options) {
    for (const auto& g : options) out.push_back(Shape{Shape::complex, f, g, false});
  }
  for (const auto& v : inner) out.push_back(Shape{Shape::complex, {v}, {v}, true});
  return out;
}

inline std::vector<FeatureStructure> all_structures(int depth) {
  std::vector<FeatureStructure> out;
  for (const auto& s : shapes(depth)) out.push_back(make(s));
  return out;
}

/// Random structure of depth <= `depth` over features {f, g, h} and atoms
/// {a, b, c}. Completed nodes are reused with probability `share`, which
/// yields reentrancies at arbitrary depths without cycles.
class RandomStructures {
 public:
  explicit RandomStructures(unsigned seed, double share = 0.25) : rng_(seed), share_(share) {}

  FeatureStructure next(int depth) {
    Space s;
    pool_.clear();
    const NodeId r = node(s, depth);
    return FeatureStructure(std::move(s), {r});
  }

 private:
  NodeId node(Space& s, int depth) {
    std::uniform_real_distribution<double> u(0, 1);
    if (u(rng_) < share_) {
      std::vector<NodeId> fits;
      for (const auto& [id, d] : pool_) {
        if (d <= depth) fits.push_back(id);
      }
      if (!fits.empty()) return fits[std::uniform_int_distribution<std::size_t>(0, fits.size() - 1)(rng_)];
    }
    static const char* atoms[] = {"a", "b", "c"};
    NodeId n;
    const double roll = u(rng_);
    if (roll < 0.1) {
      n = s.add_complex();
    } else if (depth == 0 || roll < 0.35) {
      n = s.add_atom(atoms[std::uniform_int_distribution<int>(0, 2)(rng_)]);
    } else {
      n = s.add_complex();
      for (const char* f : {"f", "g", "h"}) {
        if (u(rng_) < 0.55) s.set_arc(n, f, node(s, depth - 1));
      }
    }
    pool_.emplace_back(n, depth);
    return n;
  }

  std::mt19937 rng_;
  double share_;
  std::vector<std::pair<NodeId, int>> pool_;  // completed nodes with their depth
};

}  // namespace featfirst::testing
