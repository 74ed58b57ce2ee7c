#include "featfirst/document.hpp"

#include <cstdio>
#include <unordered_map>

namespace featfirst {

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::vector<NodeId> printed_roots(const Pair& p) {
  std::vector<NodeId> roots(p.structure.roots().begin(), p.structure.roots().end());
  if (p.epsilon) roots.pop_back();
  return roots;
}

}  // namespace

std::string severity_name(Severity s) { return s == Severity::error ? "error" : "warning"; }

std::string format_pair(const Pair& p, const LabelMap* labels) {
  const auto roots = printed_roots(p);
  const auto parts = format_roots(p.structure.space(), roots, labels);
  std::string out = "(";
  for (std::size_t i = 0; i < p.lhs_arity; ++i) {
    if (i) out += ' ';
    out += parts[i];
  }
  out += " , ";
  out += p.epsilon ? std::string("ε") : parts.back();
  out += ')';
  return out;
}

std::string to_text(const OutputDocument& doc, const LabelMap* labels) {
  std::string out = "% " + doc.function + " of " + doc.grammar.file + " (" +
                    std::to_string(doc.grammar.rules) + " rules, restrict " +
                    (doc.grammar.restrictor.empty() ? std::string("nothing") : doc.grammar.restrictor.str()) +
                    "), mode " + to_string(doc.mode) + "\n";
  if (doc.input) out += "% input: " + *doc.input + "\n";
  for (const auto& p : doc.pairs) out += format_pair(p, labels) + "\n";
  if (doc.stats) {
    out += "% iteration considered total size attempts\n";
    std::size_t n = 1;
    for (const auto& it : doc.stats->iterations) {
      out += "% " + std::to_string(n++) + " " + fixed2(it.considered) + " " + fixed2(it.total) + " " +
             std::to_string(it.size_at_end) + " " + std::to_string(it.attempts) + "\n";
    }
    out += "% attempts " + std::to_string(doc.stats->attempts()) + ", test events " +
           std::to_string(doc.stats->test_events) + "\n";
  }
  return out;
}

nlohmann::ordered_json pair_to_json(const Pair& p, const LabelMap* labels) {
  const Space& s = p.structure.space();
  std::unordered_map<NodeId, std::size_t> index;
  std::vector<NodeId> order;
  auto walk = [&](auto& self, NodeId n) -> std::size_t {
    n = s.deref(n);
    if (auto it = index.find(n); it != index.end()) return it->second;
    const std::size_t i = order.size();
    index.emplace(n, i);
    order.push_back(n);
    for (const auto& arc : s.arcs(n)) self(self, arc.target);
    return i;
  };
  nlohmann::ordered_json lhs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.lhs_arity; ++i) lhs.push_back(walk(walk, p.lhs_root(i)));
  const std::size_t rhs = walk(walk, p.rhs_root());

  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (NodeId n : order) {
    if (s.is_atom(n)) {
      nodes.push_back({{"atom", s.atom_name(n)}});
    } else {
      nlohmann::ordered_json arcs = nlohmann::ordered_json::object();
      for (const auto& arc : s.arcs(n)) arcs[arc.feature] = index.at(s.deref(arc.target));
      nodes.push_back({{"arcs", arcs}});
    }
  }
  nlohmann::ordered_json j;
  j["text"] = format_pair(p, labels);
  j["epsilon"] = p.epsilon;
  j["origin_rule"] = p.origin_rule == kNoRule ? nlohmann::ordered_json(nullptr)
                                              : nlohmann::ordered_json(p.origin_rule + 1);
  j["generation"] = p.generation;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["nodes"] = nodes;
  return j;
}

Pair pair_from_json(const nlohmann::ordered_json& j) {
  try {
    const auto& nodes = j.at("nodes");
    Space s;
    std::vector<NodeId> ids;
    ids.reserve(nodes.size());
    for (const auto& n : nodes) {
      ids.push_back(n.contains("atom") ? s.add_atom(n.at("atom").get<std::string>()) : s.add_complex());
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].contains("arcs")) continue;
      for (const auto& [feature, target] : nodes[i].at("arcs").items()) {
        if (!s.set_arc(ids[i], feature, ids.at(target.get<std::size_t>()))) {
          throw std::invalid_argument("bad arc '" + feature + "'");
        }
      }
    }
    std::vector<NodeId> roots;
    for (const auto& l : j.at("lhs")) roots.push_back(ids.at(l.get<std::size_t>()));
    roots.push_back(ids.at(j.at("rhs").get<std::size_t>()));
    for (NodeId r : roots) {
      if (s.has_cycle(r)) throw std::invalid_argument("cyclic pair");
    }
    Pair p;
    p.lhs_arity = roots.size() - 1;
    p.structure = FeatureStructure(std::move(s), std::move(roots));
    p.epsilon = j.at("epsilon").get<bool>();
    p.restricted = true;
    if (!j.at("origin_rule").is_null()) p.origin_rule = j.at("origin_rule").get<std::size_t>() - 1;
    p.generation = j.at("generation").get<std::size_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed pair: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("malformed pair: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const OutputDocument& doc, const LabelMap* labels) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json phi = nlohmann::ordered_json::array();
  for (const auto& p : doc.grammar.restrictor.paths()) phi.push_back(p.str());
  j["grammar"] = {{"file", doc.grammar.file}, {"rules", doc.grammar.rules}, {"restrictor", phi}};
  j["function"] = doc.function;
  j["mode"] = to_string(doc.mode);
  j["limits"] = {{"max_iterations", doc.limits.max_iterations}, {"max_pairs", doc.limits.max_pairs}};
  if (doc.input) j["input"] = *doc.input;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : doc.pairs) pairs.push_back(pair_to_json(p, labels));
  j["pairs"] = pairs;
  if (doc.stats) {
    nlohmann::ordered_json iters = nlohmann::ordered_json::array();
    std::size_t n = 1;
    for (const auto& it : doc.stats->iterations) {
      iters.push_back({{"iteration", n++},
                       {"considered", it.considered},
                       {"total", it.total},
                       {"size_at_end", it.size_at_end},
                       {"attempts", it.attempts},
                       {"visits", it.visits},
                       {"changed", it.changed}});
    }
    j["stats"] = {{"iterations", iters},
                  {"attempts", doc.stats->attempts()},
                  {"test_events", doc.stats->test_events}};
  }
  nlohmann::ordered_json diags = nlohmann::ordered_json::array();
  for (const auto& d : doc.diagnostics) {
    diags.push_back({{"severity", severity_name(d.severity)},
                     {"rule", d.rule + 1},
                     {"daughter", d.daughter},
                     {"line", d.line},
                     {"message", d.message}});
  }
  j["diagnostics"] = diags;
  return j;
}

}  // namespace featfirst
