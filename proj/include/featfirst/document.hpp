#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "featfirst/first_follow.hpp"
#include "featfirst/grammar.hpp"

namespace featfirst {

struct GrammarDigest {
  std::string file;
  std::size_t rules = 0;
  Restrictor restrictor;
};

/// Everything a `first`, `follow` or `string-first` run reports.
struct OutputDocument {
  GrammarDigest grammar;
  std::string function;  // first | follow | string-first
  Mode mode = Mode::active;
  Limits limits;
  std::optional<std::string> input;  // the category string for string-first
  std::vector<Pair> pairs;
  std::optional<IterationStats> stats;
  std::vector<Diagnostic> diagnostics;
};

/// `(LHS , RHS)` with `#n` tags shared across both sides; an ε rhs prints
/// as `ε`.
std::string format_pair(const Pair& p, const LabelMap* labels = nullptr);

std::string to_text(const OutputDocument& doc, const LabelMap* labels = nullptr);
nlohmann::ordered_json to_json(const OutputDocument& doc, const LabelMap* labels = nullptr);

/// Node-table encoding of a pair: `nodes` lists atoms and arc maps, `lhs` and
/// `rhs` hold node indices. Indices follow a depth-first walk from the roots,
/// so equal pairs encode identically.
nlohmann::ordered_json pair_to_json(const Pair& p, const LabelMap* labels = nullptr);
/// Inverse of pair_to_json. Throws std::invalid_argument on malformed input.
Pair pair_from_json(const nlohmann::ordered_json& j);

std::string severity_name(Severity s);

}  // namespace featfirst
