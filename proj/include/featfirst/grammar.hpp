#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "featfirst/avm.hpp"
#include "featfirst/feature_structure.hpp"

namespace featfirst {

/// A mother and its daughters in one shared space: root 0 is the mother,
/// roots 1..k the daughters.
class Rule {
 public:
  Rule(std::size_t id, FeatureStructure structure, std::size_t line = 0);

  std::size_t id() const { return id_; }
  std::size_t line() const { return line_; }
  const FeatureStructure& structure() const { return structure_; }

  std::size_t daughter_count() const { return structure_.arity() - 1; }
  bool is_epsilon() const { return daughter_count() == 0; }

  /// Standalone copy of the mother (index 0) or daughter `i` (1-based).
  FeatureStructure category(std::size_t index) const { return structure_.select(index); }
  FeatureStructure mother() const { return category(0); }
  bool daughter_is_preterminal(std::size_t i) const;

  /// Fresh copy of the whole rule; the original is never mutated by callers.
  Rule instantiate() const;

 private:
  std::size_t id_;
  std::size_t line_;
  FeatureStructure structure_;
};

struct Limits {
  std::size_t max_iterations = 100;
  std::size_t max_pairs = 10000;
};

class Grammar {
 public:
  Grammar(std::vector<Rule> rules, Restrictor restrictor,
          std::optional<FeatureStructure> declared_start = std::nullopt,
          LabelMap labels = {});

  const std::vector<Rule>& rules() const { return rules_; }
  const Restrictor& restrictor() const { return restrictor_; }
  void set_restrictor(Restrictor phi) { restrictor_ = std::move(phi); }
  const LabelMap& labels() const { return labels_; }
  Limits& limits() { return limits_; }
  const Limits& limits() const { return limits_; }

  /// Declared start category, else the first rule's mother.
  FeatureStructure start() const;
  bool start_declared() const { return declared_start_.has_value(); }

 private:
  std::vector<Rule> rules_;
  Restrictor restrictor_;
  std::optional<FeatureStructure> declared_start_;
  LabelMap labels_;
  Limits limits_;
};

/// Throws ParseErrors, collecting one error per bad statement.
Grammar parse_grammar(std::string_view text);

/// DSL text for `g`; parses back to an equivalent grammar.
std::string format_grammar(const Grammar& g);

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity;
  std::size_t rule = 0;      // rule id
  std::size_t daughter = 0;  // 1-based, 0 when the mother or the rule is meant
  std::size_t line = 0;
  std::string message;
};

std::vector<Diagnostic> validate(const Grammar& g);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace featfirst
