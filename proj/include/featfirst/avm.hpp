#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "featfirst/feature_structure.hpp"

namespace featfirst {

inline constexpr std::string_view kCatFeature = "cat";
inline constexpr std::string_view kTerFeature = "ter";
inline constexpr std::string_view kEndMarkAtom = "$";

/// Display spellings of category labels, keyed by the lowercased `cat` atom.
class LabelMap {
 public:
  /// Records `spelling` unless a spelling for the same atom is known.
  void note(std::string_view spelling);
  /// Display form for a `cat` atom, or the atom itself.
  std::string display(const std::string& atom) const;

 private:
  std::map<std::string, std::string> spellings_;
};

struct ParseError {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;
};

class ParseErrors : public std::runtime_error {
 public:
  explicit ParseErrors(std::vector<ParseError> errors);
  const std::vector<ParseError>& errors() const { return errors_; }

 private:
  std::vector<ParseError> errors_;
};

/// Whitespace-separated AVMs in one tag scope, e.g. "NP[agr=$1] VP[agr=$1]".
/// One root per AVM. Labels seen are recorded in `labels` when given.
/// Throws ParseErrors.
FeatureStructure parse_categories(std::string_view text, LabelMap* labels = nullptr);

/// Same as parse_categories but requires exactly one AVM.
FeatureStructure parse_category(std::string_view text, LabelMap* labels = nullptr);

/// True iff the root carries `ter=+`.
bool is_preterminal(const Space& space, NodeId root);
bool is_preterminal(const FeatureStructure& fs, std::size_t root = 0);

/// `cat` atom of a root, or empty when absent or not an atom.
std::string label_of(const Space& space, NodeId root);

/// Prints the given roots with `#n` tags for shared nodes, numbered in order
/// of first occurrence in a left-to-right depth-first traversal.
/// The output re-parses with parse_categories to an equivalent structure.
std::vector<std::string> format_roots(const Space& space, std::span<const NodeId> roots,
                                      const LabelMap* labels = nullptr);

std::string format(const FeatureStructure& fs, const LabelMap* labels = nullptr);

}  // namespace featfirst
