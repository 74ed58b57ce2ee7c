#include "featfirst/avm.hpp"

#include <cctype>
#include <unordered_map>

namespace featfirst {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Atoms that print back as a category label and re-parse to the same atom.
bool printable_label(const std::string& atom) {
  if (atom == kEndMarkAtom) return true;
  if (atom.empty() || atom == "term" || !std::isalpha(static_cast<unsigned char>(atom[0]))) return false;
  for (char c : atom) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isupper(u) || !(std::isalnum(u) || c == '_')) return false;
  }
  return true;
}

class Printer {
 public:
  Printer(const Space& space, const LabelMap* labels) : s_(space), labels_(labels) {}

  void count(NodeId n) {
    n = s_.deref(n);
    if (refs_[n]++ > 0) return;
    for (const auto& arc : s_.arcs(n)) count(arc.target);
  }

  std::string node(NodeId n) {
    n = s_.deref(n);
    if (refs_[n] < 2) return body(n);
    if (auto it = tags_.find(n); it != tags_.end()) return "#" + std::to_string(it->second);
    const int tag = next_tag_++;
    tags_.emplace(n, tag);
    const std::string b = body(n);
    if (b == "[]") return "#" + std::to_string(tag);
    return "#" + std::to_string(tag) + ":" + b;
  }

 private:
  std::string body(NodeId n) {
    if (s_.is_atom(n)) return s_.atom_name(n);
    std::string out;
    bool labelled = false;
    if (auto cat = s_.get(n, kCatFeature); cat && s_.is_atom(*cat) && refs_[*cat] == 1 &&
                                             printable_label(s_.atom_name(*cat))) {
      const auto& atom = s_.atom_name(*cat);
      out = labels_ ? labels_->display(atom) : atom;
      labelled = true;
    }
    out += '[';
    bool first = true;
    for (const auto& arc : s_.arcs(n)) {
      if (labelled && arc.feature == kCatFeature) continue;
      if (!first) out += ", ";
      first = false;
      out += arc.feature;
      out += '=';
      out += node(arc.target);
    }
    out += ']';
    return out;
  }

  const Space& s_;
  const LabelMap* labels_;
  std::unordered_map<NodeId, int> refs_;
  std::unordered_map<NodeId, int> tags_;
  int next_tag_ = 1;
};

}  // namespace

void LabelMap::note(std::string_view spelling) {
  spellings_.try_emplace(lowercase(spelling), spelling);
}

std::string LabelMap::display(const std::string& atom) const {
  auto it = spellings_.find(atom);
  return it == spellings_.end() ? atom : it->second;
}

bool is_preterminal(const Space& space, NodeId root) {
  auto ter = space.get(root, kTerFeature);
  return ter && space.is_atom(*ter) && space.atom_name(*ter) == "+";
}

bool is_preterminal(const FeatureStructure& fs, std::size_t root) {
  return is_preterminal(fs.space(), fs.roots()[root]);
}

std::string label_of(const Space& space, NodeId root) {
  if (space.is_atom(root)) return {};
  auto cat = space.get(root, kCatFeature);
  if (!cat || !space.is_atom(*cat)) return {};
  return space.atom_name(*cat);
}

std::vector<std::string> format_roots(const Space& space, std::span<const NodeId> roots,
                                      const LabelMap* labels) {
  Printer p(space, labels);
  for (NodeId r : roots) p.count(r);
  std::vector<std::string> out;
  out.reserve(roots.size());
  for (NodeId r : roots) out.push_back(p.node(r));
  return out;
}

std::string format(const FeatureStructure& fs, const LabelMap* labels) {
  std::string out;
  for (const auto& s : format_roots(fs.space(), fs.roots(), labels)) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace featfirst
