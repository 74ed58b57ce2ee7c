#include <cctype>
#include <map>
#include <optional>
#include <utility>

#include "featfirst/avm.hpp"
#include "featfirst/grammar.hpp"

namespace featfirst {

namespace {

enum class Tok { ident, string, tag, symbol, lbrack, rbrack, comma, eq, colon, arrow, dot, dollar, end, bad };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
  bool path_dot = false;  // '.' immediately followed by a letter
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::bad, {}, line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (digit(c)) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      t.kind = Tok::symbol;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if ((c == '$' || c == '#') && i + 1 < src.size() && digit(src[i + 1])) {
      std::size_t j = i + 1;
      while (j < src.size() && digit(src[j])) ++j;
      t.kind = Tok::tag;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') j += (src[j] == '\\' && j + 1 < src.size()) ? 2 : 1;
      if (j < src.size() && src[j] == '"') {
        t.kind = Tok::string;
        t.text = std::string(src.substr(i, j - i + 1));
        advance(j - i + 1);
      } else {
        t.text = "unterminated string";
        advance(j - i);
      }
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Tok::arrow;
      advance(2);
    } else {
      switch (c) {
        case '[': t.kind = Tok::lbrack; break;
        case ']': t.kind = Tok::rbrack; break;
        case ',': t.kind = Tok::comma; break;
        case '=': t.kind = Tok::eq; break;
        case ':': t.kind = Tok::colon; break;
        case '$': t.kind = Tok::dollar; break;
        case '+':
        case '-':
          t.kind = Tok::symbol;
          t.text = std::string(1, c);
          break;
        case '.':
          t.kind = Tok::dot;
          t.path_dot = i + 1 < src.size() && ident_start(src[i + 1]);
          break;
        default:
          t.text = std::string("unexpected character '") + c + "'";
      }
      advance(1);
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::end, {}, line, col});
  return out;
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Abort {};

class Parser {
 public:
  Parser(std::string_view text, LabelMap* labels, bool allow_endmark)
      : toks_(lex(text)), labels_(labels), allow_endmark_(allow_endmark) {}

  FeatureStructure categories() {
    Space space;
    std::vector<NodeId> roots;
    begin_statement(space);
    try {
      while (peek().kind != Tok::end) roots.push_back(category());
      check_roots(roots, toks_.front());
    } catch (const Abort&) {
    }
    if (roots.empty() && errors_.empty()) errors_.push_back({peek().line, peek().column, "expected a category"});
    if (!errors_.empty()) throw ParseErrors(std::move(errors_));
    return FeatureStructure(std::move(space), std::move(roots));
  }

  Grammar grammar() {
    std::vector<Rule> rules;
    Restrictor phi;
    std::optional<FeatureStructure> start;
    while (peek().kind != Tok::end) {
      const Token first = peek();
      try {
        if (is_ident(first, "restrict") && peek(1).kind == Tok::ident) {
          next();
          restrictor(phi);
        } else if (is_ident(first, "start") && peek(1).kind == Tok::ident) {
          next();
          Space space;
          begin_statement(space);
          std::vector<NodeId> root{category()};
          expect(Tok::dot, "expected '.' after start category");
          check_roots(root, first);
          if (start) fail(first, "duplicate start declaration");
          start = FeatureStructure(std::move(space), std::move(root));
        } else {
          rules.push_back(rule(rules.size()));
        }
      } catch (const Abort&) {
        recover();
      }
    }
    if (rules.empty() && errors_.empty()) errors_.push_back({1, 1, "grammar has no rules"});
    if (!errors_.empty()) throw ParseErrors(std::move(errors_));
    return Grammar(std::move(rules), std::move(phi), std::move(start), own_labels_);
  }

  LabelMap& own_labels() { return own_labels_; }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  static bool is_ident(const Token& t, std::string_view text) {
    return t.kind == Tok::ident && t.text == text;
  }

  [[noreturn]] void fail(const Token& at, std::string message) {
    if (at.kind == Tok::bad) message = at.text;
    errors_.push_back({at.line, at.column, std::move(message)});
    throw Abort{};
  }

  const Token& expect(Tok kind, const char* message) {
    if (peek().kind != kind) fail(peek(), message);
    return next();
  }

  void recover() {
    while (peek().kind != Tok::end) {
      const Token& t = next();
      if (t.kind == Tok::dot && !t.path_dot) break;
    }
  }

  void begin_statement(Space& space) {
    space_ = &space;
    tags_.clear();
  }

  void check_roots(const std::vector<NodeId>& roots, const Token& at) {
    for (NodeId r : roots) {
      if (space_->has_cycle(r)) fail(at, "cyclic structure");
      if (space_->is_atom(r)) fail(at, "a category must be a feature structure, not an atom");
    }
  }

  void restrictor(Restrictor& phi) {
    while (true) {
      const Token& head = peek();
      if (head.kind != Tok::ident) fail(head, "malformed restrictor path");
      std::vector<std::string> segs{next().text};
      while (peek().kind == Tok::dot && peek().path_dot) {
        next();
        if (peek().kind != Tok::ident) fail(peek(), "malformed restrictor path");
        segs.push_back(next().text);
      }
      try {
        phi.add(FeaturePath(std::move(segs)));
      } catch (const std::invalid_argument& e) {
        fail(head, std::string("malformed restrictor path: ") + e.what());
      }
      if (peek().kind == Tok::comma) {
        next();
        continue;
      }
      expect(Tok::dot, "expected ',' or '.' in restrict statement");
      return;
    }
  }

  Rule rule(std::size_t id) {
    Space space;
    begin_statement(space);
    const Token first = peek();
    std::vector<NodeId> roots{category()};
    expect(Tok::arrow, "expected '->'");
    while (peek().kind != Tok::dot) {
      if (peek().kind == Tok::end) fail(peek(), "expected '.' at end of rule");
      roots.push_back(category());
    }
    next();
    check_roots(roots, first);
    return Rule(id, FeatureStructure(std::move(space), std::move(roots)), first.line);
  }

  NodeId category() {
    const Token start = peek();
    bool term = false;
    if (is_ident(start, "term")) {
      const Tok k = peek(1).kind;
      if (k == Tok::ident || k == Tok::lbrack || k == Tok::tag || k == Tok::dollar) {
        next();
        term = true;
      }
    }
    NodeId n;
    if (peek().kind == Tok::tag) {
      n = tag();
    } else {
      n = avm(true);
    }
    if (term) {
      if (space_->is_atom(n)) fail(start, "'term' applies to a feature structure");
      const NodeId plus = space_->add_atom("+");
      if (auto existing = space_->get(n, kTerFeature)) {
        if (space_->unify(*existing, plus) != UnifyOutcome::ok) fail(start, "'term' conflicts with ter value");
      } else {
        space_->set_arc(n, kTerFeature, plus);
      }
    }
    return n;
  }

  // Label? ('[' fields ']')?  with at least one part present.
  NodeId avm(bool category_position) {
    const Token& t = peek();
    std::optional<std::string> label;
    if (t.kind == Tok::ident) {
      label = next().text;
    } else if (t.kind == Tok::dollar) {
      if (!allow_endmark_) fail(t, "'$' is reserved for the end marker");
      next();
      label = std::string(kEndMarkAtom);
    } else if (t.kind != Tok::lbrack) {
      fail(t, category_position ? "expected a category" : "expected a value");
    }
    const NodeId n = space_->add_complex();
    if (label) {
      const std::string atom = lowercase(*label);
      if (labels_) labels_->note(*label);
      own_labels_.note(*label);
      space_->set_arc(n, kCatFeature, space_->add_atom(atom));
    }
    if (peek().kind == Tok::lbrack) {
      next();
      if (peek().kind != Tok::rbrack) {
        while (true) {
          const Token& feat = peek();
          if (feat.kind != Tok::ident) fail(feat, "expected a feature name");
          next();
          expect(Tok::eq, "expected '=' after feature name");
          const NodeId v = value();
          if (!space_->set_arc(n, feat.text, v)) fail(feat, "duplicate feature '" + feat.text + "'");
          if (peek().kind == Tok::comma) {
            next();
            continue;
          }
          break;
        }
      }
      expect(Tok::rbrack, "expected ',' or ']'");
    }
    return n;
  }

  NodeId tag() {
    const Token& t = next();
    auto [it, fresh] = tags_.try_emplace(t.text, 0);
    if (fresh) it->second = space_->add_complex();
    const NodeId node = it->second;
    if (peek().kind == Tok::colon) {
      next();
      const NodeId v = value();
      switch (space_->unify(node, v)) {
        case UnifyOutcome::ok: break;
        case UnifyOutcome::clash: fail(t, "tag $" + t.text + " used with incompatible values");
        case UnifyOutcome::cycle: fail(t, "cyclic structure through tag $" + t.text);
      }
    }
    return node;
  }

  NodeId value() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::tag: return tag();
      case Tok::string:
      case Tok::symbol: return space_->add_atom(next().text);
      case Tok::lbrack: return avm(false);
      case Tok::dollar: return avm(false);
      case Tok::ident:
        if (peek(1).kind == Tok::lbrack) return avm(false);
        return space_->add_atom(next().text);
      default: fail(t, "expected a value");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseError> errors_;
  LabelMap* labels_;
  LabelMap own_labels_;
  bool allow_endmark_;
  Space* space_ = nullptr;
  std::map<std::string, NodeId> tags_;
};

std::string describe(const std::vector<ParseError>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += '\n';
    out += std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message;
  }
  return out;
}

}  // namespace

ParseErrors::ParseErrors(std::vector<ParseError> errors)
    : std::runtime_error(describe(errors)), errors_(std::move(errors)) {}

FeatureStructure parse_categories(std::string_view text, LabelMap* labels) {
  Parser p(text, labels, true);
  return p.categories();
}

FeatureStructure parse_category(std::string_view text, LabelMap* labels) {
  auto fs = parse_categories(text, labels);
  if (fs.arity() != 1) {
    throw ParseErrors({{1, 1, "expected exactly one category, got " + std::to_string(fs.arity())}});
  }
  return fs;
}

Grammar parse_grammar(std::string_view text) {
  Parser p(text, nullptr, false);
  return p.grammar();
}

}  // namespace featfirst
