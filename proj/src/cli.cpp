#include "featfirst/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "featfirst/document.hpp"
#include "featfirst/first_follow.hpp"
#include "featfirst/grammar.hpp"

namespace featfirst::cli {

namespace {

struct Options {
  std::string file;
  std::string mode = "active";
  std::optional<std::string> restrictor;
  std::size_t max_iterations = Limits{}.max_iterations;
  std::size_t max_pairs = Limits{}.max_pairs;
  std::string format = "text";
  bool stats = false;
};

// Failure already reported on the error stream.
struct Exit {
  int code;
};

void add_compute_options(CLI::App* sub, Options& o) {
  sub->add_option("--mode", o.mode, "naive or active")
      ->check(CLI::IsMember({"naive", "active"}))
      ->capture_default_str();
  sub->add_option("--restrictor", o.restrictor, "comma-separated feature paths; overrides the file");
  sub->add_option("--max-iterations", o.max_iterations, "iteration guard")->capture_default_str();
  sub->add_option("--max-pairs", o.max_pairs, "solution size guard")->capture_default_str();
  sub->add_option("--format", o.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  sub->add_flag("--stats", o.stats, "include per-iteration statistics");
}

std::string basename(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

Restrictor parse_restrictor_list(const std::string& text, std::ostream& err) {
  Restrictor phi;
  std::string token;
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream words(spaced);
  while (words >> token) {
    try {
      phi.add(FeaturePath::parse(token));
    } catch (const std::invalid_argument& e) {
      err << "error: bad restrictor path '" << token << "': " << e.what() << "\n";
      throw Exit{kUsage};
    }
  }
  return phi;
}

Grammar load(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << path << ": error: cannot open file\n";
    throw Exit{kIo};
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_grammar(buf.str());
  } catch (const ParseErrors& e) {
    for (const auto& pe : e.errors()) {
      err << path << ":" << pe.line << ":" << pe.column << ": error: " << pe.message << "\n";
    }
    throw Exit{kParse};
  }
}

void report(const std::string& path, const std::vector<Diagnostic>& diags, std::ostream& err) {
  for (const auto& d : diags) {
    err << path << ":" << d.line << ":1: " << severity_name(d.severity) << ": " << d.message << "\n";
  }
}

// Parses, applies overrides and validates.
Grammar prepare(const Options& o, std::vector<Diagnostic>& diags, std::ostream& err) {
  Grammar g = load(o.file, err);
  if (o.restrictor) g.set_restrictor(parse_restrictor_list(*o.restrictor, err));
  g.limits() = Limits{o.max_iterations, o.max_pairs};
  diags = validate(g);
  report(o.file, diags, err);
  if (has_errors(diags)) throw Exit{kInvalidGrammar};
  return g;
}

Mode mode_of(const Options& o) { return o.mode == "naive" ? Mode::naive : Mode::active; }

OutputDocument document(const Options& o, const Grammar& g, std::string function,
                        std::vector<Diagnostic> diags) {
  OutputDocument doc;
  doc.grammar = {basename(o.file), g.rules().size(), g.restrictor()};
  doc.function = std::move(function);
  doc.mode = mode_of(o);
  doc.limits = g.limits();
  doc.diagnostics = std::move(diags);
  return doc;
}

void emit(const Options& o, const OutputDocument& doc, const Grammar& g, std::ostream& out) {
  if (o.format == "json") {
    out << to_json(doc, &g.labels()).dump(2) << "\n";
  } else {
    out << to_text(doc, &g.labels());
  }
}

void copy_pairs(const PairSet& set, OutputDocument& doc) {
  for (const Pair* p : set.elements()) doc.pairs.push_back(*p);
}

Result run_first(const Grammar& g, Mode mode, std::ostream& err) {
  try {
    return compute_first(g, mode);
  } catch (const LimitExceeded& e) {
    err << "error: " << e.what() << " (after " << e.stats().iterations.size() << " iterations)\n";
    throw Exit{kLimitExceeded};
  }
}

int cmd_first(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Diagnostic> diags;
  const Grammar g = prepare(o, diags, err);
  const auto first = run_first(g, mode_of(o), err);
  auto doc = document(o, g, "first", std::move(diags));
  copy_pairs(first.pairs, doc);
  if (o.stats) doc.stats = first.stats;
  emit(o, doc, g, out);
  return kOk;
}

int cmd_follow(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Diagnostic> diags;
  const Grammar g = prepare(o, diags, err);
  const auto first = run_first(g, mode_of(o), err);
  Result follow;
  try {
    follow = compute_follow(g, first.pairs, mode_of(o));
  } catch (const LimitExceeded& e) {
    err << "error: " << e.what() << "\n";
    throw Exit{kLimitExceeded};
  }
  auto doc = document(o, g, "follow", std::move(diags));
  copy_pairs(follow.pairs, doc);
  if (o.stats) doc.stats = follow.stats;
  emit(o, doc, g, out);
  return kOk;
}

FeatureStructure parse_input(const std::string& text, std::ostream& err) {
  try {
    return parse_categories(text);
  } catch (const ParseErrors& e) {
    for (const auto& pe : e.errors()) {
      err << "<input>:" << pe.line << ":" << pe.column << ": error: " << pe.message << "\n";
    }
    throw Exit{kParse};
  }
}

int cmd_string_first(const Options& o, const std::string& input, std::ostream& out, std::ostream& err) {
  std::vector<Diagnostic> diags;
  const Grammar g = prepare(o, diags, err);
  const auto cats = parse_input(input, err);
  const auto first = run_first(g, mode_of(o), err);
  PairSet result;
  try {
    result = first_of_string(first.pairs, g, cats);
  } catch (const UnknownCategory& e) {
    err << "<input>: error: " << e.what() << "\n";
    throw Exit{kUnknownCategory};
  }
  auto doc = document(o, g, "string-first", std::move(diags));
  doc.input = input;
  copy_pairs(result, doc);
  if (o.stats) doc.stats = first.stats;
  emit(o, doc, g, out);
  return kOk;
}

int cmd_query(const Options& o, const std::string& input, const std::string& function,
              std::ostream& out, std::ostream& err) {
  std::vector<Diagnostic> diags;
  const Grammar g = prepare(o, diags, err);
  const auto cats = parse_input(input, err);
  auto first = run_first(g, mode_of(o), err);
  PairSet source = std::move(first.pairs);
  if (function == "follow") {
    try {
      source = compute_follow(g, source, mode_of(o)).pairs;
    } catch (const LimitExceeded& e) {
      err << "error: " << e.what() << "\n";
      throw Exit{kLimitExceeded};
    }
  }
  const auto answers = query(source, cats);
  if (o.format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& a : answers) {
      arr.push_back({{"epsilon", a.epsilon}, {"text", a.epsilon ? "ε" : format(a.category, &g.labels())}});
    }
    out << nlohmann::ordered_json{{"function", function}, {"input", input}, {"answers", arr}}.dump(2) << "\n";
  } else {
    for (const auto& a : answers) out << (a.epsilon ? std::string("ε") : format(a.category, &g.labels())) << "\n";
  }
  return kOk;
}

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err) {
  const Grammar g = load(file, err);
  const auto diags = validate(g);
  report(file, diags, err);
  const auto errors = std::count_if(diags.begin(), diags.end(),
                                    [](const Diagnostic& d) { return d.severity == Severity::error; });
  out << file << ": " << g.rules().size() << " rules, " << errors << " errors, "
      << (static_cast<long>(diags.size()) - errors) << " warnings\n";
  return errors > 0 ? kInvalidGrammar : kOk;
}

std::string fixed(double v, int places = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

void print_table(const char* what, const IterationStats& naive, const IterationStats& active,
                 double naive_ms, double active_ms, bool equivalent, std::ostream& out) {
  out << "  " << what << "\n";
  out << "  " << pad("iter", 4) << pad("naive considered", 18) << pad("total", 8) << pad("attempts", 10)
      << pad("active considered", 19) << pad("total", 8) << pad("attempts", 10) << "\n";
  const std::size_t rows = std::max(naive.iterations.size(), active.iterations.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << "  " << pad(std::to_string(i + 1), 4);
    if (i < naive.iterations.size()) {
      const auto& it = naive.iterations[i];
      out << pad(fixed(it.considered), 18) << pad(fixed(it.total), 8) << pad(std::to_string(it.attempts), 10);
    } else {
      out << pad("", 36);
    }
    if (i < active.iterations.size()) {
      const auto& it = active.iterations[i];
      out << pad(fixed(it.considered), 19) << pad(fixed(it.total), 8) << pad(std::to_string(it.attempts), 10);
    }
    out << "\n";
  }
  const auto na = naive.attempts();
  const auto aa = active.attempts();
  out << "  unification attempts: naive " << na << ", active " << aa << ", ratio "
      << (aa ? fixed(static_cast<double>(na) / static_cast<double>(aa)) : std::string("n/a")) << "\n";
  out << "  test events: naive " << naive.test_events << ", active " << active.test_events << "\n";
  out << "  wall time: naive " << fixed(naive_ms, 3) << " ms, active " << fixed(active_ms, 3) << " ms\n";
  out << "  equivalence: " << (equivalent ? "PASS" : "FAIL") << "\n";
}

nlohmann::ordered_json stats_json(const IterationStats& s, double ms) {
  nlohmann::ordered_json iters = nlohmann::ordered_json::array();
  for (const auto& it : s.iterations) {
    iters.push_back({{"considered", it.considered}, {"total", it.total}, {"attempts", it.attempts}});
  }
  return {{"iterations", iters}, {"attempts", s.attempts()}, {"test_events", s.test_events}, {"ms", ms}};
}

int cmd_bench(const std::vector<std::string>& files, const Options& o, std::ostream& out, std::ostream& err) {
  bool all_equal = true;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& file : files) {
    Options each = o;
    each.file = file;
    std::vector<Diagnostic> diags;
    const Grammar g = prepare(each, diags, err);
    ModeReport r;
    try {
      r = compare_modes(g);
    } catch (const LimitExceeded& e) {
      err << file << ": error: " << e.what() << "\n";
      throw Exit{kLimitExceeded};
    }
    all_equal = all_equal && r.first_equivalent && r.follow_equivalent;
    if (o.format == "json") {
      reports.push_back({{"file", basename(file)},
                         {"rules", g.rules().size()},
                         {"first", {{"naive", stats_json(r.naive.first, r.naive.first_ms)},
                                    {"active", stats_json(r.active.first, r.active.first_ms)},
                                    {"equivalent", r.first_equivalent}}},
                         {"follow", {{"naive", stats_json(r.naive.follow, r.naive.follow_ms)},
                                     {"active", stats_json(r.active.follow, r.active.follow_ms)},
                                     {"equivalent", r.follow_equivalent}}}});
      continue;
    }
    out << basename(file) << ": " << g.rules().size() << " rules, restrict "
        << (g.restrictor().empty() ? std::string("nothing") : g.restrictor().str()) << "\n";
    print_table("FIRST", r.naive.first, r.active.first, r.naive.first_ms, r.active.first_ms,
                r.first_equivalent, out);
    print_table("FOLLOW", r.naive.follow, r.active.follow, r.naive.follow_ms, r.active.follow_ms,
                r.follow_equivalent, out);
  }
  if (o.format == "json") out << reports.dump(2) << "\n";
  return all_equal ? kOk : kModeMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FIRST and FOLLOW pair sets for feature-theoretic grammars", "featfirst"};
  app.require_subcommand(1);

  Options first_o, follow_o, string_o, query_o, bench_o;
  std::string validate_file, string_input, query_input, query_function = "first";
  std::vector<std::string> bench_files;

  auto* first = app.add_subcommand("first", "compute FIRST");
  first->add_option("grammar", first_o.file, "grammar file")->required();
  add_compute_options(first, first_o);

  auto* follow = app.add_subcommand("follow", "compute FOLLOW");
  follow->add_option("grammar", follow_o.file, "grammar file")->required();
  add_compute_options(follow, follow_o);

  auto* string_first = app.add_subcommand("string-first", "FIRST of a category string");
  string_first->add_option("grammar", string_o.file, "grammar file")->required();
  string_first->add_option("categories", string_input, "whitespace-separated AVMs")->required();
  add_compute_options(string_first, string_o);

  auto* query_cmd = app.add_subcommand("query", "FIRST or FOLLOW values of one category");
  query_cmd->add_option("grammar", query_o.file, "grammar file")->required();
  query_cmd->add_option("category", query_input, "an AVM")->required();
  query_cmd->add_option("--function", query_function, "first or follow")
      ->check(CLI::IsMember({"first", "follow"}))
      ->capture_default_str();
  add_compute_options(query_cmd, query_o);

  auto* validate_cmd = app.add_subcommand("validate", "check a grammar");
  validate_cmd->add_option("grammar", validate_file, "grammar file")->required();

  auto* bench = app.add_subcommand("bench", "compare naive and active modes");
  bench->add_option("grammars", bench_files, "grammar files")->required();
  add_compute_options(bench, bench_o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*first) return cmd_first(first_o, out, err);
    if (*follow) return cmd_follow(follow_o, out, err);
    if (*string_first) return cmd_string_first(string_o, string_input, out, err);
    if (*query_cmd) return cmd_query(query_o, query_input, query_function, out, err);
    if (*validate_cmd) return cmd_validate(validate_file, out, err);
    if (*bench) return cmd_bench(bench_files, bench_o, out, err);
  } catch (const Exit& e) {
    return e.code;
  }
  return kUsage;
}

}  // namespace featfirst::cli
