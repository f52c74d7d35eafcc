#include "lmt/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "lmt/errors.hpp"

namespace lmt {

namespace {

// ----- s-expressions -----

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 0;
  std::size_t column = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line, column); }
  std::string where() const { return std::to_string(line) + ":" + std::to_string(column) + ": "; }
  bool is_atom(std::string_view s) const { return !is_list && atom == s; }
  std::string_view head() const {
    return is_list && !items.empty() && !items[0].is_list ? std::string_view(items[0].atom)
                                                           : std::string_view();
  }
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) return out;
      out.push_back(read());
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read() {
    skip_space();
    SExpr e;
    e.line = line_;
    e.column = column_;
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, column_);
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", line_, column_);
    if (c == '(') {
      advance();
      e.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unclosed '('", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      e.atom.push_back(d);
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

bool looks_numeric(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  return i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.');
}

Rational number(const SExpr& e) {
  if (e.is_list || !looks_numeric(e.atom)) e.fail("expected a number");
  try {
    return parse_rational(e.atom);
  } catch (const std::invalid_argument& ex) {
    e.fail(ex.what());
  }
}

const SExpr& symbol(const SExpr& e, std::string_view what) {
  if (e.is_list || e.atom.empty()) e.fail("expected " + std::string(what));
  return e;
}

// ----- problem syntax -----

class ProblemParser {
 public:
  Problem parse(std::string_view text) {
    for (const SExpr& cmd : Reader(text).read_all()) command(cmd);
    return std::move(problem_);
  }

  LinExpr term(const SExpr& e) const {
    if (!e.is_list) {
      if (looks_numeric(e.atom)) return LinExpr(number(e));
      const VariableDecl* v = declared(e);
      if (v->sort != Sort::kRational) throw SortError(e.where() + "'" + e.atom + "' is Bool, expected Real");
      return LinExpr::variable(e.atom);
    }
    std::string_view head = e.head();
    const auto args = std::span(e.items).subspan(e.items.empty() ? 0 : 1);
    if (head == "+") {
      LinExpr sum;
      for (const SExpr& a : args) sum += term(a);
      return sum;
    }
    if (head == "-") {
      if (args.empty()) e.fail("'-' needs arguments");
      if (args.size() == 1) return -term(args[0]);
      LinExpr diff = term(args[0]);
      for (const SExpr& a : args.subspan(1)) diff -= term(a);
      return diff;
    }
    if (head == "*") {
      LinExpr product(1);
      for (const SExpr& a : args) {
        LinExpr f = term(a);
        if (f.is_constant()) {
          product *= f.constant();
        } else if (product.is_constant()) {
          f *= product.constant();
          product = std::move(f);
        } else {
          e.fail("nonlinear product");
        }
      }
      return product;
    }
    if (head == "/") {
      if (args.size() != 2) e.fail("'/' takes two arguments");
      LinExpr divisor = term(args[1]);
      if (!divisor.is_constant() || divisor.constant() == 0) args[1].fail("division by a non-constant or zero");
      return term(args[0]) * Rational(1 / divisor.constant());
    }
    e.fail("unknown term operator '" + std::string(head) + "'");
  }

  bool is_formula(const SExpr& e) const {
    if (!e.is_list) {
      if (e.atom == "true" || e.atom == "false") return true;
      auto it = decls_.find(e.atom);
      return it != decls_.end() && problem_.variables[it->second].sort == Sort::kBool;
    }
    std::string_view head = e.head();
    static const std::set<std::string_view> kConnectives = {"not", "and", "or", "=>", "iff",
                                                            "<",   "<=",  ">",  ">="};
    if (kConnectives.contains(head)) return true;
    if ((head == "=" || head == "distinct") && e.items.size() >= 2) {
      return true;  // relation or Boolean equality; both are formulas
    }
    return false;
  }

  Formula formula(const SExpr& e) const {
    if (!e.is_list) {
      if (e.atom == "true") return Formula::constant(true);
      if (e.atom == "false") return Formula::constant(false);
      const VariableDecl* v = declared(e);
      if (v->sort != Sort::kBool) throw SortError(e.where() + "'" + e.atom + "' is Real, expected Bool");
      return Formula::bool_var(e.atom);
    }
    std::string_view head = e.head();
    if (head.empty()) e.fail("expected a formula");
    const auto args = std::span(e.items).subspan(1);
    auto subformulas = [&] {
      std::vector<Formula> out;
      for (const SExpr& a : args) out.push_back(formula(a));
      return out;
    };
    if (head == "not") {
      if (args.size() != 1) e.fail("'not' takes one argument");
      return Formula::negation(formula(args[0]));
    }
    if (head == "and" || head == "or") {
      if (args.empty()) e.fail("'" + std::string(head) + "' needs arguments");
      return head == "and" ? Formula::conjunction(subformulas()) : Formula::disjunction(subformulas());
    }
    if (head == "=>") {
      if (args.size() < 2) e.fail("'=>' takes at least two arguments");
      std::vector<Formula> parts = subformulas();
      Formula acc = parts.back();
      for (std::size_t i = parts.size() - 1; i-- > 0;) acc = Formula::implies(parts[i], acc);
      return acc;
    }
    if (head == "iff") {
      if (args.size() != 2) e.fail("'iff' takes two arguments");
      return Formula::iff(formula(args[0]), formula(args[1]));
    }
    static const std::map<std::string_view, Relop> kRelops = {
        {"<", Relop::kLt}, {"<=", Relop::kLe}, {"=", Relop::kEq},
        {">=", Relop::kGe}, {">", Relop::kGt}, {"distinct", Relop::kNe}};
    if (auto it = kRelops.find(head); it != kRelops.end()) {
      if (args.size() != 2) e.fail("'" + std::string(head) + "' takes two arguments");
      if ((it->second == Relop::kEq || it->second == Relop::kNe) && is_boolean_operand(args[0])) {
        Formula same = Formula::iff(formula(args[0]), formula(args[1]));
        return it->second == Relop::kEq ? same : Formula::negation(same);
      }
      return Formula::compare(term(args[0]), it->second, term(args[1]));
    }
    e.fail("unknown connective '" + std::string(head) + "'");
  }

  Value value_for(const VariableDecl& decl, const SExpr& e) const {
    if (decl.sort == Sort::kBool) {
      if (e.is_atom("true")) return true;
      if (e.is_atom("false")) return false;
      throw SortError(e.where() + "expected true/false for Bool '" + decl.name + "'");
    }
    if (e.is_atom("true") || e.is_atom("false")) {
      throw SortError(e.where() + "expected a number for Real '" + decl.name + "'");
    }
    Rational r = number(e);
    if (r < decl.lo || r > decl.hi) e.fail("value for '" + decl.name + "' outside its box");
    return r;
  }

  // (= NAME VALUE) ...
  Assignment bindings(std::span<const SExpr> items) const {
    Assignment out;
    for (const SExpr& b : items) {
      if (b.head() != "=" || b.items.size() != 3) b.fail("expected (= NAME VALUE)");
      if (untyped_) {
        const std::string& name = symbol(b.items[1], "a variable name").atom;
        if (out.contains(name)) throw DuplicateId("'" + name + "' bound twice", b.line, b.column);
        const SExpr& v = b.items[2];
        out.set(name, v.is_atom("true") ? Value(true) : v.is_atom("false") ? Value(false) : Value(number(v)));
        continue;
      }
      const VariableDecl* decl = declared(symbol(b.items[1], "a variable name"));
      if (out.contains(decl->name)) throw DuplicateId(b.where() + "'" + decl->name + "' bound twice", b.line, b.column);
      out.set(decl->name, value_for(*decl, b.items[2]));
    }
    return out;
  }

  // Accept any name and take the sort from the literal.
  void set_untyped() { untyped_ = true; }

  void adopt(Problem problem) {
    problem_ = std::move(problem);
    for (std::size_t i = 0; i < problem_.variables.size(); ++i) decls_[problem_.variables[i].name] = i;
  }

 private:
  bool is_boolean_operand(const SExpr& e) const {
    if (!e.is_list) return is_formula(e);
    std::string_view head = e.head();
    return head != "+" && head != "-" && head != "*" && head != "/" && is_formula(e);
  }

  const VariableDecl* declared(const SExpr& e) const {
    auto it = decls_.find(e.atom);
    if (it == decls_.end()) throw SortError(e.where() + "undeclared variable '" + e.atom + "'");
    return &problem_.variables[it->second];
  }

  void declare(const SExpr& cmd, VariableDecl decl) {
    if (!is_valid_identifier(decl.name)) cmd.items[1].fail("invalid name '" + decl.name + "'");
    if (decls_.contains(decl.name)) {
      throw DuplicateId("'" + decl.name + "' declared twice", cmd.line, cmd.column);
    }
    decls_[decl.name] = problem_.variables.size();
    problem_.variables.push_back(std::move(decl));
  }

  void command(const SExpr& cmd) {
    std::string_view head = cmd.head();
    if (head.empty()) cmd.fail("expected a command");
    const auto args = std::span(cmd.items).subspan(1);
    if (head == "declare-bool") {
      if (args.size() != 1) cmd.fail("usage: (declare-bool NAME)");
      declare(cmd, {symbol(args[0], "a name").atom, Sort::kBool, 0, 0});
    } else if (head == "declare-real") {
      if (args.empty()) cmd.fail("usage: (declare-real NAME LO HI)");
      if (args.size() < 3) {
        throw MissingBounds("real '" + args[0].atom + "' needs finite bounds LO HI", cmd.line, cmd.column);
      }
      if (args.size() != 3) cmd.fail("usage: (declare-real NAME LO HI)");
      Rational lo = number(args[1]);
      Rational hi = number(args[2]);
      if (lo > hi) cmd.fail("empty box");
      declare(cmd, {symbol(args[0], "a name").atom, Sort::kRational, lo, hi});
    } else if (head == "assert") {
      if (args.size() != 1) cmd.fail("usage: (assert FORMULA)");
      problem_.hard.push_back(formula(args[0]));
    } else if (head == "assert-soft") {
      soft(cmd, args);
    } else if (head == "evidence") {
      Assignment more = bindings(args);
      for (const auto& [name, value] : more) {
        if (problem_.evidence.contains(name)) {
          throw DuplicateId("evidence for '" + name + "' given twice", cmd.line, cmd.column);
        }
        problem_.evidence.set(name, value);
      }
    } else {
      cmd.fail("unknown command '" + std::string(head) + "'");
    }
  }

  void soft(const SExpr& cmd, std::span<const SExpr> args) {
    if (args.empty()) cmd.fail("usage: (assert-soft FORMULA :id ID :weight W :cost bool|linear)");
    SoftConstraint s;
    s.formula = formula(args[0]);
    bool has_id = false;
    std::set<std::string_view> seen;
    for (std::size_t i = 1; i < args.size(); i += 2) {
      const SExpr& key = args[i];
      if (key.is_list || key.atom.empty() || key.atom[0] != ':') key.fail("expected a :keyword");
      if (i + 1 >= args.size()) key.fail("missing value for " + key.atom);
      if (!seen.insert(key.atom).second) key.fail("repeated " + key.atom);
      const SExpr& value = args[i + 1];
      if (key.atom == ":id") {
        s.id = symbol(value, "an id").atom;
        if (!is_valid_identifier(s.id)) value.fail("invalid id '" + s.id + "'");
        has_id = true;
      } else if (key.atom == ":weight") {
        s.weight = number(value);
        if (s.weight < 0) value.fail("weights must be nonnegative");
      } else if (key.atom == ":cost") {
        if (value.is_atom("bool")) {
          s.kind = CostKind::kBoolean;
        } else if (value.is_atom("linear")) {
          s.kind = CostKind::kLinear;
        } else {
          value.fail("cost must be 'bool' or 'linear'");
        }
      } else if (key.atom == ":scale") {
        s.scale = number(value);
        if (s.scale < 0) value.fail("scale must be nonnegative");
      } else {
        key.fail("unknown attribute " + key.atom);
      }
    }
    if (!has_id) cmd.fail("assert-soft needs :id");
    for (const SoftConstraint& other : problem_.soft) {
      if (other.id == s.id) throw DuplicateId("soft id '" + s.id + "' used twice", cmd.line, cmd.column);
    }
    if (s.kind == CostKind::kLinear && !admits_linear_cost(s.formula)) {
      cmd.fail("soft '" + s.id + "' cannot take a linear cost (Boolean leaves or distinct)");
    }
    problem_.soft.push_back(std::move(s));
  }

  Problem problem_;
  bool untyped_ = false;
  std::map<std::string, std::size_t, std::less<>> decls_;
};

std::string print_bindings(const Assignment& a) {
  std::string out;
  for (const auto& [name, value] : a) {
    if (!out.empty()) out += " ";
    out += "(= " + name + " " + to_string(value) + ")";
  }
  return out;
}

}  // namespace

std::string print_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

Problem parse_problem(std::string_view text) {
  Problem p = ProblemParser().parse(text);
  p.validate();
  return p;
}

std::string print_problem(const Problem& problem) {
  std::ostringstream out;
  for (const VariableDecl& v : problem.variables) {
    if (v.sort == Sort::kBool) {
      out << "(declare-bool " << v.name << ")\n";
    } else {
      out << "(declare-real " << v.name << " " << to_string(v.lo) << " " << to_string(v.hi) << ")\n";
    }
  }
  for (const Formula& f : problem.hard) out << "(assert " << to_sexpr(f) << ")\n";
  for (const SoftConstraint& s : problem.soft) {
    out << "(assert-soft " << to_sexpr(s.formula) << " :id " << s.id << " :weight " << to_string(s.weight)
        << " :cost " << to_string(s.kind);
    if (s.scale != 1) out << " :scale " << to_string(s.scale);
    out << ")\n";
  }
  if (!problem.evidence.empty()) out << "(evidence " << print_bindings(problem.evidence) << ")\n";
  return out.str();
}

namespace {

std::vector<Example> read_dataset(std::string_view text, const Problem* typed) {
  ProblemParser parser;
  Problem problem;
  if (typed != nullptr) {
    problem = *typed;
    parser.adopt(problem);
  } else {
    parser.set_untyped();
  }
  std::vector<Example> out;
  for (const SExpr& e : Reader(text).read_all()) {
    if (e.head() != "example") e.fail("expected (example (given ...) (gold ...))");
    Example ex;
    bool has_given = false;
    bool has_gold = false;
    for (const SExpr& part : std::span(e.items).subspan(1)) {
      std::string_view head = part.head();
      if (head == "given" && !has_given) {
        ex.evidence = parser.bindings(std::span(part.items).subspan(1));
        has_given = true;
      } else if (head == "gold" && !has_gold) {
        ex.gold = parser.bindings(std::span(part.items).subspan(1));
        has_gold = true;
      } else {
        part.fail("expected a single (given ...) and a single (gold ...)");
      }
    }
    if (!has_gold) e.fail("example without (gold ...)");
    for (const auto& [name, value] : ex.gold) {
      if (ex.evidence.contains(name)) e.fail("'" + name + "' is both given and gold");
    }
    for (const VariableDecl& v : problem.variables) {
      if (!ex.evidence.contains(v.name) && !ex.gold.contains(v.name)) {
        e.fail("example leaves '" + v.name + "' unset");
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Assignment> read_predictions(std::string_view text, const Problem* typed) {
  ProblemParser parser;
  if (typed != nullptr) {
    parser.adopt(*typed);
  } else {
    parser.set_untyped();
  }
  std::vector<Assignment> out;
  for (const SExpr& e : Reader(text).read_all()) {
    if (e.head() != "prediction") e.fail("expected (prediction (= NAME VALUE) ...)");
    out.push_back(parser.bindings(std::span(e.items).subspan(1)));
  }
  return out;
}

}  // namespace

std::vector<Example> parse_dataset(std::string_view text, const Problem& problem) {
  return read_dataset(text, &problem);
}

std::vector<Example> parse_dataset(std::string_view text) { return read_dataset(text, nullptr); }

std::string print_dataset(std::span<const Example> examples) {
  std::string out;
  for (const Example& ex : examples) {
    out += "(example (given " + print_bindings(ex.evidence) + ") (gold " + print_bindings(ex.gold) + "))\n";
  }
  return out;
}

std::vector<Assignment> parse_predictions(std::string_view text, const Problem& problem) {
  return read_predictions(text, &problem);
}

std::vector<Assignment> parse_predictions(std::string_view text) { return read_predictions(text, nullptr); }

std::string print_predictions(std::span<const Assignment> predictions) {
  std::string out;
  for (const Assignment& a : predictions) {
    out += "(prediction";
    if (!a.empty()) out += " " + print_bindings(a);
    out += ")\n";
  }
  return out;
}

ModelWeights parse_model(std::string_view text, const Problem& problem) {
  ModelWeights model;
  model.weights.assign(problem.soft.size(), Rational(0));
  std::vector<bool> seen(problem.soft.size(), false);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto parse_header_double = [&](const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line_no, 1);
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#C=", 0) == 0) {
        model.c = parse_header_double(line.substr(3));
      } else if (line.rfind("#eps=", 0) == 0) {
        model.epsilon = parse_header_double(line.substr(5));
      } else if (line.rfind("#tau=", 0) == 0) {
        try {
          model.tau = parse_rational(line.substr(5));
        } catch (const std::invalid_argument& e) {
          throw ParseError(e.what(), line_no, 6);
        }
      }
      continue;
    }
    std::istringstream fields(line);
    std::string id;
    std::string weight;
    std::string extra;
    if (!(fields >> id >> weight) || (fields >> extra)) throw ParseError("expected 'ID WEIGHT'", line_no, 1);
    auto it = std::find_if(problem.soft.begin(), problem.soft.end(),
                           [&](const SoftConstraint& s) { return s.id == id; });
    if (it == problem.soft.end()) throw ParseError("unknown soft id '" + id + "'", line_no, 1);
    const auto j = static_cast<std::size_t>(it - problem.soft.begin());
    if (seen[j]) throw DuplicateId("weight for '" + id + "' given twice", line_no, 1);
    Rational w;
    try {
      w = parse_rational(weight);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no, id.size() + 2);
    }
    if (w < 0) throw ParseError("weights must be nonnegative", line_no, id.size() + 2);
    model.weights[j] = w;
    seen[j] = true;
  }
  for (std::size_t j = 0; j < seen.size(); ++j) {
    if (!seen[j]) throw ParseError("model lacks a weight for '" + problem.soft[j].id + "'");
  }
  return model;
}

std::string print_model(const ModelWeights& model, const Problem& problem) {
  if (model.weights.size() != problem.soft.size()) throw DimensionError("model and problem disagree on |w|");
  std::vector<std::pair<std::string, Rational>> rows;
  for (std::size_t j = 0; j < problem.soft.size(); ++j) rows.emplace_back(problem.soft[j].id, model.weights[j]);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "#C=" + print_double(model.c) + "\n#eps=" + print_double(model.epsilon) + "\n#tau=" +
                    to_string(model.tau) + "\n";
  for (const auto& [id, w] : rows) out += id + " " + to_string(w) + "\n";
  return out;
}

std::string print_solution(const Solution& solution, const Problem& problem) {
  std::string status(to_string(solution.status));
  if (solution.stats.timed_out) status = solution.status == SolveStatus::kOptimum ? "timeout" : "unknown";
  std::string out = "status " + status + "\n";
  if (solution.status != SolveStatus::kOptimum) return out;
  out += "objective " + to_string(solution.objective) + "\n";
  for (const VariableDecl& v : problem.variables) {
    if (const Value* value = solution.assignment.find(v.name)) {
      out += "(= " + v.name + " " + to_string(*value) + ")\n";
    }
  }
  return out;
}

}  // namespace lmt
