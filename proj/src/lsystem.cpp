#include "plantsim/lsystem.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "plantsim/error.hpp"

namespace plantsim::lsys {

namespace {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_special_symbol(char c) {
  switch (c) {
    case '+':
    case '-':
    case '&':
    case '^':
    case '/':
    case '\\':
    case '!':
    case '[':
    case ']':
      return true;
    default:
      return false;
  }
}

int stack_effect(OpCode op) {
  switch (op) {
    case OpCode::number:
    case OpCode::param:
    case OpCode::constant:
      return 1;
    case OpCode::negate:
      return 0;
    default:
      return -1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Growth functions

void GrowthFunction::validate() const {
  if (points.size() < 2) throw Error("growth function '" + name + "' needs at least 2 points");
  if (points.front().age != 0.0 || points.back().age != 1.0)
    throw Error("growth function '" + name + "' must span ages 0 to 1");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].age > points[i - 1].age))
      throw Error("growth function '" + name + "' ages must be strictly increasing");
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.value)) throw Error("growth function '" + name + "' has a non-finite value");
  }
  if (!(stretch > 0.0) || !std::isfinite(stretch))
    throw Error("growth function '" + name + "' stretch must be positive");
}

double GrowthFunction::at(double x) const {
  if (!(x > 0.0)) return points.front().value;
  if (x >= 1.0) return points.back().value;
  auto it = std::upper_bound(points.begin(), points.end(), x,
                             [](double a, const Point& p) { return a < p.age; });
  const Point& hi = *it;
  const Point& lo = *(it - 1);
  const double t = (x - lo.age) / (hi.age - lo.age);
  return lo.value + t * (hi.value - lo.value);
}

double evaluate_growth(const GrowthFunction& f, double age, double duration) {
  if (!(duration > 0.0)) throw Error("growth duration must be positive");
  return f.at(age / (duration * f.stretch));
}

// ---------------------------------------------------------------------------
// Expressions

Expression::Expression(std::vector<Instruction> code) : code_(std::move(code)) {
  int depth = 0;
  int max_depth = 0;
  for (const auto& ins : code_) {
    if (ins.op == OpCode::negate && depth < 1) throw Error("malformed expression");
    if (stack_effect(ins.op) < 0 && depth < 2) throw Error("malformed expression");
    depth += stack_effect(ins.op);
    max_depth = std::max(max_depth, depth);
  }
  if (!code_.empty() && depth != 1) throw Error("malformed expression");
  if (static_cast<std::size_t>(max_depth) > kMaxDepth) throw Error("expression nested too deeply");
}

double Expression::evaluate(const EvalContext& ctx) const {
  std::array<double, kMaxDepth> stack;
  std::size_t top = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case OpCode::number:
        stack[top++] = ins.value;
        break;
      case OpCode::param:
        stack[top++] = ctx.params[ins.index];
        break;
      case OpCode::constant:
        stack[top++] = ctx.constants[ins.index];
        break;
      case OpCode::negate:
        stack[top - 1] = -stack[top - 1];
        break;
      default: {
        const double b = stack[--top];
        double& a = stack[top - 1];
        switch (ins.op) {
          case OpCode::add: a = a + b; break;
          case OpCode::subtract: a = a - b; break;
          case OpCode::multiply: a = a * b; break;
          case OpCode::divide: a = a / b; break;
          case OpCode::min: a = std::min(a, b); break;
          case OpCode::max: a = std::max(a, b); break;
          case OpCode::less: a = a < b ? 1.0 : 0.0; break;
          case OpCode::less_equal: a = a <= b ? 1.0 : 0.0; break;
          case OpCode::greater: a = a > b ? 1.0 : 0.0; break;
          case OpCode::greater_equal: a = a >= b ? 1.0 : 0.0; break;
          case OpCode::equal: a = a == b ? 1.0 : 0.0; break;
          case OpCode::not_equal: a = a != b ? 1.0 : 0.0; break;
          case OpCode::growth: a = evaluate_growth(ctx.growth[ins.index], a, b); break;
          default: break;
        }
      }
    }
  }
  return stack[0];
}

// ---------------------------------------------------------------------------
// Symbol strings

bool brackets_balanced(std::span<const ModuleSymbol> modules) {
  std::size_t depth = 0;
  for (const auto& m : modules) {
    if (m.is_push()) {
      ++depth;
    } else if (m.is_pop()) {
      if (depth == 0) return false;
      --depth;
    }
  }
  return depth == 0;
}

SymbolString::SymbolString(std::vector<ModuleSymbol> modules) : modules_(std::move(modules)) {
  for (const auto& m : modules_) {
    if (m.name.empty()) throw Error("module with empty name");
    for (double p : m.params) {
      if (!std::isfinite(p)) throw Error("module '" + m.name + "' has a non-finite parameter");
    }
  }
  if (!brackets_balanced(modules_)) throw Error("unbalanced brackets");
}

std::string to_string(const SymbolString& s) {
  std::string out;
  for (const auto& m : s) {
    out += m.name;
    if (!m.params.empty()) {
      out += '(';
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) out += ',';
        out += format_number(m.params[i]);
      }
      out += ')';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, std::size_t column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, offset_ + pos_ + 1, message);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  char peek_raw(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail("expected identifier");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("expected number");
    pos_ += static_cast<std::size_t>(ptr - first);
    if (!std::isfinite(v)) fail("number out of range");
    return v;
  }

  bool at_number() {
    skip_ws();
    const char c = peek_raw();
    return (c >= '0' && c <= '9') || (c == '.' && peek_raw(1) >= '0' && peek_raw(1) <= '9');
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

struct Scope {
  std::span<const std::string> formals;
  const ModelDefinition* model;
};

class ExpressionParser {
 public:
  ExpressionParser(LineParser& in, const Scope& scope) : in_(in), scope_(scope) {}

  Expression parse() {
    comparison();
    try {
      return Expression(std::move(code_));
    } catch (const Error& e) {
      in_.fail(e.what());
    }
  }

 private:
  void emit(OpCode op, std::uint32_t index = 0, double value = 0.0) {
    code_.push_back(Instruction{op, index, value});
  }

  void comparison() {
    additive();
    OpCode op;
    if (in_.accept("<=")) {
      op = OpCode::less_equal;
    } else if (in_.accept(">=")) {
      op = OpCode::greater_equal;
    } else if (in_.accept("==")) {
      op = OpCode::equal;
    } else if (in_.accept("!=")) {
      op = OpCode::not_equal;
    } else if (in_.peek() == '<') {
      in_.accept("<");
      op = OpCode::less;
    } else if (in_.peek() == '>') {
      in_.accept(">");
      op = OpCode::greater;
    } else {
      return;
    }
    additive();
    emit(op);
  }

  void additive() {
    multiplicative();
    for (;;) {
      const char c = in_.peek();
      if (c == '+') {
        in_.accept("+");
        multiplicative();
        emit(OpCode::add);
      } else if (c == '-' && in_.peek_raw(1) != '>') {
        in_.accept("-");
        multiplicative();
        emit(OpCode::subtract);
      } else {
        return;
      }
    }
  }

  void multiplicative() {
    unary();
    for (;;) {
      const char c = in_.peek();
      if (c == '*') {
        in_.accept("*");
        unary();
        emit(OpCode::multiply);
      } else if (c == '/') {
        in_.accept("/");
        unary();
        emit(OpCode::divide);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (in_.peek() == '-') {
      in_.accept("-");
      const std::size_t mark = code_.size();
      unary();
      // Fold negated literals so printed negative numbers re-parse identically.
      if (code_.size() == mark + 1 && code_.back().op == OpCode::number) {
        code_.back().value = -code_.back().value;
      } else {
        emit(OpCode::negate);
      }
      return;
    }
    if (in_.accept("+")) {
      unary();
      return;
    }
    primary();
  }

  void primary() {
    if (in_.accept("(")) {
      comparison();
      in_.expect(")");
      return;
    }
    if (in_.at_number()) {
      emit(OpCode::number, 0, in_.number());
      return;
    }
    const std::size_t col = in_.pos();
    std::string name = in_.identifier();
    if (in_.peek() == '(') {
      in_.accept("(");
      comparison();
      in_.expect(",");
      comparison();
      in_.expect(")");
      if (name == "min") {
        emit(OpCode::min);
      } else if (name == "max") {
        emit(OpCode::max);
      } else {
        const auto& g = scope_.model->growth;
        auto it = std::find_if(g.begin(), g.end(), [&](const auto& f) { return f.name == name; });
        if (it == g.end()) {
          throw_undeclared(name, col);
        }
        emit(OpCode::growth, static_cast<std::uint32_t>(it - g.begin()));
      }
      return;
    }
    for (std::size_t i = 0; i < scope_.formals.size(); ++i) {
      if (scope_.formals[i] == name) {
        emit(OpCode::param, static_cast<std::uint32_t>(i));
        return;
      }
    }
    if (auto idx = scope_.model->constant_index(name)) {
      emit(OpCode::constant, static_cast<std::uint32_t>(*idx));
      return;
    }
    throw_undeclared(name, col);
  }

  [[noreturn]] void throw_undeclared(const std::string& name, std::size_t) {
    in_.fail("undeclared identifier '" + name + "'");
  }

  LineParser& in_;
  const Scope& scope_;
  std::vector<Instruction> code_;
};

// Module sequence up to a terminator ('@', '|' or end of line).
std::vector<ModuleTemplate> parse_templates(LineParser& in, const Scope& scope) {
  std::vector<ModuleTemplate> out;
  for (;;) {
    const char c = in.peek();
    if (c == '\0' || c == '@' || c == '|') break;
    ModuleTemplate t;
    if (is_special_symbol(c)) {
      t.name = std::string(1, c);
      in.accept(t.name);
    } else if (is_ident_start(c)) {
      t.name = in.identifier();
    } else {
      in.fail(std::string("unexpected character '") + c + "'");
    }
    if (in.peek_raw() == '(') {
      in.accept("(");
      if (t.name == "[" || t.name == "]") in.fail("brackets take no parameters");
      for (;;) {
        t.args.push_back(ExpressionParser(in, scope).parse());
        if (in.accept(")")) break;
        in.expect(",");
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool templates_balanced(const std::vector<ModuleTemplate>& ts) {
  std::size_t depth = 0;
  for (const auto& t : ts) {
    if (t.name == "[") {
      ++depth;
    } else if (t.name == "]") {
      if (depth == 0) return false;
      --depth;
    }
  }
  return depth == 0;
}

Production parse_production(LineParser& in, const ModelDefinition& model) {
  Production p;
  const char c = in.peek();
  if (is_special_symbol(c)) in.fail("turtle and bracket symbols cannot be rewritten");
  p.predecessor = in.identifier();
  if (in.peek_raw() == '(') {
    in.accept("(");
    for (;;) {
      std::string f = in.identifier();
      if (std::find(p.formals.begin(), p.formals.end(), f) != p.formals.end())
        in.fail("duplicate formal parameter '" + f + "'");
      p.formals.push_back(std::move(f));
      if (in.accept(")")) break;
      in.expect(",");
    }
  }
  const Scope scope{p.formals, &model};
  if (in.accept(":")) {
    if (!in.accept("*")) p.condition = ExpressionParser(in, scope).parse();
  }
  in.expect("->");
  double total = 0.0;
  bool any_prob = false;
  for (;;) {
    Successor s;
    s.modules = parse_templates(in, scope);
    if (!templates_balanced(s.modules)) in.fail("unbalanced brackets in successor");
    if (in.accept("@")) {
      any_prob = true;
      s.probability = in.number();
      if (s.probability < 0.0 || s.probability > 1.0) in.fail("probability outside [0, 1]");
    }
    total += s.probability;
    p.successors.push_back(std::move(s));
    if (!in.accept("|")) break;
  }
  if (!in.at_end()) in.fail("unexpected trailing text");
  if (p.successors.size() > 1 || any_prob) {
    if (std::fabs(total - 1.0) > 1e-9) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", total);
      in.fail(std::string("probabilities sum to ") + buf);
    }
  }
  return p;
}

void parse_growth(LineParser& in, ModelDefinition& model) {
  GrowthFunction f;
  f.name = in.identifier();
  if (f.name == "min" || f.name == "max") in.fail("reserved name '" + f.name + "'");
  if (model.growth_function(f.name) || model.constant_index(f.name))
    in.fail("duplicate name '" + f.name + "'");
  in.expect("=");
  while (in.accept("(")) {
    GrowthFunction::Point pt;
    pt.age = in.number();
    in.expect(",");
    if (in.accept("-")) {
      pt.value = -in.number();
    } else {
      pt.value = in.number();
    }
    in.expect(")");
    f.points.push_back(pt);
  }
  if (in.accept("stretch")) f.stretch = in.number();
  if (!in.at_end()) in.fail("unexpected trailing text");
  try {
    f.validate();
  } catch (const Error& e) {
    in.fail(e.what());
  }
  model.growth.push_back(std::move(f));
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

}  // namespace

ModelDefinition parse_model(std::string_view text) {
  ModelDefinition model;
  bool have_axiom = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = strip_comment(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (blank(line)) {
      if (end == text.size()) break;
      continue;
    }

    LineParser in(line, line_no, 0);
    // Directive lines are "keyword: ..."; everything else with an arrow is a
    // production.
    std::string keyword;
    {
      LineParser probe(line, line_no, 0);
      if (is_ident_start(probe.peek())) {
        keyword = probe.identifier();
        if (probe.peek() != ':') keyword.clear();
      }
    }
    const bool directive = keyword == "const" || keyword == "growth" || keyword == "axiom" ||
                           keyword == "maxlen";
    if (directive) {
      in.identifier();
      in.expect(":");
      if (keyword == "const") {
        Constant c;
        c.name = in.identifier();
        if (c.name == "min" || c.name == "max") in.fail("reserved name '" + c.name + "'");
        if (model.constant_index(c.name) || model.growth_function(c.name))
          in.fail("duplicate name '" + c.name + "'");
        in.expect("=");
        c.value = in.accept("-") ? -in.number() : in.number();
        if (!in.at_end()) in.fail("unexpected trailing text");
        model.constants.push_back(std::move(c));
      } else if (keyword == "growth") {
        parse_growth(in, model);
      } else if (keyword == "maxlen") {
        const double v = in.number();
        if (!(v >= 1.0) || v != std::floor(v)) in.fail("maxlen must be a positive integer");
        model.max_length = static_cast<std::size_t>(v);
        if (!in.at_end()) in.fail("unexpected trailing text");
      } else {
        if (have_axiom) in.fail("duplicate axiom");
        const Scope scope{{}, &model};
        model.axiom = parse_templates(in, scope);
        if (!in.at_end()) in.fail("unexpected text in axiom");
        if (!templates_balanced(model.axiom)) in.fail("unbalanced brackets in axiom");
        have_axiom = true;
      }
    } else if (line.find("->") != std::string_view::npos) {
      model.productions.push_back(parse_production(in, model));
    } else if (!keyword.empty()) {
      throw ParseError(line_no, 1, "unknown directive '" + keyword + "'");
    } else {
      in.fail("expected a directive or a production");
    }
    if (end == text.size()) break;
  }
  if (!have_axiom) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing axiom");
  return model;
}

SymbolString parse_symbol_string(std::string_view text) {
  ModelDefinition empty;
  LineParser in(text, 1, 0);
  const Scope scope{{}, &empty};
  auto templates = parse_templates(in, scope);
  if (!in.at_end()) in.fail("unexpected character");
  std::vector<ModuleSymbol> modules;
  modules.reserve(templates.size());
  const EvalContext ctx{};
  for (const auto& t : templates) {
    ModuleSymbol m{t.name, {}};
    for (const auto& a : t.args) m.params.push_back(a.evaluate(ctx));
    modules.push_back(std::move(m));
  }
  return SymbolString(std::move(modules));
}

// ---------------------------------------------------------------------------
// ModelDefinition

std::optional<std::size_t> ModelDefinition::constant_index(std::string_view name) const {
  for (std::size_t i = 0; i < constants.size(); ++i) {
    if (constants[i].name == name) return i;
  }
  return std::nullopt;
}

const GrowthFunction* ModelDefinition::growth_function(std::string_view name) const {
  for (const auto& g : growth) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

double ModelDefinition::constant(std::string_view name) const {
  auto idx = constant_index(name);
  if (!idx) throw Error("undeclared constant '" + std::string(name) + "'");
  return constants[*idx].value;
}

ModelDefinition ModelDefinition::with_constant(std::string_view name, double value) const {
  auto idx = constant_index(name);
  if (!idx) throw Error("undeclared constant '" + std::string(name) + "'");
  ModelDefinition copy = *this;
  copy.constants[*idx].value = value;
  return copy;
}

std::vector<double> ModelDefinition::constant_values() const {
  std::vector<double> out;
  out.reserve(constants.size());
  for (const auto& c : constants) out.push_back(c.value);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string expression_to_string(const Expression& e, std::span<const std::string> formals,
                                 const ModelDefinition& model) {
  std::vector<std::string> stack;
  for (const auto& ins : e.code()) {
    switch (ins.op) {
      case OpCode::number: {
        std::string s = format_number(ins.value);
        if (ins.value < 0 || std::signbit(ins.value)) s = "(" + s + ")";
        stack.push_back(std::move(s));
        break;
      }
      case OpCode::param:
        stack.push_back(formals[ins.index]);
        break;
      case OpCode::constant:
        stack.push_back(model.constants[ins.index].name);
        break;
      case OpCode::negate:
        stack.back() = "(-" + stack.back() + ")";
        break;
      default: {
        std::string b = std::move(stack.back());
        stack.pop_back();
        std::string a = std::move(stack.back());
        const char* op = "";
        switch (ins.op) {
          case OpCode::add: op = " + "; break;
          case OpCode::subtract: op = " - "; break;
          case OpCode::multiply: op = " * "; break;
          case OpCode::divide: op = " / "; break;
          case OpCode::less: op = " < "; break;
          case OpCode::less_equal: op = " <= "; break;
          case OpCode::greater: op = " > "; break;
          case OpCode::greater_equal: op = " >= "; break;
          case OpCode::equal: op = " == "; break;
          case OpCode::not_equal: op = " != "; break;
          default: break;
        }
        if (ins.op == OpCode::min) {
          stack.back() = "min(" + a + ", " + b + ")";
        } else if (ins.op == OpCode::max) {
          stack.back() = "max(" + a + ", " + b + ")";
        } else if (ins.op == OpCode::growth) {
          stack.back() = model.growth[ins.index].name + "(" + a + ", " + b + ")";
        } else {
          stack.back() = "(" + a + op + b + ")";
        }
      }
    }
  }
  return stack.empty() ? std::string() : stack.back();
}

namespace {

std::string templates_to_string(const std::vector<ModuleTemplate>& ts,
                                std::span<const std::string> formals, const ModelDefinition& m) {
  std::string out;
  for (const auto& t : ts) {
    if (!out.empty()) out += ' ';
    out += t.name;
    if (!t.args.empty()) {
      out += '(';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += expression_to_string(t.args[i], formals, m);
      }
      out += ')';
    }
  }
  return out;
}

}  // namespace

std::string serialize_model(const ModelDefinition& model) {
  std::string out;
  for (const auto& c : model.constants) {
    out += "const: " + c.name + " = " + format_number(c.value) + "\n";
  }
  for (const auto& g : model.growth) {
    out += "growth: " + g.name + " =";
    for (const auto& p : g.points) {
      out += " (" + format_number(p.age) + ", " + format_number(p.value) + ")";
    }
    if (g.stretch != 1.0) out += " stretch " + format_number(g.stretch);
    out += "\n";
  }
  if (model.max_length != ModelDefinition::kDefaultMaxLength) {
    out += "maxlen: " + std::to_string(model.max_length) + "\n";
  }
  out += "axiom: " + templates_to_string(model.axiom, {}, model) + "\n";
  for (const auto& p : model.productions) {
    out += p.predecessor;
    if (!p.formals.empty()) {
      out += '(';
      for (std::size_t i = 0; i < p.formals.size(); ++i) {
        if (i) out += ", ";
        out += p.formals[i];
      }
      out += ')';
    }
    if (!p.condition.empty()) out += " : " + expression_to_string(p.condition, p.formals, model);
    out += " ->";
    for (std::size_t i = 0; i < p.successors.size(); ++i) {
      const auto& s = p.successors[i];
      if (i) out += " |";
      const std::string body = templates_to_string(s.modules, p.formals, model);
      if (!body.empty()) out += " " + body;
      if (p.successors.size() > 1 || s.probability != 1.0) out += " @ " + format_number(s.probability);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivation

SymbolString instantiate_axiom(const ModelDefinition& model) {
  return instantiate_axiom(model, model.constant_values());
}

SymbolString instantiate_axiom(const ModelDefinition& model, std::span<const double> constants) {
  const EvalContext ctx{{}, constants, model.growth};
  std::vector<ModuleSymbol> modules;
  modules.reserve(model.axiom.size());
  for (const auto& t : model.axiom) {
    ModuleSymbol m{t.name, {}};
    for (const auto& a : t.args) m.params.push_back(a.evaluate(ctx));
    modules.push_back(std::move(m));
  }
  return SymbolString(std::move(modules));
}

SymbolString derive_step(const ModelDefinition& model, const SymbolString& current,
                         std::span<const double> constants, Rng& rng) {
  std::unordered_map<std::string_view, std::vector<const Production*>> index;
  for (const auto& p : model.productions) index[p.predecessor].push_back(&p);

  std::vector<ModuleSymbol> out;
  out.reserve(current.size() + current.size() / 2 + 8);

  for (const auto& m : current) {
    const Production* chosen = nullptr;
    if (auto it = index.find(m.name); it != index.end()) {
      for (const Production* p : it->second) {
        if (p->formals.size() != m.params.size()) continue;
        if (!p->condition.empty()) {
          const EvalContext ctx{m.params, constants, model.growth};
          if (p->condition.evaluate(ctx) == 0.0) continue;
        }
        chosen = p;
        break;
      }
    }
    if (!chosen) {
      out.push_back(m);
    } else {
      const Successor* succ = &chosen->successors.front();
      if (chosen->stochastic()) {
        const double u = rng.uniform();
        double acc = 0.0;
        succ = &chosen->successors.back();
        for (const auto& s : chosen->successors) {
          acc += s.probability;
          if (u < acc) {
            succ = &s;
            break;
          }
        }
      }
      const EvalContext ctx{m.params, constants, model.growth};
      for (const auto& t : succ->modules) {
        ModuleSymbol produced{t.name, {}};
        produced.params.reserve(t.args.size());
        for (const auto& a : t.args) {
          const double v = a.evaluate(ctx);
          if (!std::isfinite(v))
            throw Error("production for '" + m.name + "' produced a non-finite parameter in '" +
                        t.name + "'");
          produced.params.push_back(v);
        }
        out.push_back(std::move(produced));
      }
    }
    if (out.size() > model.max_length) {
      throw LengthLimitError("derived string exceeds the maximum length of " +
                             std::to_string(model.max_length) + " modules");
    }
  }
  return SymbolString(std::move(out), SymbolString::Unchecked{});
}

SymbolString derive(const ModelDefinition& model, std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  const auto constants = model.constant_values();
  SymbolString s = instantiate_axiom(model, constants);
  for (std::size_t i = 0; i < steps; ++i) s = derive_step(model, s, constants, rng);
  return s;
}

}  // namespace plantsim::lsys
