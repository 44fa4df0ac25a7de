#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plantsim/random.hpp"

namespace plantsim::lsys {

// Piecewise-linear function over normalized age. Control-point ages are
// strictly increasing from 0 to 1; `stretch` scales the age axis so an organ
// takes `stretch` times longer to reach the end of the curve.
struct GrowthFunction {
  struct Point {
    double age = 0.0;
    double value = 0.0;
    bool operator==(const Point&) const = default;
  };

  std::string name;
  std::vector<Point> points;
  double stretch = 1.0;

  // Throws plantsim::Error when the invariants do not hold.
  void validate() const;
  // Value at normalized position x, clamped to [0, 1].
  double at(double x) const;

  bool operator==(const GrowthFunction&) const = default;
};

double evaluate_growth(const GrowthFunction& f, double age, double duration);

// ---------------------------------------------------------------------------
// Expressions are compiled to postfix code; identifiers are resolved to
// formal-parameter slots, model-constant slots, or growth-function indices at
// parse time.

enum class OpCode : std::uint8_t {
  number,
  param,
  constant,
  negate,
  add,
  subtract,
  multiply,
  divide,
  min,
  max,
  less,
  less_equal,
  greater,
  greater_equal,
  equal,
  not_equal,
  growth,
};

struct Instruction {
  OpCode op = OpCode::number;
  std::uint32_t index = 0;
  double value = 0.0;
  bool operator==(const Instruction&) const = default;
};

struct EvalContext {
  std::span<const double> params;
  std::span<const double> constants;
  std::span<const GrowthFunction> growth;
};

class Expression {
 public:
  static constexpr std::size_t kMaxDepth = 64;

  Expression() = default;
  // Throws plantsim::Error if the code is not a well-formed single-valued
  // program or needs more than kMaxDepth stack slots.
  explicit Expression(std::vector<Instruction> code);

  static Expression number(double v) { return Expression({Instruction{OpCode::number, 0, v}}); }

  double evaluate(const EvalContext& ctx) const;
  bool empty() const { return code_.empty(); }
  const std::vector<Instruction>& code() const { return code_; }

  bool operator==(const Expression& other) const { return code_ == other.code_; }

 private:
  std::vector<Instruction> code_;
};

// ---------------------------------------------------------------------------

struct ModelDefinition;

struct ModuleSymbol {
  std::string name;
  std::vector<double> params;

  bool is_push() const { return name == "["; }
  bool is_pop() const { return name == "]"; }
  bool operator==(const ModuleSymbol&) const = default;
};

class SymbolString {
 public:
  SymbolString() = default;
  // Throws plantsim::Error on empty names, non-finite parameters or
  // unbalanced brackets.
  explicit SymbolString(std::vector<ModuleSymbol> modules);

  const std::vector<ModuleSymbol>& modules() const { return modules_; }
  std::size_t size() const { return modules_.size(); }
  bool empty() const { return modules_.empty(); }
  const ModuleSymbol& operator[](std::size_t i) const { return modules_[i]; }
  auto begin() const { return modules_.begin(); }
  auto end() const { return modules_.end(); }

  bool operator==(const SymbolString&) const = default;

 private:
  friend SymbolString derive_step(const ModelDefinition&, const SymbolString&,
                                  std::span<const double>, Rng&);
  struct Unchecked {};
  SymbolString(std::vector<ModuleSymbol> modules, Unchecked) : modules_(std::move(modules)) {}

  std::vector<ModuleSymbol> modules_;
};

// Debug text form, e.g. "A(1)[+(45)B]". Parameters use the shortest
// representation that round-trips.
std::string to_string(const SymbolString& s);
// Inverse of to_string; parameters must be numeric literals.
SymbolString parse_symbol_string(std::string_view text);

bool brackets_balanced(std::span<const ModuleSymbol> modules);

// ---------------------------------------------------------------------------

struct ModuleTemplate {
  std::string name;
  std::vector<Expression> args;
  bool operator==(const ModuleTemplate&) const = default;
};

struct Successor {
  double probability = 1.0;
  std::vector<ModuleTemplate> modules;
  bool operator==(const Successor&) const = default;
};

struct Production {
  std::string predecessor;
  std::vector<std::string> formals;
  Expression condition;  // empty means always applicable
  std::vector<Successor> successors;

  bool stochastic() const { return successors.size() > 1; }
  bool operator==(const Production&) const = default;
};

struct Constant {
  std::string name;
  double value = 0.0;
  bool operator==(const Constant&) const = default;
};

struct ModelDefinition {
  static constexpr std::size_t kDefaultMaxLength = 1'000'000;

  std::vector<Constant> constants;
  std::vector<GrowthFunction> growth;
  std::vector<ModuleTemplate> axiom;
  std::vector<Production> productions;
  std::size_t max_length = kDefaultMaxLength;

  std::optional<std::size_t> constant_index(std::string_view name) const;
  const GrowthFunction* growth_function(std::string_view name) const;
  double constant(std::string_view name) const;  // throws if undeclared
  // Returns a copy with one constant replaced; throws if undeclared.
  ModelDefinition with_constant(std::string_view name, double value) const;

  std::vector<double> constant_values() const;

  bool operator==(const ModelDefinition&) const = default;
};

// Parses the line-oriented model format:
//
//   # comment
//   const: name = 1.5
//   growth: name = (0, 0) (0.5, 0.8) (1, 1) stretch 1.2
//   maxlen: 100000
//   axiom: A(0) [ +(30) B ]
//   A(t) : t < 5 -> A(t + 1) B @ 0.6 | A(t + 1) @ 0.4
//
// Throws ParseError with line/column on any error.
ModelDefinition parse_model(std::string_view text);

// Canonical text form; parse_model(serialize_model(m)) == m.
std::string serialize_model(const ModelDefinition& model);

std::string expression_to_string(const Expression& e, std::span<const std::string> formals,
                                 const ModelDefinition& model);

SymbolString instantiate_axiom(const ModelDefinition& model);
SymbolString instantiate_axiom(const ModelDefinition& model, std::span<const double> constants);

// One parallel rewriting step. Modules are processed left to right; a
// stochastic production consumes exactly one uniform draw from `rng` each
// time it is applied. `constants` overrides the model's constant values
// (pass model.constant_values() for none).
SymbolString derive_step(const ModelDefinition& model, const SymbolString& current,
                         std::span<const double> constants, Rng& rng);

SymbolString derive(const ModelDefinition& model, std::size_t steps, std::uint64_t seed);

}  // namespace plantsim::lsys
