#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nestasp {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A term of a HEX-lite program: constant symbol, quoted string, integer or variable.
///
/// Terms are plain values. Ordering first compares the kind, then the payload, which gives
/// every container keyed on terms a deterministic iteration order.
class Term {
 public:
  enum class Kind : std::uint8_t { constant, string, integer, variable };

  Term() = default;

  static Term constant(std::string symbol) { return Term(Kind::constant, std::move(symbol), 0); }
  static Term string(std::string text) { return Term(Kind::string, std::move(text), 0); }
  static Term integer(std::int64_t value) { return Term(Kind::integer, {}, value); }
  static Term variable(std::string name) { return Term(Kind::variable, std::move(name), 0); }

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::constant; }
  bool is_string() const { return kind_ == Kind::string; }
  bool is_integer() const { return kind_ == Kind::integer; }
  bool is_variable() const { return kind_ == Kind::variable; }
  bool is_ground() const { return kind_ != Kind::variable; }

  /// Symbol, string payload (unescaped) or variable name. Empty for integers.
  const std::string& text() const { return text_; }
  std::int64_t value() const { return value_; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(Kind kind, std::string text, std::int64_t value)
      : kind_(kind), text_(std::move(text)), value_(value) {}

  Kind kind_ = Kind::constant;
  std::string text_;
  std::int64_t value_ = 0;
};

using Tuple = std::vector<Term>;

struct Atom {
  std::string predicate;
  Tuple args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// An atom or its strong negation `-p(...)`.
struct ClassicalLiteral {
  Atom atom;
  bool negated = false;

  const std::string& predicate() const { return atom.predicate; }
  bool is_ground() const { return atom.is_ground(); }
  /// The complementary literal (p(t) <-> -p(t)).
  ClassicalLiteral complement() const { return {atom, !negated}; }

  friend auto operator<=>(const ClassicalLiteral&, const ClassicalLiteral&) = default;
  friend bool operator==(const ClassicalLiteral&, const ClassicalLiteral&) = default;
};

/// `&name[inputs](outputs)`. Inputs may mention variables that other body elements bind.
struct ExternalAtom {
  std::string name;
  Tuple inputs;
  Tuple outputs;

  friend auto operator<=>(const ExternalAtom&, const ExternalAtom&) = default;
  friend bool operator==(const ExternalAtom&, const ExternalAtom&) = default;
};

enum class CompareOp : std::uint8_t { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);

/// Comparison or arithmetic assignment `lhs op rhs [+ addend]`; the addend is only legal with `=`.
struct BuiltinAtom {
  CompareOp op = CompareOp::eq;
  Term lhs;
  Term rhs;
  std::optional<Term> addend;

  friend auto operator<=>(const BuiltinAtom&, const BuiltinAtom&) = default;
  friend bool operator==(const BuiltinAtom&, const BuiltinAtom&) = default;
};

struct BodyElement {
  std::variant<ClassicalLiteral, ExternalAtom, BuiltinAtom> payload;
  bool naf = false;

  const ClassicalLiteral* literal() const { return std::get_if<ClassicalLiteral>(&payload); }
  const ExternalAtom* external() const { return std::get_if<ExternalAtom>(&payload); }
  const BuiltinAtom* builtin() const { return std::get_if<BuiltinAtom>(&payload); }

  friend bool operator==(const BodyElement&, const BodyElement&) = default;
};

/// Disjunctive rule. An empty head is a constraint, an empty body a fact.
struct Rule {
  std::vector<ClassicalLiteral> head;
  std::vector<BodyElement> body;

  bool is_fact() const { return body.empty() && head.size() == 1 && head.front().is_ground(); }
  bool is_constraint() const { return head.empty(); }

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Program {
  std::vector<Rule> rules;

  friend bool operator==(const Program&, const Program&) = default;
};

// Textual forms. These are the exact forms the parser reads back.
std::string escape_string(std::string_view payload);
std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const ClassicalLiteral& literal);
std::string to_string(const ExternalAtom& atom);
std::string to_string(const BuiltinAtom& atom);
std::string to_string(const BodyElement& element);
std::string to_string(const Rule& rule);

/// Deterministic serialization: one rule per line, rules sorted by their text.
std::string canonical_text(const Program& program);

/// Order used for answer-set output: byte order of the literal text.
bool canonical_less(const ClassicalLiteral& a, const ClassicalLiteral& b);

/// Variables of a term list, in order of first occurrence.
void collect_variables(const Tuple& terms, std::vector<std::string>& out);
std::vector<std::string> variables_of(const Rule& rule);

/// Returns the first unsafe variable in left-to-right occurrence order, or nothing when safe.
///
/// A variable is bound by a positive classical body literal, by the outputs of a positive
/// external atom whose inputs are bound, or as the left-hand side of a positive `=` whose
/// right-hand side is bound.
std::optional<std::string> check_safety(const Rule& rule);

}  // namespace nestasp
