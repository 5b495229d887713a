#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "nestasp/ast.hpp"

namespace nestasp {

/// Variable-free rule with external atoms already evaluated away.
struct GroundRule {
  std::vector<ClassicalLiteral> head;
  std::vector<ClassicalLiteral> positive;
  std::vector<ClassicalLiteral> negative;  // under `not`

  friend auto operator<=>(const GroundRule&, const GroundRule&) = default;
  friend bool operator==(const GroundRule&, const GroundRule&) = default;
};

struct GroundProgram {
  std::vector<GroundRule> rules;

  friend bool operator==(const GroundProgram&, const GroundProgram&) = default;
};

std::string to_string(const GroundRule& rule);
std::string to_string(const GroundProgram& program);

/// A set of ground classical literals.
struct Interpretation {
  std::set<ClassicalLiteral> literals;

  bool contains(const ClassicalLiteral& l) const { return literals.contains(l); }
  /// True when no literal occurs together with its strong negation.
  bool consistent() const;

  friend bool operator==(const Interpretation&, const Interpretation&) = default;
};

/// One answer set, literals in canonical (text) order.
struct AnswerSet {
  std::vector<ClassicalLiteral> literals;
  std::size_t canonical_index = 0;

  bool contains(const ClassicalLiteral& l) const;
  Interpretation interpretation() const;
  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

/// `{lit1, lit2, ...}` with literals in the stored order.
std::string to_string(const AnswerSet& answer_set);

class ResourceError : public Error {
 public:
  using Error::Error;
};

struct SolverOptions {
  /// Ground programs with more distinct atoms than this are refused.
  std::size_t max_atoms = 100000;
  /// Re-check every returned answer set (consistency, model of the reduct, minimality,
  /// anti-chain) and throw std::logic_error on a violation.
  bool self_check = false;
};

/// Process-wide defaults picked up by default-constructed evaluation contexts.
SolverOptions& default_solver_options();

/// Gelfond-Lifschitz reduct: drops rules with a `not l` where l is in `i`, strips the rest.
GroundProgram reduct(const GroundProgram& program, const Interpretation& i);

/// Classical satisfaction of every rule; `not l` is read against `i` itself.
bool is_model(const GroundProgram& program, const Interpretation& i);

/// All consistent answer sets, sorted by their literal text sequences.
std::vector<AnswerSet> answer_sets(const GroundProgram& program, const SolverOptions& options = default_solver_options());

/// Sorts literals of each set, sorts the sets and assigns canonical indices.
std::vector<AnswerSet> canonicalize(std::vector<Interpretation> sets);

/// Checks the stable-model properties of `sets` against `program`; returns a description of
/// the first violation or an empty string.
std::string verify_answer_sets(const GroundProgram& program, const std::vector<AnswerSet>& sets);

}  // namespace nestasp
