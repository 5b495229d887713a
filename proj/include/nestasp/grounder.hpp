#pragma once

#include <map>
#include <string>
#include <vector>

#include "nestasp/ast.hpp"
#include "nestasp/external.hpp"
#include "nestasp/solver.hpp"

namespace nestasp {

/// Recursion through an external atom, or a negation cycle inside a stratum that evaluates
/// external atoms.
class CycleError : public Error {
 public:
  using Error::Error;
};

class GroundingError : public Error {
 public:
  using Error::Error;
};

/// Predicate dependency graph. Edges point from a body predicate to a head predicate.
struct DependencyGraph {
  enum class EdgeKind { positive, negative, external };
  struct Edge {
    std::string from;
    std::string to;
    EdgeKind kind;
    /// Rule index the edge comes from.
    std::size_t rule;
    friend auto operator<=>(const Edge&, const Edge&) = default;
  };

  std::vector<std::string> predicates;
  std::vector<Edge> edges;
  /// Number of (non built-in) external atom occurrences per rule index.
  std::vector<std::size_t> external_atoms;
};

/// Builds the graph; only inputs the oracle declares as predicates yield external edges.
DependencyGraph dependency_graph(const Program& program, const OracleEnv& env);

struct Stratification {
  /// Predicates per stratum, bottom-up; each list is sorted.
  std::vector<std::vector<std::string>> strata;
  /// Rule indices per stratum, in program order.
  std::vector<std::vector<std::size_t>> rules;
  std::map<std::string, std::size_t> level;
};

/// Layers predicates so that every external atom only reads predicates of strictly lower
/// strata. Ordinary positive and negative dependencies stay within a stratum.
Stratification stratify(const Program& program, const OracleEnv& env);

/// Instantiates the rules of one stratum on top of `lower`, the fixed answer set of the strata
/// below. External atoms are evaluated against `lower` and replaced by `&aux_<name>_<k>` facts.
/// The result contains `lower` as facts.
GroundProgram ground_stratum(const Program& program, const Stratification& strat, std::size_t stratum,
                             const Interpretation& lower, const OracleEnv& env,
                             const EvalContext& context = {});

/// One complete ground program per answer set of the lower strata.
std::vector<GroundProgram> ground_branches(const Program& program, const OracleEnv& env,
                                           const EvalContext& context = {});

/// Ground program of a program whose lower strata have a unique answer set; throws
/// GroundingError otherwise. A program whose lower strata have no answer set grounds to the
/// unsatisfiable `:- .`.
GroundProgram ground(const Program& program, const OracleEnv& env, const EvalContext& context = {});

/// Answer sets of a program: strata are grounded and solved bottom-up, branching over the
/// answer sets of lower strata. Auxiliary external-atom literals are removed.
std::vector<AnswerSet> evaluate_program(const Program& program, const OracleEnv& env,
                                        const EvalContext& context = {});

/// True for the replacement atoms of external atoms.
bool is_auxiliary(const ClassicalLiteral& literal);

}  // namespace nestasp
