#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nestasp/ast.hpp"
#include "nestasp/solver.hpp"

namespace nestasp {

class AnswerCache;
class OracleEnv;

/// Bumped on every cache reset; part of the memo key so memoized handles never outlive it.
std::uint64_t cache_generation(const AnswerCache& cache);

class OracleError : public Error {
 public:
  using Error::Error;
};

/// The part of an interpretation an oracle may read: for each declared input predicate, the
/// ground literals over it (either sign, any arity).
struct InputView {
  std::map<std::string, std::set<ClassicalLiteral>> extensions;

  const std::set<ClassicalLiteral>& extension(const std::string& predicate) const;
  /// Canonical text of the view, used as memo key.
  std::string fingerprint() const;
};

/// Where and how deep an evaluation runs. Passed unchanged to every oracle.
struct EvalContext {
  std::size_t depth = 0;
  /// Directory relative subprogram paths are resolved against first.
  std::filesystem::path base_dir;
  /// Cache keys of the subprogram evaluations enclosing this one.
  std::vector<std::string> call_stack;
  SolverOptions solver = default_solver_options();
  /// Solve independent branches of a stratum on worker threads.
  bool parallel = false;
};

using TupleSet = std::set<Tuple>;

struct OracleQuery {
  const InputView& view;
  std::span<const Term> inputs;
  const OracleEnv& env;
  const EvalContext& context;
};

enum class InputKind { predicate, constant };

/// Semantics of an external predicate: a finite enumeration of the output tuples that make
/// `&name[inputs](tuple)` true. The Boolean oracle is membership in that set.
struct OracleFunction {
  std::string name;
  std::vector<InputKind> inputs;
  /// Kind of every input past `inputs`; unset means the input count is exact.
  std::optional<InputKind> variadic;
  std::size_t output_arity = 0;
  std::function<TupleSet(const OracleQuery&)> enumerate;

  bool accepts_input_count(std::size_t n) const;
  InputKind input_kind(std::size_t position) const;
  bool test(const OracleQuery& query, const Tuple& outputs) const;
};

/// Registry of oracles plus the services they share. Copies share the memo table and the
/// answer cache; the registry itself never changes after construction.
class OracleEnv {
 public:
  OracleEnv();

  const OracleFunction* find(const std::string& name) const;
  const OracleFunction& at(const std::string& name) const;
  std::vector<std::string> names() const;

  const std::shared_ptr<AnswerCache>& answer_cache() const { return cache_; }
  OracleEnv with_answer_cache(std::shared_ptr<AnswerCache> cache) const;

  bool memoizing() const { return memoize_; }
  OracleEnv with_memoization(bool on) const;
  void clear_memo() const;
  std::size_t memo_size() const;

  friend OracleEnv register_oracle(const OracleEnv& env, OracleFunction f);
  friend TupleSet evaluate(const OracleEnv& env, const std::string& name, const InputView& view,
                           std::span<const Term> inputs, const EvalContext& context);

 private:
  struct Memo;

  std::shared_ptr<const std::map<std::string, std::shared_ptr<const OracleFunction>>> registry_;
  std::shared_ptr<Memo> memo_;
  std::shared_ptr<AnswerCache> cache_;
  bool memoize_ = true;
};

/// Returns `env` extended with `f`; throws OracleError when the name is taken.
OracleEnv register_oracle(const OracleEnv& env, OracleFunction f);

/// Enumerates the output tuples of `name` for the given inputs, memoized on
/// (name, inputs, view fingerprint, base directory).
TupleSet evaluate(const OracleEnv& env, const std::string& name, const InputView& view,
                  std::span<const Term> inputs, const EvalContext& context = {});

/// Oracle names the parser's comparison built-ins are routed to.
namespace builtin_names {
inline constexpr const char* assign = "=";
inline constexpr const char* plus = "=+";
}  // namespace builtin_names

/// Oracle name and (inputs, outputs) split of a comparison built-in.
struct BuiltinCall {
  std::string name;
  Tuple inputs;
  Tuple outputs;
};
BuiltinCall route_builtin(const BuiltinAtom& atom);

/// `env` plus the arithmetic and comparison built-ins.
OracleEnv with_builtins(const OracleEnv& env);

}  // namespace nestasp
