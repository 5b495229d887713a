#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nestasp/ast.hpp"
#include "nestasp/external.hpp"
#include "nestasp/grounder.hpp"
#include "nestasp/solver.hpp"

namespace nestasp {

class NestedError : public Error {
 public:
  enum class Kind { file_not_found, subprogram, depth_exceeded, cyclic_call, unknown_handle, bad_argument };

  NestedError(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using Handle = std::int64_t;

enum class CallKind { embedded, file };

/// Identity of a subprogram call: source plus the facts injected into it.
struct ProgramKey {
  CallKind kind = CallKind::embedded;
  /// Canonical program text (embedded) or absolute path (file).
  std::string identity;
  /// Canonical text of every injected fact, sorted.
  std::vector<std::string> injected_facts;

  /// Single string form; equal keys give equal strings and embedded/file never collide.
  std::string text() const;
  friend auto operator<=>(const ProgramKey&, const ProgramKey&) = default;
};

struct CacheEntry {
  Handle program_handle = 0;
  ProgramKey key;
  /// Answer sets in canonical order; the answer-set handle is the index.
  std::vector<AnswerSet> results;
};

/// One row of `&arguments`: an argument position, or the sign row when `position` is empty.
struct LiteralRow {
  Handle program_handle = 0;
  Handle answerset_handle = 0;
  std::string predicate;
  std::size_t literal_index = 0;
  std::optional<std::size_t> position;
  Term value;

  friend bool operator==(const LiteralRow&, const LiteralRow&) = default;
};

/// Results of subprogram calls of one session, addressed by consecutive program handles.
///
/// Lookups may run concurrently. A key is evaluated at most once: concurrent first requests
/// wait for the one running evaluation. Entry references stay valid until reset().
class AnswerCache {
 public:
  static constexpr std::size_t kDefaultMaxDepth = 16;

  struct TraceEvent {
    const ProgramKey& key;
    Handle handle;
    std::size_t depth;
  };

  explicit AnswerCache(std::size_t max_depth = kDefaultMaxDepth);

  std::size_t max_depth() const { return max_depth_; }
  void set_max_depth(std::size_t depth);
  void set_trace(std::function<void(const TraceEvent&)> trace);

  /// Handle for `key`, running `evaluate` only when the key is new.
  Handle get_or_evaluate(const ProgramKey& key, const std::function<std::vector<AnswerSet>()>& evaluate,
                         std::size_t depth = 0);
  std::optional<Handle> lookup(const ProgramKey& key) const;

  const CacheEntry& entry(Handle program_handle) const;
  std::size_t size() const;
  /// Number of subprogram evaluations that completed.
  std::size_t evaluations() const;
  /// Drops every entry; the next program handle is 0 again.
  void reset();
  std::uint64_t generation() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable done_;
  std::deque<CacheEntry> entries_;
  std::map<std::string, Handle> index_;
  std::set<std::string> running_;
  std::size_t evaluations_ = 0;
  std::uint64_t generation_ = 0;
  std::size_t max_depth_;
  std::function<void(const TraceEvent&)> trace_;
};

/// Runs (or reuses) a subprogram with the facts over `input_preds` from `view` injected.
/// `source` is program text for embedded calls and a path for file calls.
Handle call(AnswerCache& cache, const OracleEnv& env, const EvalContext& context, CallKind kind,
            std::string_view source, std::span<const std::string> input_preds, const InputView& view);

/// Answer-set handles 0..n-1 of a cached program.
std::vector<Handle> answersets(const AnswerCache& cache, Handle program);
/// (predicate, arity) pairs present in one answer set, either sign.
std::vector<std::pair<std::string, std::size_t>> predicates(const AnswerCache& cache, Handle program,
                                                            Handle answer_set);
/// Rows describing the literals over `predicate` in one answer set.
std::vector<LiteralRow> arguments(const AnswerCache& cache, Handle program, Handle answer_set,
                                  const std::string& predicate);
void session_reset(AnswerCache& cache);

/// Distinguished second output of `&arguments` marking the sign row.
inline constexpr const char* kSignMarker = "s";

/// Built-ins plus `&callhex`, `&callhexfile`, `&answersets`, `&predicates` and `&arguments`,
/// all bound to `cache`.
OracleEnv make_env(std::shared_ptr<AnswerCache> cache);

/// A top-level evaluation session: one cache and the environment that uses it.
class Session {
 public:
  explicit Session(std::size_t max_depth = AnswerCache::kDefaultMaxDepth);

  AnswerCache& cache() { return *cache_; }
  const OracleEnv& env() const { return env_; }
  /// Adds a user oracle.
  void register_oracle(OracleFunction f);
  void set_memoization(bool on);

  std::vector<AnswerSet> evaluate(const Program& program, EvalContext context = {});
  std::vector<AnswerSet> evaluate_text(std::string_view text, EvalContext context = {});
  /// Parses and evaluates a file; relative subprogram paths resolve against its directory.
  std::vector<AnswerSet> evaluate_file(const std::filesystem::path& path, EvalContext context = {});

  /// Empties the cache and the oracle memo table.
  void reset();

 private:
  std::shared_ptr<AnswerCache> cache_;
  OracleEnv env_;
};

}  // namespace nestasp
