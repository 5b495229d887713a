#include "nestasp/nested.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "nestasp/parser.hpp"

namespace nestasp {

std::string ProgramKey::text() const {
  std::string out = kind == CallKind::embedded ? "embedded" : "file";
  out.push_back('\x1e');
  out += identity;
  for (const std::string& f : injected_facts) {
    out.push_back('\x1e');
    out += f;
  }
  return out;
}

AnswerCache::AnswerCache(std::size_t max_depth) : max_depth_(max_depth) {}

void AnswerCache::set_max_depth(std::size_t depth) {
  std::lock_guard lock(mutex_);
  max_depth_ = depth;
}

void AnswerCache::set_trace(std::function<void(const TraceEvent&)> trace) {
  std::lock_guard lock(mutex_);
  trace_ = std::move(trace);
}

Handle AnswerCache::get_or_evaluate(const ProgramKey& key, const std::function<std::vector<AnswerSet>()>& evaluate,
                                    std::size_t depth) {
  const std::string k = key.text();
  std::unique_lock lock(mutex_);
  for (;;) {
    if (auto it = index_.find(k); it != index_.end()) return it->second;
    if (!running_.contains(k)) break;
    done_.wait(lock);
  }
  running_.insert(k);
  lock.unlock();

  std::vector<AnswerSet> results;
  try {
    results = evaluate();
  } catch (...) {
    lock.lock();
    running_.erase(k);
    done_.notify_all();
    throw;
  }

  lock.lock();
  Handle h = static_cast<Handle>(entries_.size());
  entries_.push_back(CacheEntry{h, key, std::move(results)});
  index_.emplace(k, h);
  running_.erase(k);
  ++evaluations_;
  auto trace = trace_;
  lock.unlock();
  done_.notify_all();
  if (trace) trace(TraceEvent{key, h, depth});
  return h;
}

std::optional<Handle> AnswerCache::lookup(const ProgramKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(key.text());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const CacheEntry& AnswerCache::entry(Handle program_handle) const {
  std::lock_guard lock(mutex_);
  if (program_handle < 0 || static_cast<std::size_t>(program_handle) >= entries_.size()) {
    throw NestedError(NestedError::Kind::unknown_handle, "unknown program handle " + std::to_string(program_handle));
  }
  return entries_[static_cast<std::size_t>(program_handle)];
}

std::size_t AnswerCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t AnswerCache::evaluations() const {
  std::lock_guard lock(mutex_);
  return evaluations_;
}

void AnswerCache::reset() {
  std::lock_guard lock(mutex_);
  entries_.clear();
  index_.clear();
  evaluations_ = 0;
  ++generation_;
}

std::uint64_t AnswerCache::generation() const {
  std::lock_guard lock(mutex_);
  return generation_;
}

std::uint64_t cache_generation(const AnswerCache& cache) { return cache.generation(); }

void session_reset(AnswerCache& cache) { cache.reset(); }

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NestedError(NestedError::Kind::file_not_found, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path resolve(const std::filesystem::path& source, const std::filesystem::path& base_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> candidates;
  if (source.is_absolute()) {
    candidates.push_back(source);
  } else {
    if (!base_dir.empty()) candidates.push_back(base_dir / source);
    candidates.push_back(fs::current_path() / source);
  }
  for (const fs::path& c : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(c, ec)) return fs::weakly_canonical(c);
  }
  throw NestedError(NestedError::Kind::file_not_found, "subprogram file not found: " + source.string());
}

Program parse_attributed(std::string_view text, const std::string& origin, bool embedded) {
  try {
    return embedded ? parse_embedded(text) : parse_program(text);
  } catch (const ParseError& e) {
    throw NestedError(NestedError::Kind::subprogram, origin + ":" + e.what());
  }
}

const AnswerSet& answer_set_of(const AnswerCache& cache, Handle program, Handle answer_set) {
  const CacheEntry& e = cache.entry(program);
  if (answer_set < 0 || static_cast<std::size_t>(answer_set) >= e.results.size()) {
    throw NestedError(NestedError::Kind::unknown_handle, "program " + std::to_string(program) +
                                                             " has no answer set " + std::to_string(answer_set));
  }
  return e.results[static_cast<std::size_t>(answer_set)];
}

}  // namespace

Handle call(AnswerCache& cache, const OracleEnv& env, const EvalContext& context, CallKind kind,
            std::string_view source, std::span<const std::string> input_preds, const InputView& view) {
  ProgramKey key;
  key.kind = kind;
  Program embedded;
  std::filesystem::path file;
  std::filesystem::path sub_dir = context.base_dir;
  if (kind == CallKind::embedded) {
    embedded = parse_attributed(source, "embedded subprogram", true);
    key.identity = canonical_text(embedded);
  } else {
    file = resolve(std::filesystem::path(source), context.base_dir);
    key.identity = file.string();
    sub_dir = file.parent_path();
  }

  std::vector<Rule> facts;
  std::set<std::string> distinct;
  for (const std::string& pred : input_preds) {
    if (!distinct.insert(pred).second) {
      throw NestedError(NestedError::Kind::bad_argument, "input predicate " + pred + " given twice");
    }
    for (const ClassicalLiteral& l : view.extension(pred)) {
      facts.push_back(Rule{{l}, {}});
      key.injected_facts.push_back(to_string(facts.back()));
    }
  }
  std::sort(key.injected_facts.begin(), key.injected_facts.end());

  const std::string key_text = key.text();
  if (std::find(context.call_stack.begin(), context.call_stack.end(), key_text) != context.call_stack.end()) {
    throw NestedError(NestedError::Kind::cyclic_call,
                      "subprogram " + key.identity + " calls itself with the same input");
  }

  auto run = [&]() {
    if (context.depth + 1 > cache.max_depth()) {
      throw NestedError(NestedError::Kind::depth_exceeded,
                        "subprogram nesting exceeds the maximum depth of " + std::to_string(cache.max_depth()));
    }
    Program program = kind == CallKind::embedded ? embedded
                                                 : parse_attributed(read_file(file), file.string(), false);
    program.rules.insert(program.rules.end(), facts.begin(), facts.end());
    EvalContext child = context;
    child.depth = context.depth + 1;
    child.base_dir = sub_dir;
    child.call_stack.push_back(key_text);
    return evaluate_program(program, env, child);
  };
  return cache.get_or_evaluate(key, run, context.depth + 1);
}

std::vector<Handle> answersets(const AnswerCache& cache, Handle program) {
  const CacheEntry& e = cache.entry(program);
  std::vector<Handle> out(e.results.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Handle>(i);
  return out;
}

std::vector<std::pair<std::string, std::size_t>> predicates(const AnswerCache& cache, Handle program,
                                                            Handle answer_set) {
  std::set<std::pair<std::string, std::size_t>> found;
  for (const ClassicalLiteral& l : answer_set_of(cache, program, answer_set).literals) {
    found.emplace(l.predicate(), l.atom.arity());
  }
  return {found.begin(), found.end()};
}

std::vector<LiteralRow> arguments(const AnswerCache& cache, Handle program, Handle answer_set,
                                  const std::string& predicate) {
  std::vector<LiteralRow> rows;
  std::size_t index = 0;
  for (const ClassicalLiteral& l : answer_set_of(cache, program, answer_set).literals) {
    if (l.predicate() != predicate) continue;
    for (std::size_t j = 0; j < l.atom.args.size(); ++j) {
      rows.push_back({program, answer_set, predicate, index, j, l.atom.args[j]});
    }
    rows.push_back({program, answer_set, predicate, index, std::nullopt, Term::integer(l.negated ? 1 : 0)});
    ++index;
  }
  return rows;
}

namespace {

AnswerCache& cache_of(const OracleQuery& q) {
  if (!q.env.answer_cache()) throw NestedError(NestedError::Kind::bad_argument, "no answer cache in this environment");
  return *q.env.answer_cache();
}

Handle handle_input(const OracleQuery& q, std::size_t i, const char* atom) {
  const Term& t = q.inputs[i];
  if (!t.is_integer()) {
    throw NestedError(NestedError::Kind::bad_argument,
                      std::string("&") + atom + " expects a handle, got " + to_string(t));
  }
  return t.value();
}

OracleFunction call_oracle(const char* name, CallKind kind) {
  OracleFunction f;
  f.name = name;
  f.inputs = {InputKind::constant};
  f.variadic = InputKind::predicate;
  f.output_arity = 1;
  f.enumerate = [kind, name](const OracleQuery& q) {
    const Term& source = q.inputs[0];
    if (!source.is_string()) {
      throw NestedError(NestedError::Kind::bad_argument,
                        std::string("&") + name + " expects a string, got " + to_string(source));
    }
    std::vector<std::string> preds;
    for (std::size_t i = 1; i < q.inputs.size(); ++i) preds.push_back(q.inputs[i].text());
    Handle h = call(cache_of(q), q.env, q.context, kind, source.text(), preds, q.view);
    return TupleSet{Tuple{Term::integer(h)}};
  };
  return f;
}

}  // namespace

OracleEnv make_env(std::shared_ptr<AnswerCache> cache) {
  OracleEnv env = with_builtins(OracleEnv{}).with_answer_cache(std::move(cache));
  env = register_oracle(env, call_oracle("callhex", CallKind::embedded));
  env = register_oracle(env, call_oracle("callhexfile", CallKind::file));

  OracleFunction sets;
  sets.name = "answersets";
  sets.inputs = {InputKind::constant};
  sets.output_arity = 1;
  sets.enumerate = [](const OracleQuery& q) {
    TupleSet out;
    for (Handle a : answersets(cache_of(q), handle_input(q, 0, "answersets"))) out.insert({Term::integer(a)});
    return out;
  };
  env = register_oracle(env, std::move(sets));

  OracleFunction preds;
  preds.name = "predicates";
  preds.inputs = {InputKind::constant, InputKind::constant};
  preds.output_arity = 2;
  preds.enumerate = [](const OracleQuery& q) {
    TupleSet out;
    auto found = predicates(cache_of(q), handle_input(q, 0, "predicates"), handle_input(q, 1, "predicates"));
    for (const auto& [p, arity] : found) {
      out.insert({Term::constant(p), Term::integer(static_cast<std::int64_t>(arity))});
    }
    return out;
  };
  env = register_oracle(env, std::move(preds));

  OracleFunction args;
  args.name = "arguments";
  args.inputs = {InputKind::constant, InputKind::constant, InputKind::constant};
  args.output_arity = 3;
  args.enumerate = [](const OracleQuery& q) {
    const Term& pred = q.inputs[2];
    if (!pred.is_constant()) {
      throw NestedError(NestedError::Kind::bad_argument, "&arguments expects a predicate name, got " + to_string(pred));
    }
    TupleSet out;
    auto rows = arguments(cache_of(q), handle_input(q, 0, "arguments"), handle_input(q, 1, "arguments"), pred.text());
    for (const LiteralRow& r : rows) {
      Term position = r.position ? Term::integer(static_cast<std::int64_t>(*r.position)) : Term::constant(kSignMarker);
      out.insert({Term::integer(static_cast<std::int64_t>(r.literal_index)), position, r.value});
    }
    return out;
  };
  env = register_oracle(env, std::move(args));
  return env;
}

Session::Session(std::size_t max_depth)
    : cache_(std::make_shared<AnswerCache>(max_depth)), env_(make_env(cache_)) {}

void Session::register_oracle(OracleFunction f) { env_ = nestasp::register_oracle(env_, std::move(f)); }

void Session::set_memoization(bool on) { env_ = env_.with_memoization(on); }

std::vector<AnswerSet> Session::evaluate(const Program& program, EvalContext context) {
  return evaluate_program(program, env_, context);
}

std::vector<AnswerSet> Session::evaluate_text(std::string_view text, EvalContext context) {
  return evaluate(parse_program(text), std::move(context));
}

std::vector<AnswerSet> Session::evaluate_file(const std::filesystem::path& path, EvalContext context) {
  std::filesystem::path abs = std::filesystem::absolute(path);
  Program program = parse_program(read_file(abs));
  if (context.base_dir.empty()) context.base_dir = abs.parent_path();
  return evaluate(program, std::move(context));
}

void Session::reset() {
  session_reset(*cache_);
  env_.clear_memo();
}

}  // namespace nestasp
