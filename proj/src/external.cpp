#include "nestasp/external.hpp"

#include <limits>
#include <mutex>

namespace nestasp {

const std::set<ClassicalLiteral>& InputView::extension(const std::string& predicate) const {
  static const std::set<ClassicalLiteral> empty;
  auto it = extensions.find(predicate);
  return it == extensions.end() ? empty : it->second;
}

std::string InputView::fingerprint() const {
  std::string out;
  for (const auto& [pred, lits] : extensions) {
    out += pred;
    out.push_back(':');
    for (const ClassicalLiteral& l : lits) {
      out += to_string(l);
      out.push_back(';');
    }
    out.push_back('\n');
  }
  return out;
}

bool OracleFunction::accepts_input_count(std::size_t n) const {
  return variadic ? n >= inputs.size() : n == inputs.size();
}

InputKind OracleFunction::input_kind(std::size_t position) const {
  if (position < inputs.size()) return inputs[position];
  return variadic.value_or(InputKind::constant);
}

bool OracleFunction::test(const OracleQuery& query, const Tuple& outputs) const {
  return enumerate(query).contains(outputs);
}

struct OracleEnv::Memo {
  mutable std::mutex mutex;
  std::map<std::string, TupleSet> table;
};

OracleEnv::OracleEnv()
    : registry_(std::make_shared<const std::map<std::string, std::shared_ptr<const OracleFunction>>>()),
      memo_(std::make_shared<Memo>()) {}

const OracleFunction* OracleEnv::find(const std::string& name) const {
  auto it = registry_->find(name);
  return it == registry_->end() ? nullptr : it->second.get();
}

const OracleFunction& OracleEnv::at(const std::string& name) const {
  if (const OracleFunction* f = find(name)) return *f;
  throw OracleError("unknown external atom &" + name);
}

std::vector<std::string> OracleEnv::names() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : *registry_) out.push_back(name);
  return out;
}

OracleEnv OracleEnv::with_answer_cache(std::shared_ptr<AnswerCache> cache) const {
  OracleEnv copy = *this;
  copy.cache_ = std::move(cache);
  return copy;
}

OracleEnv OracleEnv::with_memoization(bool on) const {
  OracleEnv copy = *this;
  copy.memoize_ = on;
  return copy;
}

void OracleEnv::clear_memo() const {
  std::lock_guard lock(memo_->mutex);
  memo_->table.clear();
}

std::size_t OracleEnv::memo_size() const {
  std::lock_guard lock(memo_->mutex);
  return memo_->table.size();
}

OracleEnv register_oracle(const OracleEnv& env, OracleFunction f) {
  if (env.find(f.name)) throw OracleError("external atom &" + f.name + " is already registered");
  if (!f.enumerate) throw OracleError("external atom &" + f.name + " has no enumerate function");
  auto registry = std::make_shared<std::map<std::string, std::shared_ptr<const OracleFunction>>>(*env.registry_);
  std::string name = f.name;
  registry->emplace(std::move(name), std::make_shared<const OracleFunction>(std::move(f)));
  OracleEnv out = env;
  out.registry_ = std::move(registry);
  return out;
}

TupleSet evaluate(const OracleEnv& env, const std::string& name, const InputView& view,
                  std::span<const Term> inputs, const EvalContext& context) {
  const OracleFunction& f = env.at(name);
  if (!f.accepts_input_count(inputs.size())) {
    throw OracleError("external atom &" + name + " does not take " + std::to_string(inputs.size()) +
                      " inputs");
  }
  std::string key;
  if (env.memoize_) {
    key = name;
    key.push_back('\0');
    for (const Term& t : inputs) {
      key += to_string(t);
      key.push_back('\x1f');
    }
    key.push_back('\0');
    key += view.fingerprint();
    key.push_back('\0');
    key += context.base_dir.string();
    if (env.cache_) key += "#" + std::to_string(cache_generation(*env.cache_));
    std::lock_guard lock(env.memo_->mutex);
    if (auto it = env.memo_->table.find(key); it != env.memo_->table.end()) return it->second;
  }
  TupleSet result = f.enumerate(OracleQuery{view, inputs, env, context});
  for (const Tuple& t : result) {
    if (t.size() != f.output_arity) {
      throw OracleError("external atom &" + name + " produced a tuple of arity " +
                        std::to_string(t.size()) + ", expected " + std::to_string(f.output_arity));
    }
  }
  if (env.memoize_) {
    std::lock_guard lock(env.memo_->mutex);
    env.memo_->table.emplace(std::move(key), result);
  }
  return result;
}

BuiltinCall route_builtin(const BuiltinAtom& atom) {
  if (atom.op == CompareOp::eq) {
    if (atom.addend) return {builtin_names::plus, {atom.rhs, *atom.addend}, {atom.lhs}};
    return {builtin_names::assign, {atom.rhs}, {atom.lhs}};
  }
  return {std::string(to_string(atom.op)), {atom.lhs, atom.rhs}, {}};
}

namespace {

std::int64_t integer_input(const Term& t, const char* op) {
  if (!t.is_integer()) {
    throw OracleError(std::string("arithmetic '") + op + "' on non-integer term " + to_string(t));
  }
  return t.value();
}

// Integers compare numerically; anything else by the term order.
int compare_terms(const Term& a, const Term& b) {
  if (a.is_integer() && b.is_integer()) return a.value() < b.value() ? -1 : (a.value() > b.value() ? 1 : 0);
  auto c = a <=> b;
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

OracleFunction comparison(CompareOp op) {
  OracleFunction f;
  f.name = std::string(to_string(op));
  f.inputs = {InputKind::constant, InputKind::constant};
  f.output_arity = 0;
  f.enumerate = [op](const OracleQuery& q) {
    int c = compare_terms(q.inputs[0], q.inputs[1]);
    bool holds = false;
    switch (op) {
      case CompareOp::eq: holds = c == 0; break;
      case CompareOp::ne: holds = c != 0; break;
      case CompareOp::lt: holds = c < 0; break;
      case CompareOp::le: holds = c <= 0; break;
      case CompareOp::gt: holds = c > 0; break;
      case CompareOp::ge: holds = c >= 0; break;
    }
    return holds ? TupleSet{Tuple{}} : TupleSet{};
  };
  return f;
}

}  // namespace

OracleEnv with_builtins(const OracleEnv& env) {
  OracleEnv out = env;

  OracleFunction assign;
  assign.name = builtin_names::assign;
  assign.inputs = {InputKind::constant};
  assign.output_arity = 1;
  assign.enumerate = [](const OracleQuery& q) { return TupleSet{Tuple{q.inputs[0]}}; };
  out = register_oracle(out, std::move(assign));

  OracleFunction plus;
  plus.name = builtin_names::plus;
  plus.inputs = {InputKind::constant, InputKind::constant};
  plus.output_arity = 1;
  plus.enumerate = [](const OracleQuery& q) {
    std::int64_t a = integer_input(q.inputs[0], "+");
    std::int64_t b = integer_input(q.inputs[1], "+");
    std::int64_t sum = 0;
    if (__builtin_add_overflow(a, b, &sum)) {
      throw OracleError("integer overflow in " + std::to_string(a) + " + " + std::to_string(b));
    }
    return TupleSet{Tuple{Term::integer(sum)}};
  };
  out = register_oracle(out, std::move(plus));

  for (CompareOp op : {CompareOp::ne, CompareOp::lt, CompareOp::le, CompareOp::gt, CompareOp::ge}) {
    out = register_oracle(out, comparison(op));
  }
  return out;
}

}  // namespace nestasp
