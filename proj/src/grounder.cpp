#include "nestasp/grounder.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <set>

namespace nestasp {

bool is_auxiliary(const ClassicalLiteral& literal) { return literal.predicate().starts_with('&'); }

DependencyGraph dependency_graph(const Program& program, const OracleEnv& env) {
  DependencyGraph g;
  std::set<std::string> preds;
  std::set<DependencyGraph::Edge> seen;
  auto edge = [&](const std::string& from, const std::string& to, DependencyGraph::EdgeKind kind,
                  std::size_t rule) {
    if (seen.insert({from, to, kind, rule}).second) g.edges.push_back({from, to, kind, rule});
  };
  for (std::size_t r = 0; r < program.rules.size(); ++r) {
    const Rule& rule = program.rules[r];
    std::size_t externals = 0;
    for (const ClassicalLiteral& h : rule.head) preds.insert(h.predicate());
    // Disjuncts of one head depend on each other.
    for (const ClassicalLiteral& a : rule.head)
      for (const ClassicalLiteral& b : rule.head)
        if (a.predicate() != b.predicate())
          edge(a.predicate(), b.predicate(), DependencyGraph::EdgeKind::positive, r);
    for (const BodyElement& e : rule.body) {
      if (const ClassicalLiteral* lit = e.literal()) {
        preds.insert(lit->predicate());
        for (const ClassicalLiteral& h : rule.head)
          edge(lit->predicate(), h.predicate(),
               e.naf ? DependencyGraph::EdgeKind::negative : DependencyGraph::EdgeKind::positive, r);
      } else if (const ExternalAtom* ext = e.external()) {
        ++externals;
        const OracleFunction& f = env.at(ext->name);
        for (std::size_t i = 0; i < ext->inputs.size(); ++i) {
          if (f.input_kind(i) != InputKind::predicate) continue;
          const Term& in = ext->inputs[i];
          if (!in.is_constant()) {
            throw GroundingError("input " + std::to_string(i + 1) + " of &" + ext->name +
                                 " must be a predicate name in rule: " + to_string(rule));
          }
          preds.insert(in.text());
          for (const ClassicalLiteral& h : rule.head)
            edge(in.text(), h.predicate(), DependencyGraph::EdgeKind::external, r);
        }
      }
    }
    g.external_atoms.push_back(externals);
  }
  g.predicates.assign(preds.begin(), preds.end());
  return g;
}

namespace {

// Tarjan's strongly connected components; returns a component id per predicate.
std::map<std::string, std::size_t> components(const DependencyGraph& g) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& e : g.edges) succ[e.from].push_back(e.to);
  std::map<std::string, std::size_t> index, low, comp;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  std::size_t counter = 0;
  std::size_t next_comp = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const std::string& w : succ[v]) {
      if (!index.contains(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.contains(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      for (;;) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp[w] = next_comp;
        if (w == v) break;
      }
      ++next_comp;
    }
  };
  for (const std::string& p : g.predicates)
    if (!index.contains(p)) visit(p);
  return comp;
}

}  // namespace

Stratification stratify(const Program& program, const OracleEnv& env) {
  DependencyGraph g = dependency_graph(program, env);
  auto comp = components(g);
  for (const auto& e : g.edges) {
    if (e.kind == DependencyGraph::EdgeKind::external && comp[e.from] == comp[e.to]) {
      throw CycleError("recursion through an external atom: " + e.to + " depends on input predicate " +
                       e.from + " in rule: " + to_string(program.rules[e.rule]));
    }
  }
  // Longest path where only external edges climb a level; converges because no external edge
  // lies on a cycle.
  std::map<std::string, std::size_t> level;
  for (const std::string& p : g.predicates) level[p] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : g.edges) {
      std::size_t need = level[e.from] + (e.kind == DependencyGraph::EdgeKind::external ? 1 : 0);
      if (level[e.to] < need) {
        level[e.to] = need;
        changed = true;
      }
    }
  }
  std::vector<std::size_t> rule_level(program.rules.size(), 0);
  std::size_t top = 0;
  for (std::size_t r = 0; r < program.rules.size(); ++r) {
    const Rule& rule = program.rules[r];
    std::size_t l = 0;
    if (!rule.head.empty()) {
      l = level[rule.head.front().predicate()];
    } else {
      for (const BodyElement& e : rule.body) {
        if (const ClassicalLiteral* lit = e.literal()) l = std::max(l, level[lit->predicate()]);
      }
      for (const auto& e : g.edges) {
        if (e.rule == r && e.kind == DependencyGraph::EdgeKind::external) l = std::max(l, level[e.from] + 1);
      }
      // Constraints have no outgoing edges; collect their external inputs directly.
      for (const BodyElement& e : rule.body) {
        const ExternalAtom* ext = e.external();
        if (!ext) continue;
        const OracleFunction& f = env.at(ext->name);
        for (std::size_t i = 0; i < ext->inputs.size(); ++i) {
          if (f.input_kind(i) == InputKind::predicate && ext->inputs[i].is_constant()) {
            auto it = level.find(ext->inputs[i].text());
            l = std::max(l, (it == level.end() ? 0 : it->second) + 1);
          }
        }
      }
    }
    rule_level[r] = l;
    top = std::max(top, l);
  }
  for (const auto& [p, l] : level) top = std::max(top, l);

  // Unstratified negation is left to the solver, except where external atoms are evaluated.
  for (const auto& e : g.edges) {
    if (e.kind != DependencyGraph::EdgeKind::negative || comp[e.from] != comp[e.to]) continue;
    std::size_t l = level[e.to];
    for (std::size_t r = 0; r < program.rules.size(); ++r) {
      if (rule_level[r] == l && g.external_atoms[r] > 0) {
        throw CycleError("negation cycle through " + e.from + " in a stratum that evaluates external atoms");
      }
    }
  }

  Stratification s;
  if (program.rules.empty()) return s;
  s.strata.resize(top + 1);
  s.rules.resize(top + 1);
  for (const auto& [p, l] : level) s.strata[l].push_back(p);
  for (std::size_t r = 0; r < program.rules.size(); ++r) s.rules[rule_level[r]].push_back(r);
  s.level = std::move(level);
  return s;
}

namespace {

using Substitution = std::map<std::string, Term>;

Term substitute(const Term& t, const Substitution& sub) {
  if (!t.is_variable()) return t;
  auto it = sub.find(t.text());
  return it == sub.end() ? t : it->second;
}

Tuple substitute(const Tuple& ts, const Substitution& sub) {
  Tuple out;
  out.reserve(ts.size());
  for (const Term& t : ts) out.push_back(substitute(t, sub));
  return out;
}

ClassicalLiteral substitute(const ClassicalLiteral& l, const Substitution& sub) {
  return {{l.atom.predicate, substitute(l.atom.args, sub)}, l.negated};
}

bool ground_terms(const Tuple& ts) {
  return std::all_of(ts.begin(), ts.end(), [](const Term& t) { return t.is_ground(); });
}

// Extends `sub` so that `pattern` equals `value`; false on mismatch.
bool unify(const Tuple& pattern, const Tuple& value, Substitution& sub) {
  if (pattern.size() != value.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    Term p = substitute(pattern[i], sub);
    if (p.is_variable()) {
      sub.emplace(p.text(), value[i]);
    } else if (p != value[i]) {
      return false;
    }
  }
  return true;
}

std::string signature(const ClassicalLiteral& l) {
  return (l.negated ? "-" : "") + l.predicate() + "/" + std::to_string(l.atom.arity());
}

class StratumGrounder {
 public:
  StratumGrounder(const Program& program, const Stratification& strat, std::size_t stratum,
                  const Interpretation& lower, const OracleEnv& env, const EvalContext& context)
      : program_(program), strat_(strat), stratum_(stratum), lower_(lower), env_(env), context_(context) {
    std::size_t k = 0;
    for (const Rule& r : program.rules) {
      std::vector<std::size_t> ids;
      for (const BodyElement& e : r.body) ids.push_back(e.external() ? k++ : 0);
      occurrence_.push_back(std::move(ids));
    }
    for (const ClassicalLiteral& l : lower.literals) {
      add(l, 0);
      lower_by_name_[l.predicate()].insert(l);
    }
  }

  GroundProgram run() {
    const auto& rules = strat_.rules[stratum_];
    for (std::size_t r : rules) {
      for (const BodyElement& e : program_.rules[r].body) {
        if (e.naf && e.external()) {
          throw GroundingError("negated external atoms are not supported: " + to_string(program_.rules[r]));
        }
      }
    }
    for (iteration_ = 0;; ++iteration_) {
      added_ = false;
      for (std::size_t r : rules) {
        const Rule& rule = program_.rules[r];
        std::vector<std::size_t> positives;
        for (std::size_t i = 0; i < rule.body.size(); ++i)
          if (rule.body[i].literal() && !rule.body[i].naf) positives.push_back(i);
        if (positives.empty()) {
          if (iteration_ == 0) instantiate(r, std::nullopt);
          continue;
        }
        for (std::size_t d : positives) instantiate(r, d);
      }
      if (!added_) break;
    }
    return finish();
  }

 private:
  struct Partial {
    Substitution sub;
    std::vector<bool> done;
    std::vector<ClassicalLiteral> aux;
  };

  bool is_lower(const std::string& pred) const {
    auto it = strat_.level.find(pred);
    return it != strat_.level.end() && it->second < stratum_;
  }

  void add(const ClassicalLiteral& l, std::size_t stamp) {
    if (stamps_.emplace(l, stamp).second) {
      by_signature_[signature(l)].push_back(l);
      if (stamp > iteration_) added_ = true;
    }
  }

  void instantiate(std::size_t r, std::optional<std::size_t> delta) {
    const Rule& rule = program_.rules[r];
    Partial p;
    p.done.assign(rule.body.size(), false);
    join(r, delta, p);
  }

  // Stamp window a positive literal at body position `i` may match.
  bool visible(std::size_t stamp, std::size_t i, std::optional<std::size_t> delta) const {
    if (!delta) return stamp <= iteration_;
    if (i == *delta) return stamp == iteration_;
    if (i < *delta) return stamp < iteration_;
    return stamp <= iteration_;
  }

  void join(std::size_t r, std::optional<std::size_t> delta, Partial& p) {
    const Rule& rule = program_.rules[r];
    std::optional<std::size_t> pick;
    if (delta && !p.done[*delta]) pick = delta;
    if (!pick) {
      for (std::size_t i = 0; i < rule.body.size() && !pick; ++i) {
        const BodyElement& e = rule.body[i];
        if (p.done[i]) continue;
        if (const ExternalAtom* ext = e.external()) {
          if (ground_terms(substitute(ext->inputs, p.sub))) pick = i;
        } else if (const BuiltinAtom* b = e.builtin()) {
          BuiltinCall call = route_builtin(*b);
          bool ready = ground_terms(substitute(call.inputs, p.sub)) && (!e.naf || ground_terms(substitute(call.outputs, p.sub)));
          if (ready) pick = i;
        }
      }
    }
    if (!pick) {
      for (std::size_t i = 0; i < rule.body.size() && !pick; ++i)
        if (!p.done[i] && rule.body[i].literal() && !rule.body[i].naf) pick = i;
    }
    if (!pick) {
      for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (!p.done[i] && !rule.body[i].literal()) {
          throw GroundingError("cannot evaluate " + to_string(rule.body[i]) +
                               ": inputs are not bound in rule: " + to_string(rule));
        }
      }
      emit(r, p);
      return;
    }

    std::size_t i = *pick;
    const BodyElement& e = rule.body[i];
    p.done[i] = true;
    if (const ClassicalLiteral* lit = e.literal()) {
      auto it = by_signature_.find(signature(*lit));
      if (it != by_signature_.end()) {
        const auto& candidates = it->second;
        for (std::size_t c = 0, n = candidates.size(); c < n; ++c) {
          const ClassicalLiteral& atom = candidates[c];
          if (!visible(stamps_.at(atom), i, delta)) continue;
          Partial next = p;
          if (unify(lit->atom.args, atom.atom.args, next.sub)) join(r, delta, next);
        }
      }
    } else if (const ExternalAtom* ext = e.external()) {
      Tuple inputs = substitute(ext->inputs, p.sub);
      const OracleFunction& f = env_.at(ext->name);
      if (f.output_arity != ext->outputs.size()) {
        throw GroundingError("&" + ext->name + " has " + std::to_string(f.output_arity) + " outputs, rule uses " +
                             std::to_string(ext->outputs.size()) + ": " + to_string(rule));
      }
      InputView view;
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (f.input_kind(k) != InputKind::predicate) continue;
        auto found = lower_by_name_.find(inputs[k].text());
        view.extensions[inputs[k].text()] =
            found == lower_by_name_.end() ? std::set<ClassicalLiteral>{} : found->second;
      }
      TupleSet results = evaluate(env_, ext->name, view, inputs, context_);
      std::string aux_name = "&aux_" + ext->name + "_" + std::to_string(occurrence_[r][i]);
      for (const Tuple& t : results) {
        Partial next = p;
        if (!unify(ext->outputs, t, next.sub)) continue;
        Tuple args = inputs;
        args.insert(args.end(), t.begin(), t.end());
        next.aux.push_back({{aux_name, std::move(args)}, false});
        join(r, delta, next);
      }
    } else {
      BuiltinCall call = route_builtin(*e.builtin());
      Tuple inputs = substitute(call.inputs, p.sub);
      TupleSet results = evaluate(env_, call.name, InputView{}, inputs, context_);
      if (e.naf) {
        if (!results.contains(substitute(call.outputs, p.sub))) join(r, delta, p);
        return;
      }
      for (const Tuple& t : results) {
        Partial next = p;
        if (unify(call.outputs, t, next.sub)) join(r, delta, next);
      }
    }
  }

  void emit(std::size_t r, const Partial& p) {
    const Rule& rule = program_.rules[r];
    GroundRule g;
    for (const ClassicalLiteral& h : rule.head) g.head.push_back(substitute(h, p.sub));
    for (const BodyElement& e : rule.body) {
      const ClassicalLiteral* lit = e.literal();
      if (!lit) continue;
      ClassicalLiteral l = substitute(*lit, p.sub);
      if (!l.is_ground()) throw GroundingError("unbound variable in " + to_string(rule));
      bool lower = is_lower(l.predicate());
      if (!e.naf) {
        if (!lower) g.positive.push_back(std::move(l));
      } else if (lower) {
        if (lower_.contains(l)) return;  // `not l` is false for good
      } else {
        g.negative.push_back(std::move(l));
      }
    }
    for (const ClassicalLiteral& a : p.aux) {
      g.positive.push_back(a);
      if (aux_seen_.insert(a).second) aux_facts_.push_back(a);
    }
    if (!seen_rules_.insert(g).second) return;
    for (const ClassicalLiteral& h : g.head) add(h, iteration_ + 1);
    rules_.push_back(std::move(g));
  }

  GroundProgram finish() {
    GroundProgram out;
    for (const ClassicalLiteral& l : lower_.literals) out.rules.push_back({{l}, {}, {}});
    for (const ClassicalLiteral& a : aux_facts_) out.rules.push_back({{a}, {}, {}});
    std::set<GroundRule> kept;
    for (GroundRule& g : rules_) {
      // `not l` over an underivable atom always holds.
      std::erase_if(g.negative, [&](const ClassicalLiteral& l) { return !stamps_.contains(l); });
      if (kept.insert(g).second) out.rules.push_back(std::move(g));
    }
    return out;
  }

  const Program& program_;
  const Stratification& strat_;
  std::size_t stratum_;
  const Interpretation& lower_;
  const OracleEnv& env_;
  const EvalContext& context_;

  std::vector<std::vector<std::size_t>> occurrence_;
  std::map<std::string, std::set<ClassicalLiteral>> lower_by_name_;
  std::map<ClassicalLiteral, std::size_t> stamps_;
  std::map<std::string, std::vector<ClassicalLiteral>> by_signature_;
  std::size_t iteration_ = 0;
  bool added_ = false;

  std::set<GroundRule> seen_rules_;
  std::vector<GroundRule> rules_;
  std::set<ClassicalLiteral> aux_seen_;
  std::vector<ClassicalLiteral> aux_facts_;
};

Interpretation strip_auxiliary(const AnswerSet& a) {
  Interpretation i;
  for (const ClassicalLiteral& l : a.literals)
    if (!is_auxiliary(l)) i.literals.insert(l);
  return i;
}

std::vector<std::vector<AnswerSet>> solve_all(const std::vector<GroundProgram>& programs, const EvalContext& context) {
  std::vector<std::vector<AnswerSet>> out(programs.size());
  if (context.parallel && programs.size() > 1) {
    std::vector<std::future<std::vector<AnswerSet>>> jobs;
    for (const GroundProgram& g : programs) {
      jobs.push_back(std::async(std::launch::async, [&g, &context] { return answer_sets(g, context.solver); }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < programs.size(); ++i) out[i] = answer_sets(programs[i], context.solver);
  }
  return out;
}

// Grounds strata bottom-up. Returns the ground programs of the top stratum, one per branch.
std::vector<GroundProgram> ground_to_top(const Program& program, const Stratification& strat, const OracleEnv& env,
                                         const EvalContext& context) {
  std::vector<Interpretation> branches{Interpretation{}};
  for (std::size_t s = 0;; ++s) {
    std::vector<GroundProgram> grounded;
    grounded.reserve(branches.size());
    // Sequential: oracle calls allocate handles in a fixed order.
    for (const Interpretation& b : branches) {
      grounded.push_back(StratumGrounder(program, strat, s, b, env, context).run());
    }
    if (s + 1 >= strat.strata.size()) return grounded;
    std::vector<Interpretation> next;
    for (auto& sets : solve_all(grounded, context))
      for (const AnswerSet& a : sets) next.push_back(strip_auxiliary(a));
    branches = std::move(next);
    if (branches.empty()) return {};
  }
}

}  // namespace

GroundProgram ground_stratum(const Program& program, const Stratification& strat, std::size_t stratum,
                             const Interpretation& lower, const OracleEnv& env, const EvalContext& context) {
  if (stratum >= strat.strata.size()) throw GroundingError("no stratum " + std::to_string(stratum));
  return StratumGrounder(program, strat, stratum, lower, env, context).run();
}

std::vector<GroundProgram> ground_branches(const Program& program, const OracleEnv& env, const EvalContext& context) {
  Stratification strat = stratify(program, env);
  if (strat.strata.empty()) return {GroundProgram{}};
  return ground_to_top(program, strat, env, context);
}

GroundProgram ground(const Program& program, const OracleEnv& env, const EvalContext& context) {
  std::vector<GroundProgram> branches = ground_branches(program, env, context);
  if (branches.empty()) return GroundProgram{{GroundRule{}}};
  if (branches.size() > 1) {
    throw GroundingError("lower strata have " + std::to_string(branches.size()) +
                         " answer sets; use evaluate_program or ground_branches");
  }
  return std::move(branches.front());
}

std::vector<AnswerSet> evaluate_program(const Program& program, const OracleEnv& env, const EvalContext& context) {
  std::vector<Interpretation> results;
  for (auto& sets : solve_all(ground_branches(program, env, context), context))
    for (const AnswerSet& a : sets) results.push_back(strip_auxiliary(a));
  return canonicalize(std::move(results));
}

}  // namespace nestasp
