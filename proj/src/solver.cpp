#include "nestasp/solver.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace nestasp {

std::string to_string(const GroundRule& rule) {
  Rule r;
  r.head = rule.head;
  for (const auto& l : rule.positive) r.body.push_back({l, false});
  for (const auto& l : rule.negative) r.body.push_back({l, true});
  return to_string(r);
}

std::string to_string(const GroundProgram& program) {
  std::string out;
  for (const GroundRule& r : program.rules) {
    out += to_string(r);
    out.push_back('\n');
  }
  return out;
}

bool Interpretation::consistent() const {
  for (const ClassicalLiteral& l : literals) {
    if (!l.negated && literals.contains(l.complement())) return false;
  }
  return true;
}

bool AnswerSet::contains(const ClassicalLiteral& l) const {
  return std::find(literals.begin(), literals.end(), l) != literals.end();
}

Interpretation AnswerSet::interpretation() const {
  return Interpretation{{literals.begin(), literals.end()}};
}

std::string to_string(const AnswerSet& answer_set) {
  std::string out = "{";
  for (std::size_t i = 0; i < answer_set.literals.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(answer_set.literals[i]);
  }
  out.push_back('}');
  return out;
}

SolverOptions& default_solver_options() {
  static SolverOptions options;
  return options;
}

GroundProgram reduct(const GroundProgram& program, const Interpretation& i) {
  GroundProgram out;
  for (const GroundRule& r : program.rules) {
    bool blocked = std::any_of(r.negative.begin(), r.negative.end(),
                               [&](const ClassicalLiteral& l) { return i.contains(l); });
    if (!blocked) out.rules.push_back({r.head, r.positive, {}});
  }
  return out;
}

bool is_model(const GroundProgram& program, const Interpretation& i) {
  for (const GroundRule& r : program.rules) {
    bool body = std::all_of(r.positive.begin(), r.positive.end(),
                            [&](const ClassicalLiteral& l) { return i.contains(l); }) &&
                std::none_of(r.negative.begin(), r.negative.end(),
                             [&](const ClassicalLiteral& l) { return i.contains(l); });
    if (!body) continue;
    bool head = std::any_of(r.head.begin(), r.head.end(),
                            [&](const ClassicalLiteral& l) { return i.contains(l); });
    if (!head) return false;
  }
  return true;
}

std::vector<AnswerSet> canonicalize(std::vector<Interpretation> sets) {
  struct Keyed {
    std::vector<std::string> key;
    std::vector<ClassicalLiteral> literals;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(sets.size());
  for (Interpretation& s : sets) {
    std::vector<std::pair<std::string, ClassicalLiteral>> lits;
    for (const ClassicalLiteral& l : s.literals) lits.emplace_back(to_string(l), l);
    std::sort(lits.begin(), lits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Keyed k;
    for (auto& [text, lit] : lits) {
      k.key.push_back(std::move(text));
      k.literals.push_back(std::move(lit));
    }
    keyed.push_back(std::move(k));
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const Keyed& a, const Keyed& b) { return a.key == b.key; }),
              keyed.end());
  std::vector<AnswerSet> out;
  out.reserve(keyed.size());
  for (Keyed& k : keyed) out.push_back({std::move(k.literals), out.size()});
  return out;
}

namespace {

constexpr std::int8_t kUnknown = -1;
constexpr std::int8_t kFalse = 0;
constexpr std::int8_t kTrue = 1;

struct IndexedRule {
  std::vector<int> head;
  std::vector<int> pos;
  std::vector<int> neg;
};

// Ground program over integer atoms, plus the reasoning needed for enumeration.
class Search {
 public:
  explicit Search(const GroundProgram& program, const SolverOptions& options) {
    auto index = [&](const ClassicalLiteral& l) {
      auto [it, fresh] = ids_.try_emplace(l, static_cast<int>(atoms_.size()));
      if (fresh) atoms_.push_back(l);
      return it->second;
    };
    for (const GroundRule& r : program.rules) {
      IndexedRule ir;
      for (const auto& l : r.head) ir.head.push_back(index(l));
      for (const auto& l : r.positive) ir.pos.push_back(index(l));
      for (const auto& l : r.negative) ir.neg.push_back(index(l));
      dedup(ir.head);
      dedup(ir.pos);
      dedup(ir.neg);
      rules_.push_back(std::move(ir));
    }
    if (atoms_.size() > options.max_atoms) {
      throw ResourceError("ground program has " + std::to_string(atoms_.size()) +
                          " atoms, more than the limit of " + std::to_string(options.max_atoms));
    }
    // p and -p exclude each other.
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      if (atoms_[a].negated) continue;
      if (auto it = ids_.find(atoms_[a].complement()); it != ids_.end()) {
        rules_.push_back({{}, {static_cast<int>(a), it->second}, {}});
      }
    }
    head_occ_.resize(atoms_.size());
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      for (int h : rules_[r].head) head_occ_[h].push_back(r);
    }
  }

  std::vector<Interpretation> run() {
    std::vector<std::int8_t> vals(atoms_.size(), kUnknown);
    enumerate(vals);
    return std::move(found_);
  }

 private:
  static void dedup(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  static bool set(std::vector<std::int8_t>& vals, int atom, std::int8_t value, bool& changed) {
    if (vals[atom] == kUnknown) {
      vals[atom] = value;
      changed = true;
      return true;
    }
    return vals[atom] == value;
  }

  // Unit propagation over rules as clauses, plus support: a true atom needs a rule whose body
  // holds and whose other head atoms are false. Returns false on conflict.
  bool propagate(std::vector<std::int8_t>& vals) const {
    for (bool changed = true; changed;) {
      changed = false;
      for (const IndexedRule& r : rules_) {
        bool body_false = false;
        int open_body = 0;
        int last_body = 0;  // +(a+1) positive, -(a+1) negative
        for (int a : r.pos) {
          if (vals[a] == kFalse) body_false = true;
          if (vals[a] == kUnknown) ++open_body, last_body = a + 1;
        }
        for (int a : r.neg) {
          if (vals[a] == kTrue) body_false = true;
          if (vals[a] == kUnknown) ++open_body, last_body = -(a + 1);
        }
        if (body_false) continue;
        bool head_true = false;
        int open_head = 0;
        int last_head = -1;
        for (int h : r.head) {
          if (vals[h] == kTrue) head_true = true;
          if (vals[h] == kUnknown) ++open_head, last_head = h;
        }
        if (head_true) continue;
        if (open_body == 0) {
          if (open_head == 0) return false;
          if (open_head == 1) set(vals, last_head, kTrue, changed);
        } else if (open_head == 0 && open_body == 1) {
          if (last_body > 0) {
            set(vals, last_body - 1, kFalse, changed);
          } else {
            set(vals, -last_body - 1, kTrue, changed);
          }
        }
      }
      for (std::size_t a = 0; a < atoms_.size(); ++a) {
        if (vals[a] == kFalse) continue;
        std::size_t supporters = 0;
        std::size_t support = 0;
        for (std::size_t r : head_occ_[a]) {
          if (can_support(rules_[r], static_cast<int>(a), vals)) {
            ++supporters;
            support = r;
          }
        }
        if (supporters == 0) {
          if (vals[a] == kTrue) return false;
          vals[a] = kFalse;
          changed = true;
        } else if (supporters == 1 && vals[a] == kTrue) {
          const IndexedRule& r = rules_[support];
          for (int p : r.pos)
            if (!set(vals, p, kTrue, changed)) return false;
          for (int n : r.neg)
            if (!set(vals, n, kFalse, changed)) return false;
          for (int h : r.head)
            if (h != static_cast<int>(a) && !set(vals, h, kFalse, changed)) return false;
        }
      }
    }
    return true;
  }

  static bool can_support(const IndexedRule& r, int atom, const std::vector<std::int8_t>& vals) {
    for (int p : r.pos)
      if (vals[p] == kFalse) return false;
    for (int n : r.neg)
      if (vals[n] == kTrue) return false;
    for (int h : r.head)
      if (h != atom && vals[h] == kTrue) return false;
    return true;
  }

  void enumerate(std::vector<std::int8_t>& vals) {
    if (!propagate(vals)) return;
    auto open = std::find(vals.begin(), vals.end(), kUnknown);
    if (open == vals.end()) {
      if (minimal(vals)) {
        Interpretation i;
        for (std::size_t a = 0; a < atoms_.size(); ++a)
          if (vals[a] == kTrue) i.literals.insert(atoms_[a]);
        found_.push_back(std::move(i));
      }
      return;
    }
    auto at = open - vals.begin();
    for (std::int8_t choice : {kFalse, kTrue}) {
      std::vector<std::int8_t> branch = vals;
      branch[at] = choice;
      enumerate(branch);
    }
  }

  // Is the total assignment `vals` a subset-minimal model of its own reduct?
  bool minimal(const std::vector<std::int8_t>& vals) const {
    // Reduct rules whose positive body lies inside the candidate; each is a clause over the
    // candidate's atoms.
    std::vector<const IndexedRule*> relevant;
    for (const IndexedRule& r : rules_) {
      bool keep = std::none_of(r.neg.begin(), r.neg.end(), [&](int n) { return vals[n] == kTrue; }) &&
                  std::all_of(r.pos.begin(), r.pos.end(), [&](int p) { return vals[p] == kTrue; });
      if (keep) relevant.push_back(&r);
    }
    // Atoms every sub-model must keep: single in-candidate head with a forced body.
    std::vector<std::int8_t> forced(atoms_.size(), kFalse);
    for (bool changed = true; changed;) {
      changed = false;
      for (const IndexedRule* r : relevant) {
        if (!std::all_of(r->pos.begin(), r->pos.end(), [&](int p) { return forced[p] == kTrue; }))
          continue;
        int in_candidate = 0;
        int only = -1;
        for (int h : r->head)
          if (vals[h] == kTrue) ++in_candidate, only = h;
        if (in_candidate == 1 && forced[only] != kTrue) {
          forced[only] = kTrue;
          changed = true;
        }
      }
    }
    std::vector<int> free;
    for (std::size_t a = 0; a < atoms_.size(); ++a)
      if (vals[a] == kTrue && forced[a] != kTrue) free.push_back(static_cast<int>(a));
    if (free.empty()) return true;

    // A proper sub-model exists iff some free atom can be dropped.
    for (int drop : free) {
      std::vector<std::int8_t> sub(atoms_.size(), kFalse);
      for (std::size_t a = 0; a < atoms_.size(); ++a)
        if (forced[a] == kTrue) sub[a] = kTrue;
      for (int f : free) sub[f] = kUnknown;
      sub[drop] = kFalse;
      if (satisfiable(relevant, sub)) return false;
    }
    return true;
  }

  static bool satisfiable(const std::vector<const IndexedRule*>& clauses, std::vector<std::int8_t>& sub) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const IndexedRule* r : clauses) {
        bool satisfied = false;
        int open = 0;
        int last = 0;
        for (int h : r->head) {
          if (sub[h] == kTrue) satisfied = true;
          if (sub[h] == kUnknown) ++open, last = h + 1;
        }
        for (int p : r->pos) {
          if (sub[p] == kFalse) satisfied = true;
          if (sub[p] == kUnknown) ++open, last = -(p + 1);
        }
        if (satisfied) continue;
        if (open == 0) return false;
        if (open == 1) {
          if (last > 0) {
            sub[last - 1] = kTrue;
          } else {
            sub[-last - 1] = kFalse;
          }
          changed = true;
        }
      }
    }
    auto open = std::find(sub.begin(), sub.end(), kUnknown);
    if (open == sub.end()) return true;
    auto at = open - sub.begin();
    for (std::int8_t choice : {kFalse, kTrue}) {
      std::vector<std::int8_t> branch = sub;
      branch[at] = choice;
      if (satisfiable(clauses, branch)) return true;
    }
    return false;
  }

  std::map<ClassicalLiteral, int> ids_;
  std::vector<ClassicalLiteral> atoms_;
  std::vector<IndexedRule> rules_;
  std::vector<std::vector<std::size_t>> head_occ_;
  std::vector<Interpretation> found_;
};

}  // namespace

std::vector<AnswerSet> answer_sets(const GroundProgram& program, const SolverOptions& options) {
  std::vector<AnswerSet> result = canonicalize(Search(program, options).run());
  if (options.self_check) {
    if (std::string problem = verify_answer_sets(program, result); !problem.empty()) {
      throw std::logic_error("answer set self-check failed: " + problem);
    }
  }
  return result;
}

namespace {

// Independent minimality test: least fixpoint of the single-head part of the reduct, then
// brute force over what remains.
bool verify_minimal(const GroundProgram& program, const Interpretation& s) {
  GroundProgram red = reduct(program, s);
  std::set<ClassicalLiteral> least;
  for (bool changed = true; changed;) {
    changed = false;
    for (const GroundRule& r : red.rules) {
      bool body = std::all_of(r.positive.begin(), r.positive.end(),
                              [&](const ClassicalLiteral& l) { return least.contains(l); });
      if (!body) continue;
      std::vector<ClassicalLiteral> in_s;
      for (const auto& h : r.head)
        if (s.contains(h)) in_s.push_back(h);
      if (in_s.size() == 1 && least.insert(in_s.front()).second) changed = true;
    }
  }
  std::vector<ClassicalLiteral> rest;
  for (const auto& l : s.literals)
    if (!least.contains(l)) rest.push_back(l);
  if (rest.empty()) return true;
  if (rest.size() > 20) throw std::logic_error("answer set too large to verify minimality");
  const std::uint64_t full = (std::uint64_t{1} << rest.size()) - 1;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    Interpretation sub{least};
    for (std::size_t b = 0; b < rest.size(); ++b)
      if (mask >> b & 1U) sub.literals.insert(rest[b]);
    if (is_model(red, sub)) return false;
  }
  return true;
}

bool subset_of(const AnswerSet& a, const AnswerSet& b) {
  return std::all_of(a.literals.begin(), a.literals.end(),
                     [&](const ClassicalLiteral& l) { return b.contains(l); });
}

}  // namespace

std::string verify_answer_sets(const GroundProgram& program, const std::vector<AnswerSet>& sets) {
  for (const AnswerSet& a : sets) {
    Interpretation s = a.interpretation();
    if (!s.consistent()) return to_string(a) + " is inconsistent";
    if (!is_model(reduct(program, s), s)) return to_string(a) + " is not a model of its reduct";
    if (!verify_minimal(program, s)) return to_string(a) + " is not minimal";
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (i != j && subset_of(sets[i], sets[j]) && sets[i].literals.size() < sets[j].literals.size()) {
        return to_string(sets[i]) + " is a proper subset of " + to_string(sets[j]);
      }
    }
  }
  return {};
}

}  // namespace nestasp
