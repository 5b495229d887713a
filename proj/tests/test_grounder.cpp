#include <doctest.h>

#include <random>

#include "nestasp/grounder.hpp"
#include "nestasp/nested.hpp"
#include "nestasp/parser.hpp"
#include "oracles.hpp"

using namespace nestasp;

namespace {

EvalContext corpus_context() {
  EvalContext c;
  c.base_dir = NESTASP_CORPUS_DIR;
  return c;
}

std::vector<std::string> rule_texts(const GroundProgram& g) {
  std::vector<std::string> out;
  for (const auto& r : g.rules) out.push_back(to_string(r));
  return out;
}

// Random safe program over p/1, q/1, r/2 and constants a, b, c.
std::string random_safe_program(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const char* consts[] = {"a", "b", "c"};
  auto term = [&](bool var) { return var ? std::string(pick(0, 1) ? "X" : "Y") : std::string(consts[pick(0, 2)]); };
  auto atom = [&](bool vars) {
    switch (pick(0, 2)) {
      case 0: return "p(" + term(vars && pick(0, 1)) + ")";
      case 1: return "q(" + term(vars && pick(0, 1)) + ")";
      default: return "r(" + term(vars && pick(0, 1)) + "," + term(vars && pick(0, 1)) + ")";
    }
  };
  std::string text;
  for (int i = pick(1, 4); i > 0; --i) text += atom(false) + ".\n";
  for (int i = pick(1, 5); i > 0; --i) {
    // Bind both variables positively so every rule is safe.
    std::string body = "r(X,Y)";
    for (int j = pick(0, 2); j > 0; --j) body += std::string(", ") + (pick(0, 2) == 0 ? "not " : "") + atom(true);
    std::string head = pick(0, 5) == 0 ? "" : atom(true);
    if (!head.empty() && pick(0, 3) == 0) head += " | " + atom(true);
    text += head + " :- " + body + ".\n";
  }
  return text;
}

// Textbook instantiation: every rule under every substitution over the constants, restricted
// to instances whose positive body is derivable; naf literals on underivable atoms removed.
GroundProgram herbrand_instantiation(const Program& p) {
  const Term consts[] = {Term::constant("a"), Term::constant("b"), Term::constant("c")};
  auto subst = [](ClassicalLiteral l, const Term& x, const Term& y) {
    for (Term& t : l.atom.args)
      if (t.is_variable()) t = t.text() == "X" ? x : y;
    return l;
  };
  std::vector<GroundRule> all;
  for (const Rule& r : p.rules)
    for (const Term& x : consts)
      for (const Term& y : consts) {
        GroundRule g;
        for (const auto& h : r.head) g.head.push_back(subst(h, x, y));
        for (const auto& e : r.body) (e.naf ? g.negative : g.positive).push_back(subst(*e.literal(), x, y));
        all.push_back(std::move(g));
      }
  std::set<ClassicalLiteral> derivable;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& g : all) {
      if (!std::all_of(g.positive.begin(), g.positive.end(), [&](const auto& l) { return derivable.contains(l); }))
        continue;
      for (const auto& h : g.head) grew |= derivable.insert(h).second;
    }
  }
  std::set<GroundRule> kept;
  for (GroundRule g : all) {
    if (!std::all_of(g.positive.begin(), g.positive.end(), [&](const auto& l) { return derivable.contains(l); }))
      continue;
    std::erase_if(g.negative, [&](const auto& l) { return !derivable.contains(l); });
    kept.insert(std::move(g));
  }
  return GroundProgram{{kept.begin(), kept.end()}};
}

}  // namespace

TEST_CASE("example 2 stratifies into two layers") {
  Session s;
  Stratification st =
      stratify(parse_program("p1(x,y). p2(a). p2(b). handle(H) :- &callhexfile[\"sub.hex\", p1, p2](H)."), s.env());
  REQUIRE(st.strata.size() == 2);
  CHECK(st.strata[0] == std::vector<std::string>{"p1", "p2"});
  CHECK(st.strata[1] == std::vector<std::string>{"handle"});
}

TEST_CASE("plain programs have one stratum") {
  Session s;
  CHECK(stratify(parse_program("a. b :- a."), s.env()).strata.size() == 1);
  CHECK(stratify(parse_program("a :- not b. b :- not a."), s.env()).strata.size() == 1);
  CHECK(stratify(Program{}, s.env()).strata.empty());
}

TEST_CASE("recursion through an external atom") {
  Session s;
  CHECK_THROWS_AS(stratify(parse_program("p(X) :- &callhex[\"q.\", p](X)."), s.env()), CycleError);
  CHECK_THROWS_AS(stratify(parse_program("p(X) :- &callhex[\"q.\", r](X). r(X) :- p(X)."), s.env()), CycleError);
}

TEST_CASE("negation cycle next to an external atom") {
  Session s;
  CHECK_THROWS_AS(stratify(parse_program("a :- not b. b :- not a. c(H) :- a, &callhex[\"x.\"](H)."), s.env()),
                  CycleError);
  // The same cycle below the call is fine.
  Stratification st = stratify(parse_program("a :- not b. b :- not a. c(H) :- &callhex[\"x.\", a](H)."), s.env());
  CHECK(st.strata.size() == 2);
}

TEST_CASE("constraints sit above the inputs of their external atoms") {
  Session s;
  Stratification st = stratify(parse_program("p(a). :- &callhex[\"x.\", p](H), H > 3."), s.env());
  REQUIRE(st.rules.size() == 2);
  CHECK(st.rules[1] == std::vector<std::size_t>{1});
}

TEST_CASE("example 2 grounds the handle rule with H = 0") {
  Session s;
  GroundProgram g = ground(parse_program("p1(x,y). p2(a). p2(b). handle(H) :- &callhexfile[\"sub.hex\", p1, p2](H)."),
                           s.env(), corpus_context());
  std::vector<GroundRule> handle_rules;
  for (const auto& r : g.rules)
    if (!r.head.empty() && r.head[0].predicate() == "handle") handle_rules.push_back(r);
  REQUIRE(handle_rules.size() == 1);
  CHECK(to_string(handle_rules[0].head[0]) == "handle(0)");
}

TEST_CASE("simple instantiation") {
  OracleEnv env = with_builtins(OracleEnv());
  CHECK(rule_texts(ground(parse_program("p(1). q(X) :- p(X)."), env)) ==
        std::vector<std::string>{"p(1).", "q(1) :- p(1)."});
}

TEST_CASE("counting rule instances") {
  OracleEnv env = with_builtins(OracleEnv());
  GroundProgram g = ground(parse_program("as(0). as(1). as(2). number(D) :- as(C), D = C + 1, not as(D)."), env);
  std::set<std::string> heads;
  for (const auto& r : g.rules)
    if (!r.head.empty() && r.head[0].predicate() == "number") heads.insert(to_string(r.head[0]));
  CHECK(heads == std::set<std::string>{"number(1)", "number(2)", "number(3)"});
}

TEST_CASE("external atoms become auxiliary facts") {
  Session s;
  GroundProgram g = ground(parse_program("r(H) :- &callhex[\"a.\"](H)."), s.env());
  CHECK(rule_texts(g) == std::vector<std::string>{"&aux_callhex_0(\"a.\",0).", "r(0) :- &aux_callhex_0(\"a.\",0)."});
  auto answers = evaluate_program(parse_program("r(H) :- &callhex[\"a.\"](H)."), s.env());
  REQUIRE(answers.size() == 1);
  CHECK(to_string(answers[0]) == "{r(0)}");
}

TEST_CASE("grounding errors") {
  Session s;
  CHECK_THROWS_AS(ground(parse_program("a. b :- not &callhex[\"x.\"](0)."), s.env()), GroundingError);
  CHECK_THROWS_AS(ground(parse_program("a | b. c(H) :- &callhex[\"x.\", a](H)."), s.env()), GroundingError);
  CHECK_THROWS_AS(ground(parse_program("h(H) :- &callhex[\"x.\", P](H), q(P). q(a)."), s.env()), GroundingError);
}

TEST_CASE("grounding is deterministic") {
  Session s;
  const char* text = "p1(x,y). p2(a). p2(b). handle(H) :- &callhexfile[\"sub.hex\", p1, p2](H). "
                     "q(X) :- p2(X), not p1(X,X).";
  GroundProgram first = ground(parse_program(text), s.env(), corpus_context());
  for (int i = 0; i < 3; ++i) CHECK(ground(parse_program(text), s.env(), corpus_context()) == first);
}

TEST_CASE("matches full instantiation on external-free programs") {
  std::mt19937 rng(99);
  OracleEnv env = with_builtins(OracleEnv());
  for (int n = 0; n < 300; ++n) {
    std::string text = random_safe_program(rng);
    CAPTURE(text);
    Program p = parse_program(text);
    GroundProgram ours = ground(p, env);
    std::set<GroundRule> ours_set(ours.rules.begin(), ours.rules.end());
    CHECK(ours_set.size() == ours.rules.size());
    GroundProgram reference = herbrand_instantiation(p);
    CHECK(ours_set == std::set<GroundRule>(reference.rules.begin(), reference.rules.end()));
    CHECK(testing::as_sets(answer_sets(ours)) == testing::naive_answer_sets(reference));
  }
}

TEST_CASE("multi-model lower strata branch") {
  Session s;
  Program p = parse_program("sel(a) | sel(b). r(H) :- &callhex[\"y :- sel(a).\", sel](H).");
  auto branches = ground_branches(p, s.env());
  CHECK(branches.size() == 2);
  auto answers = evaluate_program(p, s.env());
  std::vector<std::string> shown;
  for (const auto& a : answers) shown.push_back(to_string(a));
  CHECK(shown == std::vector<std::string>{"{r(0), sel(a)}", "{r(1), sel(b)}"});
  // Each host answer set extends exactly one lower answer set.
  auto lower = evaluate_program(parse_program("sel(a) | sel(b)."), s.env());
  for (const auto& a : answers) {
    int extended = 0;
    for (const auto& l : lower)
      if (std::includes(a.literals.begin(), a.literals.end(), l.literals.begin(), l.literals.end(), canonical_less))
        ++extended;
    CHECK(extended == 1);
  }
  CHECK(s.cache().evaluations() == 2);
}

TEST_CASE("auxiliary predicate names") {
  CHECK(is_auxiliary(ClassicalLiteral{{"&aux_callhex_0", {}}, false}));
  CHECK_FALSE(is_auxiliary(ClassicalLiteral{{"aux", {}}, false}));
}
