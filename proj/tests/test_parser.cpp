#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nestasp/parser.hpp"
#include "oracles.hpp"

using namespace nestasp;

namespace {

ParseError parse_error(std::string_view text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for: " << text);
  return ParseError(ParseError::Kind::syntax, 0, 0, "");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("example 2 host program") {
  Program p = parse_program("p1(x,y). p2(a). p2(b). handle(H) :- &callhexfile[\"sub.hex\", p1, p2](H).");
  REQUIRE(p.rules.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(p.rules[i].is_fact());
  const Rule& r = p.rules[3];
  REQUIRE(r.body.size() == 1);
  const ExternalAtom* e = r.body[0].external();
  REQUIRE(e);
  CHECK(e->name == "callhexfile");
  CHECK(e->inputs == Tuple{Term::string("sub.hex"), Term::constant("p1"), Term::constant("p2")});
  CHECK(e->outputs == Tuple{Term::variable("H")});
}

TEST_CASE("empty input") {
  CHECK(parse_program("").rules.empty());
  CHECK(parse_program("  % only a comment\n").rules.empty());
}

TEST_CASE("embedded payload of a string input") {
  Program p = parse_program(R"(h3(H) :- &callhex["a :- . b :- ."](H).)");
  const ExternalAtom* e = p.rules[0].body[0].external();
  REQUIRE(e);
  REQUIRE(e->inputs.size() == 1);
  CHECK(e->inputs[0].is_string());
  CHECK(e->inputs[0].text() == "a :- . b :- .");
  CHECK(e->inputs[0].text().size() == 13);
}

TEST_CASE("string escapes agree with the reference unescape") {
  const char* bodies[] = {R"(plain)", R"(q\"uote)", R"(back\\slash)", R"(nl\n tab\t)", R"(\\\")", R"(a \"b \\\"c\\\"\")"};
  for (const char* body : bodies) {
    CAPTURE(body);
    auto expected = testing::reference_unescape(body);
    REQUIRE(expected);
    CHECK(unescape_string(body) == *expected);
    Program p = parse_program(std::string("s(\"") + body + "\").");
    CHECK(p.rules[0].head[0].atom.args[0].text() == *expected);
  }
}

TEST_CASE("random strings round-trip through escaping") {
  std::mt19937 rng(3);
  const std::string alphabet = "ab\"\\\n\t .:-";
  for (int i = 0; i < 300; ++i) {
    std::string s;
    for (int n = std::uniform_int_distribution<int>(0, 12)(rng); n > 0; --n)
      s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    std::string quoted = escape_string(s);
    std::string body = quoted.substr(1, quoted.size() - 2);
    CHECK(testing::reference_unescape(body) == s);
    CHECK(unescape_string(body) == s);
  }
}

TEST_CASE("bad escape") {
  ParseError e = parse_error("s(\"a\\qb\").");
  CHECK(e.kind() == ParseError::Kind::escape);
  CHECK(e.line() == 1);
  CHECK(e.column() == 5);
  CHECK_FALSE(testing::reference_unescape("a\\qb"));
}

TEST_CASE("syntax errors point at the offending token") {
  ParseError e = parse_error("a.\nb :- c d.");
  CHECK(e.kind() == ParseError::Kind::syntax);
  CHECK(e.line() == 2);
  CHECK(e.column() == 8);

  e = parse_error("p(X");
  CHECK(e.kind() == ParseError::Kind::syntax);

  e = parse_error("a :- _.");
  CHECK(e.kind() == ParseError::Kind::syntax);

  e = parse_error("x :- X < Y + 1, p(X), p(Y).");
  CHECK(e.kind() == ParseError::Kind::syntax);
}

TEST_CASE("columns count code points") {
  ParseError e = parse_error("a ∨ b ← c d.");
  CHECK(e.line() == 1);
  CHECK(e.column() == 11);
}

TEST_CASE("safety errors name the variable at its first occurrence") {
  ParseError e = parse_error("a.\np(X) :- not q(X).");
  CHECK(e.kind() == ParseError::Kind::safety);
  CHECK(e.line() == 2);
  CHECK(e.column() == 3);
  CHECK(e.detail().find('X') != std::string::npos);
}

TEST_CASE("embedded programs") {
  Program a = parse_embedded("a :- . b :- .");
  REQUIRE(a.rules.size() == 2);
  CHECK(a.rules[0].is_fact());
  CHECK(a.rules[1].is_fact());

  Program b = parse_embedded("a v b.");
  REQUIRE(b.rules.size() == 1);
  CHECK(b.rules[0].head.size() == 2);
  CHECK(b.rules[0].body.empty());

  CHECK(parse_embedded("node(a). node(b). edge(a, b).").rules.size() == 3);
  CHECK(parse_embedded("a ←. b ←.") == parse_embedded("a :- . b :- ."));
}

TEST_CASE("embedded errors use payload coordinates") {
  try {
    parse_embedded("a.\n  b :- .. ");
    FAIL("expected error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 9);
  }
}

TEST_CASE("v is a constant when no literal follows") {
  Program p = parse_program("p(v). v. q :- v.");
  CHECK(p.rules.size() == 3);
  CHECK(p.rules[1].head[0].predicate() == "v");
}

TEST_CASE("not is reserved") {
  ParseError e = parse_error("not.");
  CHECK(e.kind() == ParseError::Kind::syntax);
  CHECK(e.column() == 1);
}

TEST_CASE("strong negation, constraints and builtins") {
  Program p = parse_program("-p(a). :- p(a), not -p(a). c(X) :- n(X), X != 3. :- .");
  REQUIRE(p.rules.size() == 4);
  CHECK(p.rules[0].head[0].negated);
  CHECK(p.rules[1].is_constraint());
  CHECK(p.rules[1].body[1].naf);
  const BuiltinAtom* b = p.rules[2].body[1].builtin();
  REQUIRE(b);
  CHECK(b->op == CompareOp::ne);
  CHECK(p.rules[3].is_constraint());
  CHECK(p.rules[3].body.empty());
}

TEST_CASE("embedded and host grammar agree without synonyms") {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    std::string text = testing::random_subprogram(rng);
    CHECK(parse_embedded(text) == parse_program(text));
  }
}

TEST_CASE("corpus programs survive a canonical round trip") {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(NESTASP_CORPUS_DIR)) {
    if (entry.path().extension() != ".hex") continue;
    ++seen;
    CAPTURE(entry.path());
    Program p = parse_program(slurp(entry.path().string()));
    CHECK(canonical_text(parse_program(canonical_text(p))) == canonical_text(p));
  }
  CHECK(seen >= 8);
}
