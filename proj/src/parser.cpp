#include "nestasp/parser.hpp"

#include <charconv>
#include <map>
#include <vector>

namespace nestasp {

ParseError::ParseError(Kind kind, int line, int column, std::string message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(std::move(message)) {}

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

struct Position {
  int line = 1;
  int column = 1;
};

// Advances a position over `text`, counting code points.
Position advance(Position pos, std::string_view text) {
  for (unsigned char c : text) {
    if (c == '\n') {
      ++pos.line;
      pos.column = 1;
    } else if (!is_continuation(c)) {
      ++pos.column;
    }
  }
  return pos;
}

}  // namespace

std::string unescape_string(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    auto at = [&] { return advance({}, body.substr(0, i)); };
    if (i + 1 == body.size()) {
      throw ParseError(ParseError::Kind::escape, at().line, at().column, "dangling backslash in string");
    }
    switch (body[++i]) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      default:
        --i;
        throw ParseError(ParseError::Kind::escape, at().line, at().column,
                         std::string("invalid escape sequence \\") + body[i + 1]);
    }
  }
  return out;
}

namespace {

enum class Tok {
  end, ident, variable, number, string,
  if_,        // ":-" or "←"
  bar,        // "|" or "∨"
  comma, dot, lparen, rparen, lbracket, rbracket, amp, minus, plus,
  eq, ne, lt, le, gt, ge,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier / variable / unescaped string / number digits
  Position pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = pos_;
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(Position at, const std::string& msg) const {
    throw ParseError(ParseError::Kind::syntax, at.line, at.column, msg);
  }

  void bump(std::size_t n) {
    pos_ = advance(pos_, src_.substr(i_, n));
    i_ += n;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump(1);
      } else if (c == '%') {
        std::size_t nl = src_.find('\n', i_);
        bump((nl == std::string_view::npos ? src_.size() : nl) - i_);
      } else {
        return;
      }
    }
  }

  bool starts_with(std::string_view s) const { return src_.substr(i_).starts_with(s); }

  static bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }

  void lex_one(Token& t) {
    char c = src_[i_];
    if (starts_with(":-")) return sym(t, Tok::if_, 2);
    if (starts_with("\xE2\x86\x90")) return sym(t, Tok::if_, 3);  // ←
    if (starts_with("\xE2\x88\xA8")) return sym(t, Tok::bar, 3);  // ∨
    if (starts_with("!=")) return sym(t, Tok::ne, 2);
    if (starts_with("<=")) return sym(t, Tok::le, 2);
    if (starts_with(">=")) return sym(t, Tok::ge, 2);
    switch (c) {
      case '|': return sym(t, Tok::bar, 1);
      case ',': return sym(t, Tok::comma, 1);
      case '.': return sym(t, Tok::dot, 1);
      case '(': return sym(t, Tok::lparen, 1);
      case ')': return sym(t, Tok::rparen, 1);
      case '[': return sym(t, Tok::lbracket, 1);
      case ']': return sym(t, Tok::rbracket, 1);
      case '&': return sym(t, Tok::amp, 1);
      case '-': return sym(t, Tok::minus, 1);
      case '+': return sym(t, Tok::plus, 1);
      case '=': return sym(t, Tok::eq, 1);
      case '<': return sym(t, Tok::lt, 1);
      case '>': return sym(t, Tok::gt, 1);
      case '"': return string(t);
      default: break;
    }
    if (c >= '0' && c <= '9') {
      std::size_t j = i_;
      while (j < src_.size() && src_[j] >= '0' && src_[j] <= '9') ++j;
      t.kind = Tok::number;
      t.text = std::string(src_.substr(i_, j - i_));
      return bump(j - i_);
    }
    if (ident_char(c)) {
      std::size_t j = i_;
      while (j < src_.size() && ident_char(src_[j])) ++j;
      t.text = std::string(src_.substr(i_, j - i_));
      if (t.text == "_") fail(pos_, "anonymous variables are not supported");
      t.kind = (c >= 'a' && c <= 'z') ? Tok::ident : Tok::variable;
      return bump(j - i_);
    }
    fail(pos_, "unexpected character");
  }

  void sym(Token& t, Tok kind, std::size_t n) {
    t.kind = kind;
    t.text = std::string(src_.substr(i_, n));
    bump(n);
  }

  void string(Token& t) {
    std::size_t j = i_ + 1;
    while (j < src_.size() && src_[j] != '"') j += src_[j] == '\\' ? 2 : 1;
    if (j >= src_.size()) fail(pos_, "unterminated string constant");
    std::string_view body = src_.substr(i_ + 1, j - i_ - 1);
    try {
      t.text = unescape_string(body);
    } catch (const ParseError& e) {
      // Re-anchor the position from the string body to the whole input.
      Position body_start = advance(pos_, "\"");
      Position at = e.line() == 1
                        ? Position{body_start.line, body_start.column + e.column() - 1}
                        : Position{body_start.line + e.line() - 1, e.column()};
      throw ParseError(ParseError::Kind::escape, at.line, at.column, e.detail());
    }
    t.kind = Tok::string;
    bump(j + 1 - i_);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Position pos_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::end) p.rules.push_back(rule());
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(i_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(ParseError::Kind::syntax, at.pos.line, at.pos.column, msg);
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return next();
  }

  static bool literal_start(const Token& t) { return t.kind == Tok::ident || t.kind == Tok::minus; }

  // `v` separates head disjuncts when a literal follows it.
  bool at_head_separator() const {
    if (peek().kind == Tok::bar) return true;
    return peek().kind == Tok::ident && peek().text == "v" && literal_start(peek(1));
  }

  static bool is_compare(Tok k) {
    return k == Tok::eq || k == Tok::ne || k == Tok::lt || k == Tok::le || k == Tok::gt ||
           k == Tok::ge;
  }

  static CompareOp compare_op(Tok k) {
    switch (k) {
      case Tok::ne: return CompareOp::ne;
      case Tok::lt: return CompareOp::lt;
      case Tok::le: return CompareOp::le;
      case Tok::gt: return CompareOp::gt;
      case Tok::ge: return CompareOp::ge;
      default: return CompareOp::eq;
    }
  }

  Rule rule() {
    var_pos_.clear();
    Rule r;
    const Token& start = peek();
    if (start.kind == Tok::dot) fail(start, "empty rule");
    if (start.kind != Tok::if_) {
      r.head.push_back(classical_literal());
      while (at_head_separator()) {
        next();
        r.head.push_back(classical_literal());
      }
    }
    if (accept(Tok::if_)) {
      if (peek().kind != Tok::dot) {
        r.body.push_back(body_element());
        while (accept(Tok::comma)) r.body.push_back(body_element());
      }
    }
    expect(Tok::dot, "'.' at end of rule");
    if (auto bad = check_safety(r)) {
      Position at = var_pos_.count(*bad) ? var_pos_[*bad] : start.pos;
      throw ParseError(ParseError::Kind::safety, at.line, at.column, "unsafe variable " + *bad);
    }
    return r;
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::ident: next(); return Term::constant(t.text);
      case Tok::string: next(); return Term::string(t.text);
      case Tok::variable:
        next();
        var_pos_.try_emplace(t.text, t.pos);
        return Term::variable(t.text);
      case Tok::number: next(); return Term::integer(number(t, false));
      case Tok::minus:
        if (peek(1).kind == Tok::number) {
          next();
          const Token& n = next();
          return Term::integer(number(n, true));
        }
        break;
      default: break;
    }
    fail(t, "expected a term");
  }

  std::int64_t number(const Token& t, bool negative) const {
    std::string digits = negative ? "-" + t.text : t.text;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) fail(t, "integer out of range");
    return v;
  }

  Tuple term_list(Tok close) {
    Tuple terms;
    if (peek().kind == close) return terms;
    terms.push_back(term());
    while (accept(Tok::comma)) terms.push_back(term());
    return terms;
  }

  ClassicalLiteral classical_literal() {
    ClassicalLiteral lit;
    lit.negated = accept(Tok::minus);
    const Token& name = peek();
    if (name.kind != Tok::ident) fail(name, "expected a predicate name");
    if (name.text == "not") fail(name, "'not' is not allowed here");
    next();
    lit.atom.predicate = name.text;
    if (accept(Tok::lparen)) {
      lit.atom.args = term_list(Tok::rparen);
      if (lit.atom.args.empty()) fail(peek(), "expected a term");
      expect(Tok::rparen, "')'");
    }
    return lit;
  }

  BodyElement body_element() {
    BodyElement e;
    if (peek().kind == Tok::ident && peek().text == "not") {
      const Token& after = peek(1);
      if (after.kind != Tok::lparen && after.kind != Tok::comma && after.kind != Tok::dot &&
          !is_compare(after.kind)) {
        next();
        e.naf = true;
      }
    }
    const Token& t = peek();
    if (t.kind == Tok::amp) {
      e.payload = external_atom();
      return e;
    }
    bool literal_form = t.kind == Tok::ident || (t.kind == Tok::minus && peek(1).kind == Tok::ident);
    if (literal_form) {
      ClassicalLiteral lit = classical_literal();
      if (!is_compare(peek().kind)) {
        e.payload = std::move(lit);
        return e;
      }
      if (lit.negated || !lit.atom.args.empty()) fail(peek(), "unexpected comparison");
      e.payload = builtin(Term::constant(lit.atom.predicate));
      return e;
    }
    Term lhs = term();
    e.payload = builtin(std::move(lhs));
    return e;
  }

  BuiltinAtom builtin(Term lhs) {
    BuiltinAtom b;
    b.lhs = std::move(lhs);
    const Token& op = peek();
    if (!is_compare(op.kind)) fail(op, "expected a comparison operator");
    next();
    b.op = compare_op(op.kind);
    b.rhs = term();
    if (peek().kind == Tok::plus) {
      if (b.op != CompareOp::eq) fail(peek(), "'+' is only allowed on the right of '='");
      next();
      b.addend = term();
    }
    return b;
  }

  ExternalAtom external_atom() {
    expect(Tok::amp, "'&'");
    ExternalAtom ext;
    ext.name = expect(Tok::ident, "an external predicate name").text;
    if (accept(Tok::lbracket)) {
      ext.inputs = term_list(Tok::rbracket);
      expect(Tok::rbracket, "']'");
    }
    expect(Tok::lparen, "'('");
    ext.outputs = term_list(Tok::rparen);
    expect(Tok::rparen, "')'");
    return ext;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::map<std::string, Position> var_pos_;
};

}  // namespace

Program parse_program(std::string_view text) {
  return Parser(Lexer(text).run()).program();
}

Program parse_embedded(std::string_view payload) { return parse_program(payload); }

}  // namespace nestasp
