#pragma once

#include <string>
#include <string_view>

#include "nestasp/ast.hpp"

namespace nestasp {

/// Syntax, safety or string-escape error. Line and column are 1-based and count code points.
class ParseError : public Error {
 public:
  enum class Kind { syntax, safety, escape };

  ParseError(Kind kind, int line, int column, std::string message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  /// The message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string detail_;
};

/// Parses a DLV-style HEX-lite program.
///
/// Rules read `head :- body.`; `|`, `v` and `∨` separate head disjuncts, `-p` is strong
/// negation, `not` is negation as failure and `&g[in...](out...)` an external atom. `←` is
/// accepted in place of `:-`, and `%` starts a comment. Every returned rule is safe.
Program parse_program(std::string_view text);

/// Parses the unescaped payload of a string constant. Same grammar as parse_program; error
/// positions refer to the payload itself.
Program parse_embedded(std::string_view payload);

/// Resolves the backslash escapes of a string constant body (without the quotes).
/// Throws ParseError(escape) with a 1-based column inside `body` on an invalid escape.
std::string unescape_string(std::string_view body);

}  // namespace nestasp
