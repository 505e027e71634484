#ifndef STREAMON_LEXER_HPP
#define STREAMON_LEXER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "streamon/diagnostics.hpp"

namespace streamon {

enum class TokenKind {
  Ident,
  Int,        // digit sequence
  Float,      // digits '.' digits
  Duration,   // number immediately followed by a unit (Hz, s, ms, min)
  String,     // double-quoted, {{}} normalized to {}
  LParen, RParen, Comma, Colon, Dot, At, Assign,  // ( ) , : . @ :=
  Plus, Minus, Star, Slash, Percent, StarStar,
  AmpAmp, PipePipe, Bang,
  Lt, Le, Gt, Ge, Eq, EqEq, Ne,
  End,
};

struct Token {
  TokenKind kind;
  SourceSpan span;
  std::string text;        // identifier name or string content
  uint64_t int_value = 0;
  double float_value = 0.0;
  // Duration tokens: exact value as mantissa/10^frac_digits plus the unit.
  uint64_t mantissa = 0;
  int frac_digits = 0;
  std::string unit;
};

// Tokenizes the whole input. Lexical problems are reported as diagnostics;
// the token list is still returned so the parser can recover spans.
std::vector<Token> tokenize(const std::string& source, DiagnosticList& diags);

}  // namespace streamon

#endif
