#include "streamon/lexer.hpp"

#include <cctype>

namespace streamon {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> tokenize(const std::string& src, DiagnosticList& diags) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = src.size();

  auto push = [&](TokenKind k, size_t begin, size_t end) -> Token& {
    out.push_back(Token{k, {begin, end}, {}, 0, 0.0, 0, 0, {}});
    return out.back();
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    size_t begin = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(src[i])) ++i;
      Token& t = push(TokenKind::Ident, begin, i);
      t.text = src.substr(begin, i - begin);
      continue;
    }
    if (is_digit(c)) {
      while (i < n && is_digit(src[i])) ++i;
      size_t int_end = i;
      bool is_float = false;
      if (i < n && src[i] == '.' && i + 1 < n && is_digit(src[i + 1])) {
        is_float = true;
        ++i;
        while (i < n && is_digit(src[i])) ++i;
      }
      // A trailing unit makes this a duration/frequency literal: 1Hz, 5s, 10ms.
      if (i < n && is_ident_start(src[i])) {
        size_t unit_begin = i;
        while (i < n && is_ident_char(src[i])) ++i;
        std::string unit = src.substr(unit_begin, i - unit_begin);
        Token& t = push(TokenKind::Duration, begin, i);
        t.unit = unit;
        uint64_t mantissa = 0;
        int frac = 0;
        bool overflow = false;
        for (size_t k = begin; k < (is_float ? i : int_end); ++k) {
          char d = src[k];
          if (d == '.') continue;
          if (mantissa > (UINT64_MAX - 9) / 10) { overflow = true; break; }
          mantissa = mantissa * 10 + static_cast<uint64_t>(d - '0');
        }
        if (is_float) {
          size_t dot = src.find('.', begin);
          frac = static_cast<int>((unit_begin)-dot - 1);
        }
        if (overflow) diags.error("syntax", "numeric literal too large", {begin, i});
        t.mantissa = mantissa;
        t.frac_digits = frac;
        continue;
      }
      if (is_float) {
        Token& t = push(TokenKind::Float, begin, i);
        t.float_value = std::stod(src.substr(begin, i - begin));
        t.text = src.substr(begin, i - begin);
      } else {
        uint64_t v = 0;
        bool overflow = false;
        for (size_t k = begin; k < i; ++k) {
          if (v > (UINT64_MAX - 9) / 10) { overflow = true; break; }
          v = v * 10 + static_cast<uint64_t>(src[k] - '0');
        }
        if (overflow) diags.error("syntax", "integer literal too large", {begin, i});
        Token& t = push(TokenKind::Int, begin, i);
        t.int_value = v;
      }
      continue;
    }
    if (c == '"') {
      ++i;
      std::string content;
      bool closed = false;
      while (i < n) {
        if (src[i] == '"') { closed = true; ++i; break; }
        // {{}} is an escaped placeholder; normalize to {}.
        if (src.compare(i, 4, "{{}}") == 0) {
          content += "{}";
          i += 4;
          continue;
        }
        content += src[i++];
      }
      if (!closed) diags.error("syntax", "unterminated string literal", {begin, i});
      Token& t = push(TokenKind::String, begin, i);
      t.text = std::move(content);
      continue;
    }

    auto two = [&](char a, char b) { return c == a && i + 1 < n && src[i + 1] == b; };
    TokenKind kind;
    size_t len = 1;
    if (two(':', '=')) { kind = TokenKind::Assign; len = 2; }
    else if (two('*', '*')) { kind = TokenKind::StarStar; len = 2; }
    else if (two('&', '&')) { kind = TokenKind::AmpAmp; len = 2; }
    else if (two('|', '|')) { kind = TokenKind::PipePipe; len = 2; }
    else if (two('<', '=')) { kind = TokenKind::Le; len = 2; }
    else if (two('>', '=')) { kind = TokenKind::Ge; len = 2; }
    else if (two('=', '=')) { kind = TokenKind::EqEq; len = 2; }
    else if (two('!', '=')) { kind = TokenKind::Ne; len = 2; }
    else {
      switch (c) {
        case '(': kind = TokenKind::LParen; break;
        case ')': kind = TokenKind::RParen; break;
        case ',': kind = TokenKind::Comma; break;
        case ':': kind = TokenKind::Colon; break;
        case '.': kind = TokenKind::Dot; break;
        case '@': kind = TokenKind::At; break;
        case '+': kind = TokenKind::Plus; break;
        case '-': kind = TokenKind::Minus; break;
        case '*': kind = TokenKind::Star; break;
        case '/': kind = TokenKind::Slash; break;
        case '%': kind = TokenKind::Percent; break;
        case '<': kind = TokenKind::Lt; break;
        case '>': kind = TokenKind::Gt; break;
        case '=': kind = TokenKind::Eq; break;
        case '!': kind = TokenKind::Bang; break;
        default:
          diags.error("syntax", std::string("unexpected character '") + c + "'", {begin, begin + 1});
          ++i;
          continue;
      }
    }
    i += len;
    push(kind, begin, i);
  }
  push(TokenKind::End, n, n);
  return out;
}

}  // namespace streamon
