#include "streamon/parser.hpp"

#include <unordered_set>

#include "streamon/lexer.hpp"

namespace streamon {

uint64_t duration_to_ns(uint64_t mantissa, int frac_digits, const std::string& unit,
                        std::string& error) {
  if (mantissa == 0) {
    error = "frequency or period must be positive";
    return 0;
  }
  unsigned __int128 pow10 = 1;
  for (int i = 0; i < frac_digits; ++i) pow10 *= 10;

  if (unit == "Hz") {
    // period = 1e9 / (mantissa / 10^frac) = 1e9 * 10^frac / mantissa
    unsigned __int128 num = static_cast<unsigned __int128>(1000000000ull) * pow10;
    if (num % mantissa != 0) {
      error = "frequency does not yield an exact nanosecond period";
      return 0;
    }
    unsigned __int128 p = num / mantissa;
    if (p == 0 || p > UINT64_MAX) {
      error = "period out of range";
      return 0;
    }
    return static_cast<uint64_t>(p);
  }

  uint64_t unit_ns;
  if (unit == "s") unit_ns = 1000000000ull;
  else if (unit == "ms") unit_ns = 1000000ull;
  else if (unit == "min") unit_ns = 60000000000ull;
  else {
    error = "unknown time unit '" + unit + "' (expected Hz, s, ms or min)";
    return 0;
  }
  unsigned __int128 num = static_cast<unsigned __int128>(mantissa) * unit_ns;
  if (num % pow10 != 0) {
    error = "period does not yield an exact nanosecond value";
    return 0;
  }
  unsigned __int128 p = num / pow10;
  if (p == 0 || p > UINT64_MAX) {
    error = "period out of range";
    return 0;
  }
  return static_cast<uint64_t>(p);
}

namespace {

const std::unordered_set<std::string> kKeywords = {
    "import", "input", "constant", "output", "trigger",
    "spawn", "eval", "close", "when", "with",
};

class Parser {
 public:
  Parser(const std::string& source, DiagnosticList& diags)
      : diags_(diags), tokens_(tokenize(source, diags)) {}

  Ast run() {
    Ast ast;
    int trigger_count = 0;
    while (!at(TokenKind::End)) {
      size_t before = pos_;
      if (at_ident("import")) {
        parse_import(ast);
      } else if (at_ident("input")) {
        parse_input(ast);
      } else if (at_ident("constant")) {
        parse_constant(ast);
      } else if (at_ident("output")) {
        parse_output(ast);
      } else if (at_ident("trigger")) {
        parse_trigger(ast, trigger_count++);
      } else {
        diags_.error("syntax", "expected a declaration (import, input, constant, output or trigger)",
                     cur().span);
        recover();
      }
      if (pos_ == before) ++pos_;  // always make progress
    }
    check_duplicates(ast);
    return ast;
  }

 private:
  DiagnosticList& diags_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;

  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(size_t k = 1) const {
    size_t i = pos_ + k;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(TokenKind k) const { return cur().kind == k; }
  bool at_ident(const char* word) const {
    return cur().kind == TokenKind::Ident && cur().text == word;
  }
  Token take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool accept(TokenKind k) {
    if (!at(k)) return false;
    take();
    return true;
  }
  bool expect(TokenKind k, const char* what) {
    if (accept(k)) return true;
    diags_.error("syntax", std::string("expected ") + what, cur().span);
    return false;
  }

  // Skip ahead to the next top-level keyword after an error.
  void recover() {
    while (!at(TokenKind::End)) {
      if (cur().kind == TokenKind::Ident && kKeywords.count(cur().text) &&
          cur().text != "when" && cur().text != "with")
        return;
      ++pos_;
    }
  }

  std::string expect_name() {
    if (cur().kind == TokenKind::Ident && !kKeywords.count(cur().text)) {
      return take().text;
    }
    diags_.error("syntax", "expected an identifier", cur().span);
    return "";
  }

  void check_duplicates(const Ast& ast) {
    std::unordered_set<std::string> seen;
    for (const auto& d : ast.decls) {
      if (d.name.empty()) continue;
      if (!seen.insert(d.name).second)
        diags_.error("duplicate-name", "duplicate declaration of '" + d.name + "'", d.span);
    }
  }

  void parse_import(Ast& ast) {
    take();
    const Token& name = cur();
    std::string mod = expect_name();
    if (mod == "math") {
      ast.math_imported = true;
    } else if (!mod.empty()) {
      diags_.error("unknown-import", "unknown module '" + mod + "' (only 'math' is available)",
                   name.span);
    }
  }

  std::optional<ValueType> parse_type_annotation() {
    const Token& t = cur();
    std::string name = expect_name();
    if (name == "Int") return ValueType::simple(ValueType::Kind::Int);
    if (name == "UInt") return ValueType::simple(ValueType::Kind::UInt);
    if (name == "Float") return ValueType::simple(ValueType::Kind::Float);
    if (name == "Bool") return ValueType::simple(ValueType::Kind::Bool);
    if (name == "String") return ValueType::simple(ValueType::Kind::String);
    diags_.error("syntax", "unknown type '" + name + "'", t.span);
    return std::nullopt;
  }

  void parse_input(Ast& ast) {
    Token kw = take();
    Declaration d;
    d.kind = DeclKind::Input;
    d.span = kw.span;
    d.name = expect_name();
    expect(TokenKind::Colon, "':' and a type annotation after the input name");
    d.type_annotation = parse_type_annotation();
    d.span.end = cur().span.begin;
    ast.decls.push_back(std::move(d));
  }

  void parse_constant(Ast& ast) {
    Token kw = take();
    Declaration d;
    d.kind = DeclKind::Constant;
    d.span = kw.span;
    d.name = expect_name();
    expect(TokenKind::Colon, "':' and a type annotation after the constant name");
    d.type_annotation = parse_type_annotation();
    expect(TokenKind::Assign, "':=' and a literal value");
    d.constant_value = parse_literal();
    d.span.end = cur().span.begin;
    ast.decls.push_back(std::move(d));
  }

  ExprPtr parse_literal() {
    ExprPtr e = parse_unary();
    if (!e) return e;
    switch (e->kind) {
      case Expr::Kind::IntLit:
      case Expr::Kind::FloatLit:
      case Expr::Kind::BoolLit:
      case Expr::Kind::StringLit:
        return e;
      case Expr::Kind::Unary:
        if (e->uop == UnaryOp::Neg &&
            (e->children[0]->kind == Expr::Kind::IntLit ||
             e->children[0]->kind == Expr::Kind::FloatLit))
          return e;
        break;
      default:
        break;
    }
    diags_.error("syntax", "constants require a literal value", e->span);
    return e;
  }

  void parse_output(Ast& ast) {
    Token kw = take();
    Declaration d;
    d.kind = DeclKind::Output;
    d.span = kw.span;
    d.name = expect_name();
    parse_params(d);
    if (accept(TokenKind::Colon)) d.type_annotation = parse_type_annotation();
    parse_body(d, /*is_trigger=*/false);
    d.span.end = cur().span.begin;
    ast.decls.push_back(std::move(d));
  }

  void parse_trigger(Ast& ast, int index) {
    Token kw = take();
    Declaration d;
    d.kind = DeclKind::Trigger;
    d.span = kw.span;
    d.name = "trigger_" + std::to_string(index);
    if (at(TokenKind::LParen)) parse_params(d);
    if (at_ident("spawn") || at_ident("eval") || at_ident("close")) {
      parse_clauses(d, /*is_trigger=*/true);
    } else {
      // Bare form: trigger [@pacing@] <condition> "<message>"
      Clause eval;
      eval.span = cur().span;
      if (at(TokenKind::At)) eval.pacing = parse_pacing();
      eval.when = parse_expression();
      if (at(TokenKind::String)) {
        Token msg = take();
        ExprPtr m = make_expr(Expr::Kind::StringLit, msg.span);
        m->text = msg.text;
        eval.with = std::move(m);
      } else {
        diags_.error("syntax", "expected a trigger message string", cur().span);
      }
      eval.span.end = cur().span.begin;
      d.eval = std::move(eval);
    }
    d.span.end = cur().span.begin;
    ast.decls.push_back(std::move(d));
  }

  void parse_params(Declaration& d) {
    if (!accept(TokenKind::LParen)) return;
    std::unordered_set<std::string> seen;
    while (!at(TokenKind::RParen) && !at(TokenKind::End)) {
      const Token& t = cur();
      std::string p = expect_name();
      if (p.empty()) break;
      if (!seen.insert(p).second)
        diags_.error("duplicate-name", "duplicate parameter '" + p + "'", t.span);
      d.params.push_back(p);
      if (!accept(TokenKind::Comma)) break;
    }
    expect(TokenKind::RParen, "')' after parameter list");
  }

  void parse_body(Declaration& d, bool is_trigger) {
    if (accept(TokenKind::Assign)) {
      // output o := e   desugars to   output o eval with e
      Clause eval;
      eval.span = cur().span;
      eval.with = parse_expression();
      if (eval.with) eval.span = eval.with->span;
      d.eval = std::move(eval);
      return;
    }
    if (at_ident("spawn") || at_ident("eval") || at_ident("close")) {
      parse_clauses(d, is_trigger);
      return;
    }
    diags_.error("syntax", "expected ':=' or a spawn/eval/close clause", cur().span);
  }

  void parse_clauses(Declaration& d, bool is_trigger) {
    while (at_ident("spawn") || at_ident("eval") || at_ident("close")) {
      std::string word = cur().text;
      Token kw = take();
      Clause c;
      c.span = kw.span;
      if (at(TokenKind::At)) c.pacing = parse_pacing();
      if (at_ident("when")) {
        take();
        c.when = parse_expression();
      }
      if (at_ident("with")) {
        take();
        if (word == "close") {
          diags_.error("syntax", "close clauses never carry a with-expression", cur().span);
          parse_expression();  // skip it
        } else {
          c.with = parse_expression();
        }
      }
      c.span.end = cur().span.begin;
      if (word == "spawn") {
        if (d.spawn) diags_.error("syntax", "duplicate spawn clause", kw.span);
        d.spawn = std::move(c);
      } else if (word == "eval") {
        if (d.eval) diags_.error("syntax", "multiple eval clauses are not supported", kw.span);
        d.eval = std::move(c);
      } else {
        if (d.close) diags_.error("syntax", "duplicate close clause", kw.span);
        d.close = std::move(c);
      }
    }
    if (!d.eval) {
      diags_.error("syntax", "stream '" + d.name + "' has no eval clause", d.span);
    } else if (!is_trigger && !d.eval->with) {
      diags_.error("syntax", "eval clause of '" + d.name + "' needs a with-expression", d.eval->span);
    } else if (is_trigger && !d.eval->with) {
      diags_.error("syntax", "trigger eval clause needs a message (with \"...\")", d.eval->span);
    }
  }

  PacingAnnotation parse_pacing() {
    PacingAnnotation p;
    Token at_tok = take();  // '@'
    p.span = at_tok.span;
    if (cur().kind == TokenKind::Duration) {
      Token t = take();
      std::string err;
      p.period_ns = duration_to_ns(t.mantissa, t.frac_digits, t.unit, err);
      if (!err.empty()) diags_.error("pacing-period", err, t.span);
    } else {
      p.formula = parse_or();  // positive formula over input names, or `true`
    }
    p.span.end = cur().span.end;
    expect(TokenKind::At, "closing '@' after pacing annotation");
    return p;
  }

  // Expression grammar, loosest to tightest:
  //   || > && > comparisons > + - > * / % > ** > unary > postfix chain
  ExprPtr parse_expression() { return parse_or(); }

  ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    SourceSpan span{lhs ? lhs->span.begin : 0, rhs ? rhs->span.end : 0};
    ExprPtr e = make_expr(Expr::Kind::Binary, span);
    e->bop = op;
    e->children.push_back(std::move(lhs));
    e->children.push_back(std::move(rhs));
    return e;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (accept(TokenKind::PipePipe)) lhs = binary(BinaryOp::Or, std::move(lhs), parse_and());
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_cmp();
    while (accept(TokenKind::AmpAmp)) lhs = binary(BinaryOp::And, std::move(lhs), parse_cmp());
    return lhs;
  }

  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_add();
    for (;;) {
      BinaryOp op;
      switch (cur().kind) {
        case TokenKind::Lt: op = BinaryOp::Lt; break;
        case TokenKind::Le: op = BinaryOp::Le; break;
        case TokenKind::Gt: op = BinaryOp::Gt; break;
        case TokenKind::Ge: op = BinaryOp::Ge; break;
        case TokenKind::Eq:
        case TokenKind::EqEq: op = BinaryOp::Eq; break;
        case TokenKind::Ne: op = BinaryOp::Ne; break;
        default: return lhs;
      }
      take();
      lhs = binary(op, std::move(lhs), parse_add());
    }
  }

  ExprPtr parse_add() {
    ExprPtr lhs = parse_mul();
    for (;;) {
      if (accept(TokenKind::Plus)) lhs = binary(BinaryOp::Add, std::move(lhs), parse_mul());
      else if (accept(TokenKind::Minus)) lhs = binary(BinaryOp::Sub, std::move(lhs), parse_mul());
      else return lhs;
    }
  }

  ExprPtr parse_mul() {
    ExprPtr lhs = parse_pow();
    for (;;) {
      if (accept(TokenKind::Star)) lhs = binary(BinaryOp::Mul, std::move(lhs), parse_pow());
      else if (accept(TokenKind::Slash)) lhs = binary(BinaryOp::Div, std::move(lhs), parse_pow());
      else if (accept(TokenKind::Percent)) lhs = binary(BinaryOp::Rem, std::move(lhs), parse_pow());
      else return lhs;
    }
  }

  ExprPtr parse_pow() {
    ExprPtr lhs = parse_unary();
    if (accept(TokenKind::StarStar)) return binary(BinaryOp::Pow, std::move(lhs), parse_pow());
    return lhs;
  }

  ExprPtr parse_unary() {
    if (at(TokenKind::Minus) || at(TokenKind::Bang)) {
      Token t = take();
      ExprPtr operand = parse_unary();
      SourceSpan span{t.span.begin, operand ? operand->span.end : t.span.end};
      ExprPtr e = make_expr(Expr::Kind::Unary, span);
      e->uop = t.kind == TokenKind::Minus ? UnaryOp::Neg : UnaryOp::Not;
      e->children.push_back(std::move(operand));
      return e;
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (at(TokenKind::Dot)) {
      take();
      e = parse_postfix_op(std::move(e));
    }
    return e;
  }

  ExprPtr error_expr(SourceSpan span) { return make_expr(Expr::Kind::IntLit, span); }

  ExprPtr parse_postfix_op(ExprPtr base) {
    SourceSpan begin = base ? base->span : cur().span;
    if (at(TokenKind::Int)) {
      Token t = take();
      ExprPtr e = make_expr(Expr::Kind::Projection, {begin.begin, t.span.end});
      e->proj_index = static_cast<size_t>(t.int_value);
      e->children.push_back(std::move(base));
      return e;
    }
    const Token& name_tok = cur();
    std::string method = expect_name();
    if (method == "offset") return parse_offset(std::move(base), begin);
    if (method == "defaults") return parse_defaults(std::move(base), begin);
    if (method == "hold") return parse_hold(std::move(base), begin);
    if (method == "aggregate") return parse_aggregate(std::move(base), begin);
    if (method == "format") return parse_format(std::move(base), begin);
    diags_.error("syntax", "unknown method '" + method + "'", name_tok.span);
    return base ? std::move(base) : error_expr(name_tok.span);
  }

  bool expect_label(const char* label) {
    if (cur().kind == TokenKind::Ident && cur().text == label) {
      take();
      return expect(TokenKind::Colon, "':' after argument label");
    }
    diags_.error("syntax", std::string("expected '") + label + ":' argument", cur().span);
    return false;
  }

  ExprPtr parse_offset(ExprPtr base, SourceSpan begin) {
    expect(TokenKind::LParen, "'(' after offset");
    expect_label("by");
    ExprPtr amount = parse_expression();
    int64_t n = 0;
    bool ok = false;
    if (amount && amount->kind == Expr::Kind::Unary && amount->uop == UnaryOp::Neg &&
        amount->children[0]->kind == Expr::Kind::IntLit) {
      uint64_t mag = amount->children[0]->int_value;
      if (mag > 0 && mag <= static_cast<uint64_t>(INT64_MAX)) {
        n = -static_cast<int64_t>(mag);
        ok = true;
      }
    }
    if (!ok)
      diags_.error("offset-argument", "offset arguments must be strictly negative integers",
                   amount ? amount->span : cur().span);
    expect(TokenKind::RParen, "')' after offset argument");
    ExprPtr e = make_expr(Expr::Kind::Offset, {begin.begin, cur().span.begin});
    e->offset_amount = n;
    e->children.push_back(std::move(base));
    return e;
  }

  ExprPtr parse_defaults(ExprPtr base, SourceSpan begin) {
    expect(TokenKind::LParen, "'(' after defaults");
    expect_label("to");
    ExprPtr dflt = parse_expression();
    expect(TokenKind::RParen, "')' after defaults argument");
    ExprPtr e = make_expr(Expr::Kind::Defaults, {begin.begin, cur().span.begin});
    e->children.push_back(std::move(base));
    e->children.push_back(std::move(dflt));
    return e;
  }

  ExprPtr parse_hold(ExprPtr base, SourceSpan begin) {
    expect(TokenKind::LParen, "'(' after hold");
    ExprPtr e = make_expr(Expr::Kind::Hold, begin);
    e->children.push_back(std::move(base));
    if (!at(TokenKind::RParen)) {
      expect_label("or");
      e->children.push_back(parse_expression());
    }
    expect(TokenKind::RParen, "')' after hold");
    e->span.end = cur().span.begin;
    return e;
  }

  ExprPtr parse_aggregate(ExprPtr base, SourceSpan begin) {
    expect(TokenKind::LParen, "'(' after aggregate");
    bool instances = false;
    bool exact = false;
    if (at_ident("over_instances")) instances = true;
    else if (at_ident("over_exactly")) exact = true;
    else if (!at_ident("over")) {
      diags_.error("syntax", "expected 'over:', 'over_exactly:' or 'over_instances:'", cur().span);
    }
    take();
    expect(TokenKind::Colon, "':' after argument label");

    ExprPtr e;
    if (instances) {
      e = make_expr(Expr::Kind::InstanceAgg, begin);
      if (at_ident("all")) e->inst_sel = InstanceSel::All;
      else if (at_ident("fresh")) e->inst_sel = InstanceSel::Fresh;
      else diags_.error("syntax", "expected 'all' or 'fresh'", cur().span);
      if (at(TokenKind::Ident)) take();
      if (base && base->kind == Expr::Kind::Name) {
        e->name = base->name;
        e->children.push_back(std::move(base));
      } else {
        diags_.error("syntax", "instance aggregations apply to a bare stream name",
                     base ? base->span : cur().span);
        e->children.push_back(base ? std::move(base) : error_expr(begin));
      }
    } else {
      e = make_expr(Expr::Kind::WindowAgg, begin);
      e->window_exact = exact;
      if (cur().kind == TokenKind::Duration) {
        Token t = take();
        std::string err;
        e->window_ns = duration_to_ns(t.mantissa, t.frac_digits, t.unit, err);
        if (!err.empty()) diags_.error("window-duration", err, t.span);
        if (t.unit == "Hz")
          diags_.error("window-duration", "window durations take a period, not a frequency", t.span);
      } else {
        diags_.error("syntax", "expected a duration such as 5s", cur().span);
      }
      e->children.push_back(std::move(base));
    }

    expect(TokenKind::Comma, "',' before using:");
    expect_label("using");
    const Token& fn_tok = cur();
    std::string fn = expect_name();
    if (auto f = agg_fn_from_name(fn)) e->agg_fn = *f;
    else diags_.error("syntax", "unknown aggregation function '" + fn + "'", fn_tok.span);
    expect(TokenKind::RParen, "')' after aggregation");
    e->span.end = cur().span.begin;
    return e;
  }

  ExprPtr parse_format(ExprPtr base, SourceSpan begin) {
    expect(TokenKind::LParen, "'(' after format");
    ExprPtr e = make_expr(Expr::Kind::Format, begin);
    e->children.push_back(std::move(base));
    while (!at(TokenKind::RParen) && !at(TokenKind::End)) {
      e->children.push_back(parse_expression());
      if (!accept(TokenKind::Comma)) break;
    }
    expect(TokenKind::RParen, "')' after format arguments");
    e->span.end = cur().span.begin;
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Int: {
        take();
        ExprPtr e = make_expr(Expr::Kind::IntLit, t.span);
        e->int_value = t.int_value;
        return e;
      }
      case TokenKind::Float: {
        take();
        ExprPtr e = make_expr(Expr::Kind::FloatLit, t.span);
        e->float_value = t.float_value;
        return e;
      }
      case TokenKind::String: {
        take();
        ExprPtr e = make_expr(Expr::Kind::StringLit, t.span);
        e->text = t.text;
        return e;
      }
      case TokenKind::Duration: {
        take();
        diags_.error("syntax", "duration literals are only valid in pacing annotations and windows",
                     t.span);
        return error_expr(t.span);
      }
      case TokenKind::LParen: {
        take();
        ExprPtr first = parse_expression();
        if (accept(TokenKind::Comma)) {
          ExprPtr e = make_expr(Expr::Kind::TupleLit, {t.span.begin, 0});
          e->children.push_back(std::move(first));
          while (!at(TokenKind::RParen) && !at(TokenKind::End)) {
            e->children.push_back(parse_expression());
            if (!accept(TokenKind::Comma)) break;
          }
          expect(TokenKind::RParen, "')' after tuple");
          e->span.end = cur().span.begin;
          return e;
        }
        expect(TokenKind::RParen, "closing ')'");
        return first;
      }
      case TokenKind::Ident: {
        if (t.text == "true" || t.text == "false") {
          take();
          ExprPtr e = make_expr(Expr::Kind::BoolLit, t.span);
          e->bool_value = t.text == "true";
          return e;
        }
        if (kKeywords.count(t.text)) break;
        take();
        if (at(TokenKind::LParen)) {
          // Function call or instance application; the resolver decides which.
          take();
          bool is_math = t.text == "sqrt" || t.text == "sin" || t.text == "cos" ||
                         t.text == "abs" || t.text == "min" || t.text == "max";
          ExprPtr e = make_expr(is_math ? Expr::Kind::Call : Expr::Kind::Instance, t.span);
          e->name = t.text;
          while (!at(TokenKind::RParen) && !at(TokenKind::End)) {
            e->children.push_back(parse_expression());
            if (!accept(TokenKind::Comma)) break;
          }
          expect(TokenKind::RParen, "')' after arguments");
          e->span.end = cur().span.begin;
          return e;
        }
        ExprPtr e = make_expr(Expr::Kind::Name, t.span);
        e->name = t.text;
        return e;
      }
      default:
        break;
    }
    diags_.error("syntax", "expected an expression", t.span);
    if (!at(TokenKind::End)) take();
    return error_expr(t.span);
  }
};

}  // namespace

ParseResult parse(const std::string& source) {
  ParseResult result;
  Parser p(source, result.diags);
  result.ast = p.run();
  return result;
}

}  // namespace streamon
