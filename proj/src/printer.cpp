#include "streamon/printer.hpp"

#include <charconv>
#include <sstream>

namespace streamon {

ExprPtr make_expr(Expr::Kind kind, SourceSpan span) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->span = span;
  return e;
}

ExprPtr clone_expr(const Expr& e) {
  ExprPtr c = std::make_unique<Expr>();
  *c = Expr{};
  c->kind = e.kind;
  c->span = e.span;
  c->int_value = e.int_value;
  c->float_value = e.float_value;
  c->bool_value = e.bool_value;
  c->text = e.text;
  c->name = e.name;
  c->uop = e.uop;
  c->bop = e.bop;
  c->offset_amount = e.offset_amount;
  c->window_ns = e.window_ns;
  c->agg_fn = e.agg_fn;
  c->window_exact = e.window_exact;
  c->inst_sel = e.inst_sel;
  c->proj_index = e.proj_index;
  c->decl_ref = e.decl_ref;
  c->param_ref = e.param_ref;
  c->type = e.type;
  c->window_slot = e.window_slot;
  for (const auto& ch : e.children) c->children.push_back(clone_expr(*ch));
  return c;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit: if (a.int_value != b.int_value) return false; break;
    case Expr::Kind::FloatLit: if (a.float_value != b.float_value) return false; break;
    case Expr::Kind::BoolLit: if (a.bool_value != b.bool_value) return false; break;
    case Expr::Kind::StringLit: if (a.text != b.text) return false; break;
    case Expr::Kind::Name:
    case Expr::Kind::Call:
    case Expr::Kind::Instance: if (a.name != b.name) return false; break;
    case Expr::Kind::Unary: if (a.uop != b.uop) return false; break;
    case Expr::Kind::Binary: if (a.bop != b.bop) return false; break;
    case Expr::Kind::Offset: if (a.offset_amount != b.offset_amount) return false; break;
    case Expr::Kind::WindowAgg:
      if (a.window_ns != b.window_ns || a.agg_fn != b.agg_fn || a.window_exact != b.window_exact)
        return false;
      break;
    case Expr::Kind::InstanceAgg:
      if (a.name != b.name || a.agg_fn != b.agg_fn || a.inst_sel != b.inst_sel) return false;
      break;
    case Expr::Kind::Projection: if (a.proj_index != b.proj_index) return false; break;
    default: break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (size_t i = 0; i < a.children.size(); ++i)
    if (!expr_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "**";
    case BinaryOp::Rem: return "%";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
  }
  return "?";
}

const char* to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Count: return "count";
    case AggFn::Sum: return "sum";
    case AggFn::Avg: return "avg";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Exists: return "exists";
    case AggFn::Forall: return "forall";
  }
  return "?";
}

std::optional<AggFn> agg_fn_from_name(const std::string& name) {
  if (name == "count") return AggFn::Count;
  if (name == "sum") return AggFn::Sum;
  if (name == "avg") return AggFn::Avg;
  if (name == "min") return AggFn::Min;
  if (name == "max") return AggFn::Max;
  if (name == "exists") return AggFn::Exists;
  if (name == "forall") return AggFn::Forall;
  return std::nullopt;
}

std::string ValueType::to_string() const {
  switch (kind) {
    case Kind::Int: return "Int";
    case Kind::UInt: return "UInt";
    case Kind::Float: return "Float";
    case Kind::Bool: return "Bool";
    case Kind::String: return "String";
    case Kind::Optional: return elems.front().to_string() + "?";
    case Kind::Tuple: {
      std::string s = "(";
      for (size_t i = 0; i < elems.size(); ++i) {
        if (i) s += ", ";
        s += elems[i].to_string();
      }
      return s + ")";
    }
  }
  return "?";
}

namespace {

std::string float_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // Keep printed floats lexable as float literals.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::Binary) {
    switch (e.bop) {
      case BinaryOp::Or: return 1;
      case BinaryOp::And: return 2;
      case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Gt:
      case BinaryOp::Ge: case BinaryOp::Eq: case BinaryOp::Ne: return 3;
      case BinaryOp::Add: case BinaryOp::Sub: return 4;
      case BinaryOp::Mul: case BinaryOp::Div: case BinaryOp::Rem: return 5;
      case BinaryOp::Pow: return 6;
    }
  }
  if (e.kind == Expr::Kind::Unary) return 7;
  return 8;
}

void print_expr(const Expr& e, std::string& out) {
  auto child = [&](const Expr& c, int min_prec) {
    bool paren = precedence(c) < min_prec;
    if (paren) out += '(';
    print_expr(c, out);
    if (paren) out += ')';
  };
  switch (e.kind) {
    case Expr::Kind::IntLit: out += std::to_string(e.int_value); break;
    case Expr::Kind::FloatLit: out += float_text(e.float_value); break;
    case Expr::Kind::BoolLit: out += e.bool_value ? "true" : "false"; break;
    case Expr::Kind::StringLit: out += '"'; out += e.text; out += '"'; break;
    case Expr::Kind::Name: out += e.name; break;
    case Expr::Kind::Unary:
      out += e.uop == UnaryOp::Neg ? "-" : "!";
      child(*e.children[0], 7);
      break;
    case Expr::Kind::Binary: {
      int p = precedence(e);
      child(*e.children[0], p);
      out += ' ';
      out += to_string(e.bop);
      out += ' ';
      child(*e.children[1], p + 1);
      break;
    }
    case Expr::Kind::Call:
    case Expr::Kind::Instance: {
      out += e.name;
      out += '(';
      for (size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ", ";
        print_expr(*e.children[i], out);
      }
      out += ')';
      break;
    }
    case Expr::Kind::Offset:
      child(*e.children[0], 8);
      out += ".offset(by: ";
      out += std::to_string(e.offset_amount);
      out += ')';
      break;
    case Expr::Kind::Defaults:
      child(*e.children[0], 8);
      out += ".defaults(to: ";
      print_expr(*e.children[1], out);
      out += ')';
      break;
    case Expr::Kind::Hold:
      child(*e.children[0], 8);
      if (e.children.size() > 1) {
        out += ".hold(or: ";
        print_expr(*e.children[1], out);
        out += ')';
      } else {
        out += ".hold()";
      }
      break;
    case Expr::Kind::WindowAgg:
      child(*e.children[0], 8);
      out += ".aggregate(";
      out += e.window_exact ? "over_exactly: " : "over: ";
      out += period_to_string(e.window_ns);
      out += ", using: ";
      out += to_string(e.agg_fn);
      out += ')';
      break;
    case Expr::Kind::InstanceAgg:
      out += e.name;
      out += ".aggregate(over_instances: ";
      out += e.inst_sel == InstanceSel::All ? "all" : "fresh";
      out += ", using: ";
      out += to_string(e.agg_fn);
      out += ')';
      break;
    case Expr::Kind::TupleLit:
      out += '(';
      for (size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ", ";
        print_expr(*e.children[i], out);
      }
      out += ')';
      break;
    case Expr::Kind::Projection:
      child(*e.children[0], 8);
      out += '.';
      out += std::to_string(e.proj_index);
      break;
    case Expr::Kind::Format:
      child(*e.children[0], 8);
      out += ".format(";
      for (size_t i = 1; i < e.children.size(); ++i) {
        if (i > 1) out += ", ";
        print_expr(*e.children[i], out);
      }
      out += ')';
      break;
  }
}

}  // namespace

std::string period_to_string(uint64_t period_ns) {
  // Print as decimal seconds with trailing zeros trimmed.
  uint64_t whole = period_ns / 1000000000ull;
  uint64_t frac = period_ns % 1000000000ull;
  std::string s = std::to_string(whole);
  if (frac != 0) {
    char buf[16];
    snprintf(buf, sizeof buf, "%09llu", static_cast<unsigned long long>(frac));
    std::string f(buf);
    while (!f.empty() && f.back() == '0') f.pop_back();
    s += '.';
    s += f;
  }
  return s + "s";
}

std::string expr_to_string(const Expr& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

namespace {

void print_clause(const char* kw, const Clause& c, std::string& out) {
  out += "  ";
  out += kw;
  if (c.pacing) {
    out += " @";
    if (c.pacing->is_periodic()) out += period_to_string(c.pacing->period_ns);
    else out += expr_to_string(*c.pacing->formula);
    out += '@';
  }
  if (c.when) {
    out += " when ";
    out += expr_to_string(*c.when);
  }
  if (c.with) {
    out += " with ";
    out += expr_to_string(*c.with);
  }
  out += '\n';
}

}  // namespace

std::string print_decl(const Declaration& d) {
  std::string out;
  switch (d.kind) {
    case DeclKind::Input:
      out += "input " + d.name + ": " + d.type_annotation->to_string() + "\n";
      break;
    case DeclKind::Constant:
      out += "constant " + d.name + ": " + d.type_annotation->to_string() +
             " := " + expr_to_string(*d.constant_value) + "\n";
      break;
    case DeclKind::Output:
    case DeclKind::Trigger: {
      out += d.kind == DeclKind::Output ? "output " + d.name : "trigger";
      if (!d.params.empty()) {
        out += '(';
        for (size_t i = 0; i < d.params.size(); ++i) {
          if (i) out += ", ";
          out += d.params[i];
        }
        out += ')';
      }
      if (d.type_annotation) out += ": " + d.type_annotation->to_string();
      out += '\n';
      if (d.spawn) print_clause("spawn", *d.spawn, out);
      if (d.eval) print_clause("eval", *d.eval, out);
      if (d.close) print_clause("close", *d.close, out);
      break;
    }
  }
  return out;
}

std::string print_spec(const Ast& ast) {
  std::string out;
  if (ast.math_imported) out += "import math\n";
  for (const auto& d : ast.decls) out += print_decl(d);
  return out;
}

namespace {

bool clause_equal(const std::optional<Clause>& a, const std::optional<Clause>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->pacing.has_value() != b->pacing.has_value()) return false;
  if (a->pacing) {
    if (a->pacing->is_periodic() != b->pacing->is_periodic()) return false;
    if (a->pacing->is_periodic()) {
      if (a->pacing->period_ns != b->pacing->period_ns) return false;
    } else if (!expr_equal(*a->pacing->formula, *b->pacing->formula)) {
      return false;
    }
  }
  if ((a->when != nullptr) != (b->when != nullptr)) return false;
  if (a->when && !expr_equal(*a->when, *b->when)) return false;
  if ((a->with != nullptr) != (b->with != nullptr)) return false;
  if (a->with && !expr_equal(*a->with, *b->with)) return false;
  return true;
}

}  // namespace

bool decl_equal(const Declaration& a, const Declaration& b) {
  if (a.kind != b.kind || a.name != b.name || a.params != b.params) return false;
  if (a.type_annotation != b.type_annotation) return false;
  if ((a.constant_value != nullptr) != (b.constant_value != nullptr)) return false;
  if (a.constant_value && !expr_equal(*a.constant_value, *b.constant_value)) return false;
  return clause_equal(a.spawn, b.spawn) && clause_equal(a.eval, b.eval) &&
         clause_equal(a.close, b.close);
}

bool ast_equal(const Ast& a, const Ast& b) {
  if (a.math_imported != b.math_imported || a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.decls.size(); ++i)
    if (!decl_equal(a.decls[i], b.decls[i])) return false;
  return true;
}

}  // namespace streamon
