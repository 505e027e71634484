#ifndef STREAMON_AST_HPP
#define STREAMON_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "streamon/diagnostics.hpp"

namespace streamon {

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

struct ValueType {
  enum class Kind { Int, UInt, Float, Bool, String, Tuple, Optional };
  Kind kind = Kind::Int;
  std::vector<ValueType> elems;  // Tuple: members; Optional: single inner type

  static ValueType simple(Kind k) { return ValueType{k, {}}; }
  static ValueType tuple(std::vector<ValueType> members) {
    return ValueType{Kind::Tuple, std::move(members)};
  }
  // Optionals never nest: Optional(Optional(t)) collapses to Optional(t).
  static ValueType optional(ValueType inner) {
    if (inner.kind == Kind::Optional) return inner;
    ValueType t{Kind::Optional, {}};
    t.elems.push_back(std::move(inner));
    return t;
  }

  bool is_optional() const { return kind == Kind::Optional; }
  const ValueType& inner() const { return elems.front(); }

  bool operator==(const ValueType& o) const {
    return kind == o.kind && elems == o.elems;
  }
  bool operator!=(const ValueType& o) const { return !(*this == o); }

  std::string to_string() const;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class UnaryOp { Neg, Not };
enum class BinaryOp {
  Add, Sub, Mul, Div, Pow, Rem,
  And, Or,
  Lt, Le, Gt, Ge, Eq, Ne,
};

enum class AggFn { Count, Sum, Avg, Min, Max, Exists, Forall };
enum class InstanceSel { All, Fresh };

const char* to_string(BinaryOp op);
const char* to_string(AggFn fn);
std::optional<AggFn> agg_fn_from_name(const std::string& name);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind {
    IntLit,      // int_value (magnitude; sign comes from Unary Neg)
    FloatLit,    // float_value
    BoolLit,     // bool_value
    StringLit,   // text
    Name,        // name; resolves to a declaration or a parameter
    Unary,       // uop, children[0]
    Binary,      // bop, children[0], children[1]
    Call,        // name (math function), children = args
    Instance,    // name(children...) instance application
    Offset,      // children[0].offset(by: offset_amount), offset_amount < 0
    Defaults,    // children[0].defaults(to: children[1])
    Hold,        // children[0].hold() or .hold(or: children[1])
    WindowAgg,   // children[0].aggregate(over[_exactly]: duration, using: fn)
    InstanceAgg, // name.aggregate(over_instances: sel, using: fn)
    TupleLit,    // (children...)
    Projection,  // children[0].proj_index
    Format,      // children[0].format(children[1..])
  };

  Kind kind;
  SourceSpan span;

  uint64_t int_value = 0;
  double float_value = 0.0;
  bool bool_value = false;
  std::string text;  // StringLit content (after {{}} -> {} normalization)
  std::string name;  // Name / Call / Instance / InstanceAgg

  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  int64_t offset_amount = 0;
  uint64_t window_ns = 0;
  AggFn agg_fn = AggFn::Count;
  bool window_exact = false;
  InstanceSel inst_sel = InstanceSel::All;
  size_t proj_index = 0;

  std::vector<ExprPtr> children;

  // Filled in by the resolver: exactly one of these is set for Name/Instance.
  int decl_ref = -1;
  int param_ref = -1;

  // Filled in by the value-type checker.
  ValueType type;

  // Filled in by the engine compiler: slot of a window/instance-agg state.
  int window_slot = -1;
};

ExprPtr make_expr(Expr::Kind kind, SourceSpan span);
ExprPtr clone_expr(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);
std::string expr_to_string(const Expr& e);

// ---------------------------------------------------------------------------
// Pacing annotations (the `@...@` part) as written in the source
// ---------------------------------------------------------------------------

struct PacingAnnotation {
  // Either an event formula (expression over input names, && / || / true)
  // or an exact period in nanoseconds derived from a frequency/period literal.
  ExprPtr formula;            // null for periodic annotations
  uint64_t period_ns = 0;     // 0 for event annotations
  SourceSpan span;

  bool is_periodic() const { return formula == nullptr; }
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

enum class DeclKind { Input, Constant, Output, Trigger };

struct Clause {
  std::optional<PacingAnnotation> pacing;
  ExprPtr when;  // may be null
  ExprPtr with;  // may be null (close clauses never carry one)
  SourceSpan span;
};

struct Declaration {
  DeclKind kind;
  std::string name;  // triggers get synthetic names trigger_0, trigger_1, ...
  SourceSpan span;
  std::vector<std::string> params;
  std::optional<ValueType> type_annotation;

  std::optional<Clause> spawn;
  std::optional<Clause> eval;   // present for every output/trigger
  std::optional<Clause> close;

  ExprPtr constant_value;  // constants only

  bool is_stream() const { return kind != DeclKind::Constant; }
};

struct Ast {
  std::vector<Declaration> decls;
  bool math_imported = false;

  const Declaration* find(const std::string& name) const {
    for (const auto& d : decls)
      if (d.name == name) return &d;
    return nullptr;
  }
  int index_of(const std::string& name) const {
    for (size_t i = 0; i < decls.size(); ++i)
      if (decls[i].name == name) return static_cast<int>(i);
    return -1;
  }
};

bool decl_equal(const Declaration& a, const Declaration& b);
bool ast_equal(const Ast& a, const Ast& b);

}  // namespace streamon

#endif
