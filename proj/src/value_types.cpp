#include "streamon/value_types.hpp"

#include <map>
#include <set>

namespace streamon {

namespace {

using Kind = ValueType::Kind;

// Union-find type arena. A node is either an unbound variable (possibly
// restricted to integer kinds) or a constructor with child nodes.
class Types {
 public:
  explicit Types(DiagnosticList& diags) : diags_(diags) {}

  int fresh_var(bool int_poly = false) {
    nodes_.push_back({-1, false, int_poly, Kind::Int, {}});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int con(Kind k, std::vector<int> args = {}) {
    nodes_.push_back({-1, true, false, k, std::move(args)});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int simple(Kind k) { return con(k); }
  int from_value_type(const ValueType& t) {
    std::vector<int> args;
    for (const auto& e : t.elems) args.push_back(from_value_type(e));
    return con(t.kind, std::move(args));
  }

  int find(int i) {
    while (nodes_[i].parent >= 0) {
      int p = nodes_[i].parent;
      if (nodes_[p].parent >= 0) nodes_[i].parent = nodes_[p].parent;
      i = p;
    }
    return i;
  }

  bool unify(int a, int b, SourceSpan span, const std::string& context, const char* code) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    Node& na = nodes_[a];
    Node& nb = nodes_[b];
    if (!na.is_con && !nb.is_con) {
      nodes_[a].parent = b;
      nodes_[b].int_poly = na.int_poly || nb.int_poly;
      return true;
    }
    if (!na.is_con) return bind(a, b, span, context, code);
    if (!nb.is_con) return bind(b, a, span, context, code);
    if (na.kind != nb.kind || na.args.size() != nb.args.size()) {
      mismatch(a, b, span, context, code);
      return false;
    }
    for (size_t i = 0; i < na.args.size(); ++i)
      if (!unify(nodes_[a].args[i], nodes_[b].args[i], span, context, code)) return false;
    return true;
  }

  // Resolve a node to a concrete type; unresolved plain variables yield
  // nullopt, unresolved int-polymorphic variables default to Int.
  std::optional<ValueType> resolve(int i) {
    i = find(i);
    const Node& n = nodes_[i];
    if (!n.is_con) {
      if (n.int_poly) return ValueType::simple(Kind::Int);
      return std::nullopt;
    }
    if (n.kind == Kind::Optional) {
      auto inner = resolve(n.args[0]);
      if (!inner) return std::nullopt;
      return ValueType::optional(*inner);
    }
    ValueType t = ValueType::simple(n.kind);
    for (int a : n.args) {
      auto e = resolve(a);
      if (!e) return std::nullopt;
      t.elems.push_back(*e);
    }
    t.kind = n.kind;
    return t;
  }

  // True once the outermost constructor is known.
  bool head_known(int i) {
    return nodes_[find(i)].is_con;
  }
  Kind head_kind(int i) { return nodes_[find(i)].kind; }
  const std::vector<int>& head_args(int i) { return nodes_[find(i)].args; }

  std::string describe(int i) {
    auto t = resolve(i);
    if (t) return t->to_string();
    i = find(i);
    if (nodes_[i].int_poly) return "Int";
    return "?";
  }

 private:
  struct Node {
    int parent;
    bool is_con;
    bool int_poly;
    Kind kind;
    std::vector<int> args;
  };

  bool bind(int var, int con_node, SourceSpan span, const std::string& context, const char* code) {
    Node& v = nodes_[var];
    const Node& c = nodes_[con_node];
    if (v.int_poly && c.kind != Kind::Int && c.kind != Kind::UInt) {
      diags_.error(code,
                   context + ": integer literal is not compatible with " + describe(con_node), span);
      return false;
    }
    nodes_[var].parent = con_node;
    return true;
  }

  void mismatch(int a, int b, SourceSpan span, const std::string& context, const char* code) {
    diags_.error(code, context + ": " + describe(a) + " is not compatible with " + describe(b),
                 span);
  }

  std::vector<Node> nodes_;
  DiagnosticList& diags_;
};

struct KindConstraint {
  int node;
  std::set<Kind> allowed;
  SourceSpan span;
  std::string what;
};

struct PendingProjection {
  int base;
  size_t index;
  int result;
  SourceSpan span;
};

class Checker {
 public:
  Checker(Ast& ast, TypeTable& table, DiagnosticList& diags)
      : ast_(ast), table_(table), diags_(diags), types_(diags) {}

  void run() {
    size_t n = ast_.decls.size();
    table_.decl_type.assign(n, ValueType::simple(Kind::Int));
    table_.param_types.assign(n, {});
    decl_node_.assign(n, -1);
    param_nodes_.assign(n, {});

    for (size_t i = 0; i < n; ++i) {
      Declaration& d = ast_.decls[i];
      if (d.kind == DeclKind::Input || d.kind == DeclKind::Constant) {
        decl_node_[i] = d.type_annotation ? types_.from_value_type(*d.type_annotation)
                                          : types_.fresh_var();
      } else if (d.kind == DeclKind::Trigger) {
        decl_node_[i] = types_.simple(Kind::Bool);
      } else {
        decl_node_[i] = d.type_annotation ? types_.from_value_type(*d.type_annotation)
                                          : types_.fresh_var();
      }
      for (size_t p = 0; p < d.params.size(); ++p) param_nodes_[i].push_back(types_.fresh_var());
    }

    for (size_t i = 0; i < n; ++i) check_decl(static_cast<int>(i));
    solve_projections();
    finalize();
  }

 private:
  Ast& ast_;
  TypeTable& table_;
  DiagnosticList& diags_;
  Types types_;
  std::vector<int> decl_node_;
  std::vector<std::vector<int>> param_nodes_;
  std::vector<KindConstraint> constraints_;
  std::vector<PendingProjection> projections_;
  std::map<Expr*, int> expr_nodes_;
  int current_decl_ = -1;

  void require(int node, std::set<Kind> allowed, SourceSpan span, std::string what) {
    constraints_.push_back({node, std::move(allowed), span, std::move(what)});
  }

  void check_decl(int idx) {
    Declaration& d = ast_.decls[idx];
    current_decl_ = idx;
    switch (d.kind) {
      case DeclKind::Input:
        return;
      case DeclKind::Constant: {
        if (d.constant_value) {
          int v = infer(*d.constant_value);
          types_.unify(v, decl_node_[idx], d.constant_value->span,
                       "constant '" + d.name + "'", "value-type");
        }
        return;
      }
      case DeclKind::Output:
      case DeclKind::Trigger:
        break;
    }

    if (d.spawn) {
      if (d.spawn->when) check_condition(*d.spawn->when, d.kind);
      if (d.spawn->with) {
        Expr& w = *d.spawn->with;
        size_t nparams = d.params.size();
        if (nparams == 1) {
          int v = infer(w);
          types_.unify(v, param_nodes_[idx][0], w.span, "spawn with-expression", "value-type");
        } else if (w.kind == Expr::Kind::TupleLit && w.children.size() == nparams) {
          for (size_t p = 0; p < nparams; ++p) {
            int v = infer(*w.children[p]);
            types_.unify(v, param_nodes_[idx][p], w.children[p]->span, "spawn with-expression",
                         "value-type");
          }
          expr_nodes_[&w] = types_.con(Kind::Tuple, param_nodes_[idx]);
        } else if (nparams > 0) {
          infer(w);
        }
      }
    }
    if (d.close && d.close->when) check_condition(*d.close->when, d.kind);
    if (d.eval) {
      if (d.eval->when) check_condition(*d.eval->when, d.kind);
      if (d.eval->with) {
        int v = infer(*d.eval->with);
        if (d.kind == DeclKind::Trigger) {
          types_.unify(v, types_.simple(Kind::String), d.eval->with->span,
                       "trigger messages are strings", "trigger-type");
        } else {
          types_.unify(v, decl_node_[idx], d.eval->with->span,
                       "value of stream '" + d.name + "'", "value-type");
        }
      }
    }
  }

  void check_condition(Expr& e, DeclKind kind) {
    int v = infer(e);
    if (kind == DeclKind::Trigger) {
      types_.unify(v, types_.simple(Kind::Bool), e.span, "trigger condition must be Bool",
                   "trigger-type");
    } else {
      types_.unify(v, types_.simple(Kind::Bool), e.span, "when-condition must be Bool",
                   "value-type");
    }
  }

  int stream_value_node(const Expr& access) {
    return decl_node_[access.decl_ref];
  }

  int infer(Expr& e) {
    int node = infer_inner(e);
    expr_nodes_[&e] = node;
    return node;
  }

  int infer_inner(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return types_.fresh_var(/*int_poly=*/true);
      case Expr::Kind::FloatLit:
        return types_.simple(Kind::Float);
      case Expr::Kind::BoolLit:
        return types_.simple(Kind::Bool);
      case Expr::Kind::StringLit:
        return types_.simple(Kind::String);
      case Expr::Kind::Name: {
        if (e.param_ref >= 0) return param_nodes_[current_decl_][e.param_ref];
        if (e.decl_ref >= 0) return decl_node_[e.decl_ref];
        return types_.fresh_var();
      }
      case Expr::Kind::Instance: {
        if (e.decl_ref < 0) return types_.fresh_var();
        const auto& params = param_nodes_[e.decl_ref];
        for (size_t i = 0; i < e.children.size() && i < params.size(); ++i) {
          int a = infer(*e.children[i]);
          types_.unify(a, params[i], e.children[i]->span,
                       "argument of '" + e.name + "'", "value-type");
        }
        return decl_node_[e.decl_ref];
      }
      case Expr::Kind::Unary: {
        int v = infer(*e.children[0]);
        if (e.uop == UnaryOp::Not) {
          types_.unify(v, types_.simple(Kind::Bool), e.span, "operand of '!'", "value-type");
          return v;
        }
        require(v, {Kind::Int, Kind::Float}, e.span, "operand of unary '-'");
        return v;
      }
      case Expr::Kind::Binary:
        return infer_binary(e);
      case Expr::Kind::Call:
        return infer_call(e);
      case Expr::Kind::Offset: {
        int base = infer(*e.children[0]);
        return types_.con(Kind::Optional, {base});
      }
      case Expr::Kind::Hold: {
        int base = infer(*e.children[0]);
        if (e.children.size() > 1) {
          int dflt = infer(*e.children[1]);
          types_.unify(dflt, base, e.children[1]->span, "hold(or:) default", "value-type");
          return base;
        }
        return types_.con(Kind::Optional, {base});
      }
      case Expr::Kind::Defaults: {
        int base = infer(*e.children[0]);
        int dflt = infer(*e.children[1]);
        if (types_.head_known(base) && types_.head_kind(base) != Kind::Optional) {
          diags_.error("value-type", "defaults(to:) applies to optional values; got " +
                                         types_.describe(base),
                       e.span);
          return dflt;
        }
        int inner = types_.fresh_var();
        types_.unify(base, types_.con(Kind::Optional, {inner}), e.span, "defaults(to:)",
                     "value-type");
        types_.unify(dflt, inner, e.children[1]->span, "defaults(to:) value", "value-type");
        return inner;
      }
      case Expr::Kind::WindowAgg: {
        int target = infer(*e.children[0]);
        // The window sees the target's committed values; an optional target
        // type cannot occur since stream types are non-optional.
        return agg_result(e, target, e.window_exact, /*window=*/true);
      }
      case Expr::Kind::InstanceAgg: {
        if (e.decl_ref < 0) return types_.fresh_var();
        int target = decl_node_[e.decl_ref];
        return agg_result(e, target, /*exact=*/false, /*window=*/false);
      }
      case Expr::Kind::TupleLit: {
        std::vector<int> elems;
        for (auto& c : e.children) elems.push_back(infer(*c));
        return types_.con(Kind::Tuple, std::move(elems));
      }
      case Expr::Kind::Projection: {
        int base = infer(*e.children[0]);
        int result = types_.fresh_var();
        projections_.push_back({base, e.proj_index, result, e.span});
        return result;
      }
      case Expr::Kind::Format:
        return infer_format(e);
    }
    return types_.fresh_var();
  }

  int infer_binary(Expr& e) {
    int lhs = infer(*e.children[0]);
    int rhs = infer(*e.children[1]);
    auto unify_operands = [&]() {
      types_.unify(lhs, rhs, e.span,
                   std::string("operands of '") + to_string(e.bop) + "'", "value-type");
    };
    switch (e.bop) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
        unify_operands();
        require(lhs, {Kind::Int, Kind::UInt, Kind::Float}, e.span,
                std::string("operands of '") + to_string(e.bop) + "'");
        return lhs;
      case BinaryOp::Rem:
        unify_operands();
        require(lhs, {Kind::Int, Kind::UInt}, e.span, "operands of '%'");
        return lhs;
      case BinaryOp::Pow:
        types_.unify(lhs, types_.simple(Kind::Float), e.span, "base of '**'", "value-type");
        types_.unify(rhs, types_.simple(Kind::Float), e.span, "exponent of '**'", "value-type");
        return types_.simple(Kind::Float);
      case BinaryOp::And:
      case BinaryOp::Or:
        types_.unify(lhs, types_.simple(Kind::Bool), e.children[0]->span,
                     std::string("operands of '") + to_string(e.bop) + "'", "value-type");
        types_.unify(rhs, types_.simple(Kind::Bool), e.children[1]->span,
                     std::string("operands of '") + to_string(e.bop) + "'", "value-type");
        return types_.simple(Kind::Bool);
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        unify_operands();
        require(lhs, {Kind::Int, Kind::UInt, Kind::Float, Kind::String}, e.span,
                "ordered comparison");
        return types_.simple(Kind::Bool);
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        unify_operands();
        return types_.simple(Kind::Bool);
    }
    return types_.fresh_var();
  }

  int infer_call(Expr& e) {
    if (e.name == "sqrt" || e.name == "sin" || e.name == "cos") {
      if (!e.children.empty()) {
        int a = infer(*e.children[0]);
        types_.unify(a, types_.simple(Kind::Float), e.span, "argument of " + e.name, "value-type");
      }
      return types_.simple(Kind::Float);
    }
    if (e.name == "abs") {
      if (e.children.empty()) return types_.fresh_var();
      int a = infer(*e.children[0]);
      require(a, {Kind::Int, Kind::UInt, Kind::Float}, e.span, "argument of abs");
      return a;
    }
    // min / max
    if (e.children.size() < 2) return types_.fresh_var();
    int a = infer(*e.children[0]);
    int b = infer(*e.children[1]);
    types_.unify(a, b, e.span, "arguments of " + e.name, "value-type");
    require(a, {Kind::Int, Kind::UInt, Kind::Float}, e.span, "arguments of " + e.name);
    return a;
  }

  int agg_result(Expr& e, int target, bool exact, bool window) {
    const char* ctx = window ? "sliding window" : "instance aggregation";
    int result;
    switch (e.agg_fn) {
      case AggFn::Count:
        result = types_.simple(Kind::UInt);
        break;
      case AggFn::Sum:
        require(target, {Kind::Int, Kind::UInt, Kind::Float}, e.span,
                std::string(ctx) + " sum target");
        result = target;
        break;
      case AggFn::Avg:
        types_.unify(target, types_.simple(Kind::Float), e.span,
                     std::string(ctx) + " avg target must be Float", "value-type");
        result = -1;  // optional(Float), below
        break;
      case AggFn::Min:
      case AggFn::Max:
        require(target, {Kind::Int, Kind::UInt, Kind::Float}, e.span,
                std::string(ctx) + " min/max target");
        result = -1;
        break;
      case AggFn::Exists:
      case AggFn::Forall:
        types_.unify(target, types_.simple(Kind::Bool), e.span,
                     std::string(ctx) + " exists/forall target must be Bool", "value-type");
        result = types_.simple(Kind::Bool);
        break;
    }
    // avg/min/max have no neutral element: the result is optional even for
    // plain `over`. `over_exactly` is optional for every function.
    if (result == -1) {
      int inner = e.agg_fn == AggFn::Avg ? types_.simple(Kind::Float) : target;
      return types_.con(Kind::Optional, {inner});
    }
    if (exact) return types_.con(Kind::Optional, {result});
    return result;
  }

  int infer_format(Expr& e) {
    Expr& base = *e.children[0];
    if (base.kind != Expr::Kind::StringLit) {
      diags_.error("value-type", "format applies to a string literal template", base.span);
      for (size_t i = 1; i < e.children.size(); ++i) infer(*e.children[i]);
      return types_.simple(Kind::String);
    }
    expr_nodes_[&base] = types_.simple(Kind::String);
    size_t placeholders = 0;
    for (size_t i = 0; i + 1 < base.text.size(); ++i)
      if (base.text[i] == '{' && base.text[i + 1] == '}') ++placeholders;
    if (placeholders != e.children.size() - 1) {
      diags_.error("value-type",
                   "format template has " + std::to_string(placeholders) + " placeholder(s) but " +
                       std::to_string(e.children.size() - 1) + " argument(s)",
                   e.span);
    }
    for (size_t i = 1; i < e.children.size(); ++i) {
      int a = infer(*e.children[i]);
      require(a, {Kind::Int, Kind::UInt, Kind::Float, Kind::Bool, Kind::String}, e.children[i]->span,
              "format argument");
    }
    return types_.simple(Kind::String);
  }

  void solve_projections() {
    bool progress = true;
    std::vector<bool> done(projections_.size(), false);
    while (progress) {
      progress = false;
      for (size_t i = 0; i < projections_.size(); ++i) {
        if (done[i]) continue;
        auto& p = projections_[i];
        if (!types_.head_known(p.base)) continue;
        int node = p.base;
        bool optional = false;
        if (types_.head_kind(node) == Kind::Optional) {
          optional = true;
          node = types_.head_args(node)[0];
          if (!types_.head_known(node)) continue;
        }
        if (types_.head_kind(node) != Kind::Tuple) {
          diags_.error("value-type", "projection applies to tuples; got " + types_.describe(p.base),
                       p.span);
          done[i] = true;
          progress = true;
          continue;
        }
        const auto& args = types_.head_args(node);
        if (p.index >= args.size()) {
          diags_.error("value-type",
                       "tuple has " + std::to_string(args.size()) + " elements; index " +
                           std::to_string(p.index) + " is out of range",
                       p.span);
          done[i] = true;
          progress = true;
          continue;
        }
        int elem = args[p.index];
        int rhs = optional ? types_.con(Kind::Optional, {elem}) : elem;
        types_.unify(p.result, rhs, p.span, "projection", "value-type");
        done[i] = true;
        progress = true;
      }
    }
    for (size_t i = 0; i < projections_.size(); ++i)
      if (!done[i])
        diags_.error("value-type", "cannot infer the tuple type under this projection",
                     projections_[i].span);
  }

  void finalize() {
    if (diags_.has_errors()) return;

    for (const auto& c : constraints_) {
      auto t = types_.resolve(c.node);
      Kind k = t ? t->kind : Kind::Int;  // unresolved int-poly defaults to Int
      if (t && t->kind == Kind::Optional) k = Kind::Optional;
      if (!c.allowed.count(k)) {
        diags_.error("value-type", c.what + ": type " + (t ? t->to_string() : "Int") +
                                       " is not supported here",
                     c.span);
      }
    }

    for (size_t i = 0; i < ast_.decls.size(); ++i) {
      Declaration& d = ast_.decls[i];
      auto t = types_.resolve(decl_node_[i]);
      if (!t) {
        if (d.is_stream() || d.kind == DeclKind::Constant)
          diags_.error("value-type", "cannot infer the type of '" + d.name + "'; annotate it",
                       d.span);
        continue;
      }
      if (t->is_optional() && d.is_stream()) {
        diags_.error("value-type",
                     "stream '" + d.name +
                         "' would carry an optional value; follow offset/hold chains with "
                         "defaults(to:) or hold(or:)",
                     d.span);
        continue;
      }
      table_.decl_type[i] = *t;
      for (size_t p = 0; p < d.params.size(); ++p) {
        auto pt = types_.resolve(param_nodes_[i][p]);
        if (!pt) {
          diags_.error("value-type",
                       "cannot infer the type of parameter '" + d.params[p] + "'", d.span);
          continue;
        }
        if (pt->kind != Kind::Int && pt->kind != Kind::UInt && pt->kind != Kind::Bool &&
            pt->kind != Kind::String) {
          diags_.error("parameter-type",
                       "parameter '" + d.params[p] + "' has type " + pt->to_string() +
                           "; parameters must be equality-comparable (Int, UInt, Bool or String)",
                       d.span);
          continue;
        }
        table_.param_types[i].push_back(*pt);
      }
    }
    if (diags_.has_errors()) return;

    for (auto& [expr, node] : expr_nodes_) {
      auto t = types_.resolve(node);
      if (t) {
        expr->type = *t;
      } else {
        diags_.error("value-type", "cannot infer the type of this expression", expr->span);
      }
    }
  }
};

}  // namespace

DiagnosticList infer_value_types(Ast& ast, TypeTable& table) {
  DiagnosticList diags;
  Checker c(ast, table, diags);
  c.run();
  return diags;
}

}  // namespace streamon
