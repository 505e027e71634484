#include "streamon/resolver.hpp"

namespace streamon {

namespace {

class Resolver {
 public:
  Resolver(Ast& ast, DiagnosticList& diags) : ast_(ast), diags_(diags) {}

  void run() {
    for (size_t i = 0; i < ast_.decls.size(); ++i) {
      Declaration& d = ast_.decls[i];
      current_ = &d;
      if (d.kind == DeclKind::Input) {
        if (!d.type_annotation)
          diags_.error("syntax", "input '" + d.name + "' needs a type annotation", d.span);
        continue;
      }
      if (d.kind == DeclKind::Constant) continue;
      resolve_clause(d.spawn);
      resolve_clause(d.eval);
      resolve_clause(d.close);
      if (d.spawn && d.spawn->with) check_spawn_arity(d);
      if (d.spawn && !d.spawn->with && !d.params.empty())
        diags_.error("arity",
                     "parameterized stream '" + d.name + "' needs a spawn clause with a with-expression",
                     d.span);
      if (!d.spawn && !d.params.empty())
        diags_.error("arity", "parameterized stream '" + d.name + "' needs a spawn clause", d.span);
    }
  }

 private:
  Ast& ast_;
  DiagnosticList& diags_;
  Declaration* current_ = nullptr;

  void resolve_clause(std::optional<Clause>& c) {
    if (!c) return;
    if (c->pacing && c->pacing->formula) resolve_pacing_formula(*c->pacing->formula);
    if (c->when) resolve_expr(*c->when);
    if (c->with) resolve_expr(*c->with);
  }

  void check_spawn_arity(Declaration& d) {
    size_t n = d.params.size();
    const Expr& w = *d.spawn->with;
    size_t given = w.kind == Expr::Kind::TupleLit ? w.children.size() : 1;
    if (n == 0) {
      diags_.error("arity", "stream '" + d.name + "' has no parameters but a spawn with-expression",
                   w.span);
    } else if (given != n) {
      diags_.error("arity",
                   "spawn with-expression of '" + d.name + "' provides " + std::to_string(given) +
                       " values for " + std::to_string(n) + " parameters",
                   w.span);
    }
  }

  // Pacing formulas may only mention input streams (or `true`).
  void resolve_pacing_formula(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::BoolLit:
        if (!e.bool_value)
          diags_.error("pacing-formula", "pacing formulas are positive; 'false' is not allowed",
                       e.span);
        return;
      case Expr::Kind::Name: {
        int idx = ast_.index_of(e.name);
        if (idx < 0) {
          diags_.error("unknown-name", "unknown stream '" + e.name + "' in pacing annotation", e.span);
          return;
        }
        if (ast_.decls[idx].kind != DeclKind::Input) {
          diags_.error("pacing-formula",
                       "pacing formulas mention input streams only ('" + e.name + "' is not an input)",
                       e.span);
          return;
        }
        e.decl_ref = idx;
        return;
      }
      case Expr::Kind::Binary:
        if (e.bop == BinaryOp::And || e.bop == BinaryOp::Or) {
          resolve_pacing_formula(*e.children[0]);
          resolve_pacing_formula(*e.children[1]);
          return;
        }
        break;
      default:
        break;
    }
    diags_.error("pacing-formula",
                 "pacing annotations are positive formulas over input streams (&& and || only)",
                 e.span);
  }

  int find_param(const std::string& name) const {
    for (size_t i = 0; i < current_->params.size(); ++i)
      if (current_->params[i] == name) return static_cast<int>(i);
    return -1;
  }

  void unknown_name(const Expr& e) {
    // Point at a parameter of another stream when that is what the name is.
    for (const auto& d : ast_.decls) {
      for (const auto& p : d.params) {
        if (p == e.name && &d != current_) {
          diags_.error("unknown-name",
                       "'" + e.name + "' is a parameter of '" + d.name +
                           "' and cannot be used outside its declaring stream",
                       e.span);
          return;
        }
      }
    }
    diags_.error("unknown-name", "unknown identifier '" + e.name + "'", e.span);
  }

  void resolve_expr(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Name: {
        int p = find_param(e.name);
        if (p >= 0) {
          e.param_ref = p;
          return;
        }
        int idx = ast_.index_of(e.name);
        if (idx < 0) {
          unknown_name(e);
          return;
        }
        const Declaration& target = ast_.decls[idx];
        if (target.kind == DeclKind::Trigger) {
          diags_.error("unknown-name", "trigger streams cannot be accessed", e.span);
          return;
        }
        if (target.is_stream() && !target.params.empty()) {
          diags_.error("arity",
                       "parameterized stream '" + e.name + "' is accessed without arguments", e.span);
          return;
        }
        e.decl_ref = idx;
        return;
      }
      case Expr::Kind::Instance: {
        int idx = ast_.index_of(e.name);
        if (idx < 0) {
          diags_.error("unknown-name", "unknown stream or function '" + e.name + "'", e.span);
          return;
        }
        const Declaration& target = ast_.decls[idx];
        if (target.kind != DeclKind::Output) {
          diags_.error("arity", "'" + e.name + "' is not a parameterized output stream", e.span);
          return;
        }
        if (target.params.size() != e.children.size()) {
          diags_.error("arity",
                       "'" + e.name + "' takes " + std::to_string(target.params.size()) +
                           " parameter(s) but " + std::to_string(e.children.size()) + " were given",
                       e.span);
        }
        if (target.params.empty()) {
          diags_.error("arity", "'" + e.name + "' is not parameterized", e.span);
        }
        e.decl_ref = idx;
        for (auto& c : e.children) resolve_expr(*c);
        return;
      }
      case Expr::Kind::Call: {
        if (!ast_.math_imported) {
          diags_.error("unknown-name",
                       "function '" + e.name + "' requires 'import math'", e.span);
        }
        size_t want = (e.name == "min" || e.name == "max") ? 2 : 1;
        if (e.children.size() != want)
          diags_.error("arity", "'" + e.name + "' takes " + std::to_string(want) + " argument(s)",
                       e.span);
        for (auto& c : e.children) resolve_expr(*c);
        return;
      }
      case Expr::Kind::InstanceAgg: {
        int idx = ast_.index_of(e.name);
        if (idx < 0) {
          diags_.error("unknown-name", "unknown stream '" + e.name + "'", e.span);
          return;
        }
        if (ast_.decls[idx].kind != DeclKind::Output || ast_.decls[idx].params.empty()) {
          diags_.error("instance-aggregation",
                       "instance aggregations require a parameterized output stream", e.span);
          return;
        }
        e.decl_ref = idx;
        return;
      }
      case Expr::Kind::Offset:
      case Expr::Kind::Hold: {
        Expr& base = *e.children[0];
        if (base.kind != Expr::Kind::Name && base.kind != Expr::Kind::Instance) {
          diags_.error("stream-access",
                       e.kind == Expr::Kind::Offset ? "offset applies to a stream access"
                                                    : "hold applies to a stream access",
                       e.span);
        }
        for (auto& c : e.children) resolve_expr(*c);
        check_stream_base(base, e.span);
        return;
      }
      case Expr::Kind::WindowAgg: {
        Expr& base = *e.children[0];
        if (base.kind != Expr::Kind::Name && base.kind != Expr::Kind::Instance) {
          diags_.error("stream-access", "sliding windows apply to a stream access", e.span);
          return;
        }
        resolve_expr(base);
        check_stream_base(base, e.span);
        // Push-based window state needs a per-instance constant target, so
        // arguments are restricted to parameters and literal values.
        if (base.kind == Expr::Kind::Instance) {
          for (const auto& arg : base.children) {
            if (!is_window_arg(*arg))
              diags_.error("window-args",
                           "window target arguments must be parameters or literal values",
                           arg->span);
          }
        }
        return;
      }
      default:
        for (auto& c : e.children) resolve_expr(*c);
        return;
    }
  }

  bool is_window_arg(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::IntLit:
      case Expr::Kind::FloatLit:
      case Expr::Kind::BoolLit:
      case Expr::Kind::StringLit:
        return true;
      case Expr::Kind::Name:
        return e.param_ref >= 0 ||
               (e.decl_ref >= 0 && ast_.decls[e.decl_ref].kind == DeclKind::Constant);
      default:
        return false;
    }
  }

  void check_stream_base(const Expr& base, SourceSpan span) {
    if (base.kind == Expr::Kind::Name && base.decl_ref >= 0 &&
        ast_.decls[base.decl_ref].kind == DeclKind::Constant) {
      diags_.error("stream-access", "constants are plain values, not streams", span);
    }
    if (base.kind == Expr::Kind::Name && base.param_ref >= 0) {
      diags_.error("stream-access", "parameters are plain values, not streams", span);
    }
  }
};

}  // namespace

DiagnosticList resolve_names(Ast& ast) {
  DiagnosticList diags;
  Resolver r(ast, diags);
  r.run();
  return diags;
}

}  // namespace streamon
