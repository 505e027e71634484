#include "streamon/pacing.hpp"

#include <algorithm>
#include <numeric>

#include "streamon/printer.hpp"

namespace streamon {

bool BoolFormula::evaluate(const std::vector<bool>& assignment) const {
  switch (kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Var: return assignment[static_cast<size_t>(var)];
    case Kind::And:
      for (const auto& c : children)
        if (!c.evaluate(assignment)) return false;
      return true;
    case Kind::Or:
      for (const auto& c : children)
        if (c.evaluate(assignment)) return true;
      return false;
  }
  return false;
}

void BoolFormula::collect_vars(std::vector<int>& vars) const {
  if (kind == Kind::Var) vars.push_back(var);
  for (const auto& c : children) c.collect_vars(vars);
}

bool entails(const BoolFormula& lhs, const BoolFormula& rhs) {
  std::vector<int> vars;
  lhs.collect_vars(vars);
  rhs.collect_vars(vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > 20) return false;  // formulas are tiny in practice

  int max_var = vars.empty() ? 0 : vars.back();
  std::vector<bool> assignment(static_cast<size_t>(max_var) + 1, false);
  uint64_t combos = 1ull << vars.size();
  for (uint64_t m = 0; m < combos; ++m) {
    for (size_t i = 0; i < vars.size(); ++i)
      assignment[static_cast<size_t>(vars[i])] = (m >> i) & 1;
    if (lhs.evaluate(assignment) && !rhs.evaluate(assignment)) return false;
  }
  return true;
}

namespace {

std::string formula_to_string(const BoolFormula& f, const Ast& ast, int parent_prec) {
  switch (f.kind) {
    case BoolFormula::Kind::True: return "true";
    case BoolFormula::Kind::False: return "false";
    case BoolFormula::Kind::Var: return ast.decls[static_cast<size_t>(f.var)].name;
    case BoolFormula::Kind::And: {
      std::string s;
      for (size_t i = 0; i < f.children.size(); ++i) {
        if (i) s += " && ";
        s += formula_to_string(f.children[i], ast, 2);
      }
      if (f.children.empty()) return "true";
      return parent_prec > 1 && f.children.size() > 1 ? "(" + s + ")" : s;
    }
    case BoolFormula::Kind::Or: {
      std::string s;
      for (size_t i = 0; i < f.children.size(); ++i) {
        if (i) s += " || ";
        s += formula_to_string(f.children[i], ast, 1);
      }
      if (f.children.empty()) return "false";
      return parent_prec > 0 && f.children.size() > 1 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace

std::string PacingType::to_string(const Ast& ast) const {
  if (kind == Kind::Periodic) {
    std::string s = "@" + period_to_string(period_ns) + "@";
    if (spawn_anchored) s += " (from spawn)";
    return s;
  }
  return "@" + formula_to_string(formula, ast, 0) + "@";
}

namespace {

BoolFormula formula_from_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::BoolLit:
      return BoolFormula::constant(e.bool_value);
    case Expr::Kind::Name:
      return BoolFormula::variable(e.decl_ref);
    case Expr::Kind::Binary: {
      std::vector<BoolFormula> cs;
      cs.push_back(formula_from_expr(*e.children[0]));
      cs.push_back(formula_from_expr(*e.children[1]));
      return e.bop == BinaryOp::And ? BoolFormula::conj(std::move(cs))
                                    : BoolFormula::disj(std::move(cs));
    }
    default:
      return BoolFormula::constant(true);  // unreachable on resolved input
  }
}

uint64_t lcm_period(uint64_t a, uint64_t b) {
  unsigned __int128 l = static_cast<unsigned __int128>(a) / std::gcd(a, b) * b;
  if (l > UINT64_MAX) return 0;
  return static_cast<uint64_t>(l);
}

class PacingInference {
 public:
  PacingInference(const Ast& ast, PacingTable& table, DiagnosticList& diags)
      : ast_(ast), table_(table), diags_(diags) {}

  void run() {
    size_t n = ast_.decls.size();
    table_.decls.assign(n, {});
    resolved_.assign(n, {false, false, false});

    for (size_t i = 0; i < n; ++i) {
      const Declaration& d = ast_.decls[i];
      if (d.kind == DeclKind::Input) {
        table_.decls[i].eval = PacingType::event(BoolFormula::variable(static_cast<int>(i)));
        mark(i, ClauseKind::Eval);
        continue;
      }
      if (d.kind == DeclKind::Constant) continue;
      init_annotated(static_cast<int>(i), d.spawn, ClauseKind::Spawn);
      init_annotated(static_cast<int>(i), d.eval, ClauseKind::Eval);
      init_annotated(static_cast<int>(i), d.close, ClauseKind::Close);
    }

    // Fixpoint over unannotated clauses; each round resolves clauses whose
    // synchronously accessed streams all have a known pacing.
    bool progress = true;
    while (progress) {
      progress = false;
      for (size_t i = 0; i < n; ++i) {
        const Declaration& d = ast_.decls[i];
        if (d.kind != DeclKind::Output && d.kind != DeclKind::Trigger) continue;
        progress |= try_resolve(static_cast<int>(i), d.spawn, ClauseKind::Spawn);
        progress |= try_resolve(static_cast<int>(i), d.eval, ClauseKind::Eval);
        progress |= try_resolve(static_cast<int>(i), d.close, ClauseKind::Close);
      }
    }

    for (size_t i = 0; i < n; ++i) {
      const Declaration& d = ast_.decls[i];
      if (d.kind != DeclKind::Output && d.kind != DeclKind::Trigger) continue;
      report_unresolved(static_cast<int>(i), d.spawn, ClauseKind::Spawn, "spawn");
      report_unresolved(static_cast<int>(i), d.eval, ClauseKind::Eval, "eval");
      report_unresolved(static_cast<int>(i), d.close, ClauseKind::Close, "close");
    }
  }

 private:
  const Ast& ast_;
  PacingTable& table_;
  DiagnosticList& diags_;
  struct Flags { bool spawn, eval, close; };
  std::vector<Flags> resolved_;

  bool is_resolved(size_t decl, ClauseKind c) const {
    const Flags& f = resolved_[decl];
    return c == ClauseKind::Spawn ? f.spawn : c == ClauseKind::Eval ? f.eval : f.close;
  }
  void mark(size_t decl, ClauseKind c) {
    Flags& f = resolved_[decl];
    (c == ClauseKind::Spawn ? f.spawn : c == ClauseKind::Eval ? f.eval : f.close) = true;
  }
  void set(size_t decl, ClauseKind c, PacingType p) {
    auto& slot = c == ClauseKind::Spawn ? table_.decls[decl].spawn
                 : c == ClauseKind::Eval ? table_.decls[decl].eval
                                         : table_.decls[decl].close;
    slot = std::move(p);
    mark(decl, c);
  }

  void init_annotated(int decl, const std::optional<Clause>& c, ClauseKind ck) {
    if (!c) {
      mark(static_cast<size_t>(decl), ck);  // nothing to infer
      return;
    }
    if (!c->pacing) return;
    if (c->pacing->is_periodic()) {
      bool spawn_rel = ast_.decls[static_cast<size_t>(decl)].spawn.has_value() &&
                       ck != ClauseKind::Spawn;
      set(static_cast<size_t>(decl), ck, PacingType::periodic(c->pacing->period_ns, spawn_rel));
    } else {
      set(static_cast<size_t>(decl), ck, PacingType::event(formula_from_expr(*c->pacing->formula)));
    }
  }

  bool relevant(const StreamAccess& a) const {
    return a.kind == AccessKind::Sync || a.kind == AccessKind::Offset ||
           a.kind == AccessKind::AggFresh;
  }

  bool try_resolve(int decl, const std::optional<Clause>& c, ClauseKind ck) {
    size_t di = static_cast<size_t>(decl);
    if (!c || is_resolved(di, ck)) return false;

    std::vector<const PacingType*> operands;
    bool blocked = false;
    for (const auto& a : collect_accesses(ast_, ast_.decls[di], ck)) {
      if (!relevant(a)) continue;
      if (a.target == decl && ck == ClauseKind::Eval) continue;  // self accesses share the pacing
      size_t t = static_cast<size_t>(a.target);
      if (!resolved_[t].eval || !table_.decls[t].eval) {
        blocked = true;
        continue;
      }
      operands.push_back(&*table_.decls[t].eval);
    }
    if (blocked) return false;
    if (operands.empty()) {
      // No synchronous access to infer from; reported after the fixpoint.
      return false;
    }

    bool any_event = false, any_periodic = false;
    for (const auto* p : operands) (p->is_event() ? any_event : any_periodic) = true;
    if (any_event && any_periodic) {
      diags_.error("pacing-mixed",
                   "clause of '" + ast_.decls[di].name +
                       "' mixes event-based and periodic accesses; annotate the pacing",
                   c->span);
      set(di, ck, PacingType::event(BoolFormula::constant(true)));
      return true;
    }
    if (any_event) {
      std::vector<BoolFormula> fs;
      for (const auto* p : operands) fs.push_back(p->formula);
      set(di, ck, PacingType::event(fs.size() == 1 ? fs.front() : BoolFormula::conj(std::move(fs))));
      return true;
    }
    uint64_t period = operands.front()->period_ns;
    bool spawn_rel = operands.front()->spawn_anchored;
    bool ok = true;
    for (const auto* p : operands) {
      if (p->spawn_anchored != spawn_rel) ok = false;
      period = lcm_period(period, p->period_ns);
      if (period == 0) ok = false;
    }
    if (!ok) {
      diags_.error("pacing-mixed",
                   "clause of '" + ast_.decls[di].name +
                       "' combines incompatible periodic pacings; annotate the pacing",
                   c->span);
      set(di, ck, PacingType::periodic(operands.front()->period_ns, spawn_rel));
      return true;
    }
    // A spawned stream anchors its period at spawn time.
    spawn_rel = ast_.decls[di].spawn.has_value() && ck != ClauseKind::Spawn;
    set(di, ck, PacingType::periodic(period, spawn_rel));
    return true;
  }

  void report_unresolved(int decl, const std::optional<Clause>& c, ClauseKind ck, const char* word) {
    size_t di = static_cast<size_t>(decl);
    if (!c || is_resolved(di, ck)) return;
    diags_.error("pacing-underdetermined",
                 std::string(word) + " clause of '" + ast_.decls[di].name +
                     "' has no pacing annotation and no synchronous access to infer one from",
                 c->span);
    set(di, ck, PacingType::event(BoolFormula::constant(true)));
  }
};

}  // namespace

DiagnosticList infer_pacing_types(const Ast& ast, PacingTable& table) {
  DiagnosticList diags;
  PacingInference inf(ast, table, diags);
  inf.run();
  return diags;
}

DiagnosticList check_pacing_access(const Ast& ast, const PacingTable& table) {
  DiagnosticList diags;
  for (size_t i = 0; i < ast.decls.size(); ++i) {
    const Declaration& d = ast.decls[i];
    if (d.kind != DeclKind::Output && d.kind != DeclKind::Trigger) continue;
    for (ClauseKind ck : {ClauseKind::Spawn, ClauseKind::Eval, ClauseKind::Close}) {
      const auto& pacing = table.of(static_cast<int>(i), ck);
      for (const auto& a : collect_accesses(ast, d, ck)) {
        if (a.kind == AccessKind::Hold || a.kind == AccessKind::Window ||
            a.kind == AccessKind::AggAll)
          continue;
        const Declaration& target = ast.decls[static_cast<size_t>(a.target)];

        // The spawn phase runs before any output evaluates, so spawn clauses
        // can only read outputs through hold/window accesses.
        if (ck == ClauseKind::Spawn && target.kind != DeclKind::Input) {
          diags.error("spawn-access",
                      "spawn clause of '" + d.name + "' accesses '" + target.name +
                          "' synchronously; spawn clauses may only access inputs this way (use "
                          "hold)",
                      a.span);
          continue;
        }
        if (!pacing || !table.decls[static_cast<size_t>(a.target)].eval) continue;
        const PacingType& pa = *pacing;
        const PacingType& pb = *table.decls[static_cast<size_t>(a.target)].eval;

        if (pa.is_event() != pb.is_event()) {
          diags.error("event-periodic-access",
                      "'" + d.name + "' accesses '" + target.name +
                          "' synchronously; accesses between periodic and event-based streams "
                          "are never valid (use hold or a window)",
                      a.span);
          continue;
        }
        if (pa.is_event()) {
          if (!entails(pa.formula, pb.formula)) {
            diags.error("pacing-access",
                        "'" + d.name + "' accesses '" + target.name +
                            "', but its activation condition " + pa.to_string(ast) +
                            " does not entail " + pb.to_string(ast),
                        a.span);
          }
        } else {
          if (pa.spawn_anchored != pb.spawn_anchored) {
            diags.error("periodic-access",
                        "'" + d.name + "' accesses '" + target.name +
                            "', but their periods are anchored differently",
                        a.span);
          } else if (pa.period_ns % pb.period_ns != 0) {
            diags.error("periodic-access",
                        "'" + d.name + "' (" + pa.to_string(ast) + ") accesses '" + target.name +
                            "' (" + pb.to_string(ast) +
                            "), which is not evaluated at every instant of the accessor",
                        a.span);
          }
        }
      }
    }
  }
  return diags;
}

}  // namespace streamon
