#ifndef STREAMON_PACING_HPP
#define STREAMON_PACING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamon/ast.hpp"
#include "streamon/diagnostics.hpp"
#include "streamon/graph.hpp"

namespace streamon {

// Positive propositional formula over input streams (by declaration index).
struct BoolFormula {
  enum class Kind { True, False, Var, And, Or };
  Kind kind = Kind::True;
  int var = -1;
  std::vector<BoolFormula> children;

  static BoolFormula constant(bool v) { return BoolFormula{v ? Kind::True : Kind::False, -1, {}}; }
  static BoolFormula variable(int idx) { return BoolFormula{Kind::Var, idx, {}}; }
  static BoolFormula conj(std::vector<BoolFormula> cs) {
    return BoolFormula{Kind::And, -1, std::move(cs)};
  }
  static BoolFormula disj(std::vector<BoolFormula> cs) {
    return BoolFormula{Kind::Or, -1, std::move(cs)};
  }

  bool evaluate(const std::vector<bool>& assignment) const;
  void collect_vars(std::vector<int>& vars) const;
};

// Exact propositional entailment (lhs -> rhs is a tautology), decided by
// truth table over the formula variables.
bool entails(const BoolFormula& lhs, const BoolFormula& rhs);

struct PacingType {
  enum class Kind { Event, Periodic };
  Kind kind = Kind::Event;
  BoolFormula formula;          // Event
  uint64_t period_ns = 0;       // Periodic
  bool spawn_anchored = false;  // Periodic: anchored at instance spawn time

  static PacingType event(BoolFormula f) { return {Kind::Event, std::move(f), 0, false}; }
  static PacingType periodic(uint64_t ns, bool spawn_rel) {
    return {Kind::Periodic, BoolFormula::constant(true), ns, spawn_rel};
  }
  bool is_event() const { return kind == Kind::Event; }

  std::string to_string(const Ast& ast) const;
};

struct PacingTable {
  struct DeclPacing {
    std::optional<PacingType> spawn, eval, close;
  };
  std::vector<DeclPacing> decls;

  const std::optional<PacingType>& of(int decl, ClauseKind c) const {
    switch (c) {
      case ClauseKind::Spawn: return decls[decl].spawn;
      case ClauseKind::Close: return decls[decl].close;
      default: return decls[decl].eval;
    }
  }
};

// Explicit annotations are taken as declared; unannotated clauses receive the
// conjunction of the pacing of every synchronously accessed stream. Inputs
// pace themselves.
DiagnosticList infer_pacing_types(const Ast& ast, PacingTable& table);

// Validates every synchronous access: event formulas must entail the accessed
// stream's activation condition; periodic accesses need an anchor-compatible
// period that divides the accessor's. Hold and window accesses are exempt.
DiagnosticList check_pacing_access(const Ast& ast, const PacingTable& table);

}  // namespace streamon

#endif
