#ifndef STREAMON_GRAPH_HPP
#define STREAMON_GRAPH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "streamon/ast.hpp"
#include "streamon/diagnostics.hpp"

namespace streamon {

enum class ClauseKind { Spawn, Eval, Close };

enum class AccessKind { Sync, Offset, Hold, Window, AggAll, AggFresh };

// One stream access occurring somewhere in a clause expression.
struct StreamAccess {
  int target = -1;          // decl index of the accessed stream
  AccessKind kind = AccessKind::Sync;
  int64_t offset = 0;       // negative, Offset only
  const Expr* node = nullptr;          // the Name/Instance/aggregate node
  const Expr* instance_args = nullptr; // Instance node when the access has arguments
  SourceSpan span;
};

// Collects every stream access in the given clause of a resolved declaration.
std::vector<StreamAccess> collect_accesses(const Ast& ast, const Declaration& d, ClauseKind clause);

enum class EdgeKind { Sync, Offset, Hold, Window, InstanceAgg, SpawnAccess, CloseAccess };

struct Edge {
  int from = -1;            // accessing stream (decl index)
  int to = -1;              // accessed stream
  int64_t weight = 0;       // non-positive; offset accesses carry the offset
  EdgeKind kind = EdgeKind::Sync;
  bool fresh_agg = false;   // InstanceAgg only
  unsigned clause_mask = 0; // bit per ClauseKind the access occurs in
};

struct DependencyGraph {
  std::vector<int> streams;  // decl indices of inputs, outputs and triggers
  std::vector<Edge> edges;   // deduplicated on (from, to, weight, kind, fresh)
};

struct MemoryBounds {
  std::map<int, int64_t> per_stream;  // past values retained beyond the current one
  int64_t total = 0;
  int64_t bound(int decl) const {
    auto it = per_stream.find(decl);
    return it == per_stream.end() ? 0 : it->second;
  }
};

struct EvaluationOrder {
  std::vector<std::vector<int>> layers;  // decl indices, earlier layers first
  std::map<int, int> layer_of;
};

DependencyGraph build_dependency_graph(const Ast& ast);

// Accepts iff no cycle consisting solely of weight-0 evaluation-ordering
// edges exists. Offset edges have negative weight and therefore never close
// a zero-weight cycle; hold and window accesses read committed state and are
// exempt.
DiagnosticList check_well_formed(const Ast& ast, const DependencyGraph& g);

MemoryBounds compute_memory_bounds(const Ast& ast, const DependencyGraph& g);

EvaluationOrder compute_evaluation_order(const Ast& ast, const DependencyGraph& g);

std::string graph_to_dot(const Ast& ast, const DependencyGraph& g);

}  // namespace streamon

#endif
