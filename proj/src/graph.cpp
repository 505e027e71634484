#include "streamon/graph.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace streamon {

namespace {

class AccessWalker {
 public:
  AccessWalker(const Ast& ast, std::vector<StreamAccess>& out) : ast_(ast), out_(out) {}

  void walk(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Offset: {
        record_base(*e.children[0], AccessKind::Offset, e.offset_amount, e.span);
        return;
      }
      case Expr::Kind::Hold: {
        record_base(*e.children[0], AccessKind::Hold, 0, e.span);
        if (e.children.size() > 1) walk(*e.children[1]);
        return;
      }
      case Expr::Kind::WindowAgg: {
        record_base(*e.children[0], AccessKind::Window, 0, e.span);
        return;
      }
      case Expr::Kind::InstanceAgg: {
        if (e.decl_ref >= 0) {
          out_.push_back({e.decl_ref,
                          e.inst_sel == InstanceSel::Fresh ? AccessKind::AggFresh : AccessKind::AggAll,
                          0, &e, nullptr, e.span});
        }
        return;
      }
      case Expr::Kind::Name: {
        if (e.decl_ref >= 0 && ast_.decls[e.decl_ref].is_stream())
          out_.push_back({e.decl_ref, AccessKind::Sync, 0, &e, nullptr, e.span});
        return;
      }
      case Expr::Kind::Instance: {
        if (e.decl_ref >= 0)
          out_.push_back({e.decl_ref, AccessKind::Sync, 0, &e, &e, e.span});
        for (const auto& c : e.children) walk(*c);
        return;
      }
      default:
        for (const auto& c : e.children) walk(*c);
        return;
    }
  }

 private:
  const Ast& ast_;
  std::vector<StreamAccess>& out_;

  // Base of an offset/hold/window chain: a Name or Instance node.
  void record_base(const Expr& base, AccessKind kind, int64_t offset, SourceSpan span) {
    if (base.kind == Expr::Kind::Name) {
      if (base.decl_ref >= 0 && ast_.decls[base.decl_ref].is_stream())
        out_.push_back({base.decl_ref, kind, offset, &base, nullptr, span});
      return;
    }
    if (base.kind == Expr::Kind::Instance) {
      if (base.decl_ref >= 0)
        out_.push_back({base.decl_ref, kind, offset, &base, &base, span});
      for (const auto& c : base.children) walk(*c);  // argument expressions
      return;
    }
    walk(base);
  }
};

}  // namespace

std::vector<StreamAccess> collect_accesses(const Ast& ast, const Declaration& d, ClauseKind clause) {
  std::vector<StreamAccess> out;
  AccessWalker w(ast, out);
  const std::optional<Clause>* c = nullptr;
  switch (clause) {
    case ClauseKind::Spawn: c = &d.spawn; break;
    case ClauseKind::Eval: c = &d.eval; break;
    case ClauseKind::Close: c = &d.close; break;
  }
  if (!c->has_value()) return out;
  if ((*c)->when) w.walk(*(*c)->when);
  if ((*c)->with) w.walk(*(*c)->with);
  return out;
}

DependencyGraph build_dependency_graph(const Ast& ast) {
  DependencyGraph g;
  for (size_t i = 0; i < ast.decls.size(); ++i)
    if (ast.decls[i].is_stream()) g.streams.push_back(static_cast<int>(i));

  auto add = [&](int from, const StreamAccess& a, ClauseKind clause) {
    Edge e;
    e.from = from;
    e.to = a.target;
    e.weight = a.kind == AccessKind::Offset ? a.offset : 0;
    e.fresh_agg = a.kind == AccessKind::AggFresh;
    switch (a.kind) {
      case AccessKind::Sync:
        e.kind = clause == ClauseKind::Eval ? EdgeKind::Sync
                 : clause == ClauseKind::Spawn ? EdgeKind::SpawnAccess
                                               : EdgeKind::CloseAccess;
        break;
      case AccessKind::Offset: e.kind = EdgeKind::Offset; break;
      case AccessKind::Hold: e.kind = EdgeKind::Hold; break;
      case AccessKind::Window: e.kind = EdgeKind::Window; break;
      case AccessKind::AggAll:
      case AccessKind::AggFresh: e.kind = EdgeKind::InstanceAgg; break;
    }
    e.clause_mask = 1u << static_cast<unsigned>(clause);
    for (auto& existing : g.edges) {
      if (existing.from == e.from && existing.to == e.to && existing.weight == e.weight &&
          existing.kind == e.kind && existing.fresh_agg == e.fresh_agg) {
        existing.clause_mask |= e.clause_mask;
        return;
      }
    }
    g.edges.push_back(e);
  };

  for (size_t i = 0; i < ast.decls.size(); ++i) {
    const Declaration& d = ast.decls[i];
    if (!d.is_stream() || d.kind == DeclKind::Input) continue;
    for (ClauseKind ck : {ClauseKind::Spawn, ClauseKind::Eval, ClauseKind::Close})
      for (const auto& a : collect_accesses(ast, d, ck))
        add(static_cast<int>(i), a, ck);
  }
  return g;
}

namespace {

// Edges that order evaluation within a cycle: synchronous eval accesses and
// fresh-instance aggregations (they read values produced this cycle).
bool is_ordering_edge(const Edge& e) {
  if (e.kind == EdgeKind::Sync) return true;
  if (e.kind == EdgeKind::InstanceAgg && e.fresh_agg &&
      (e.clause_mask & (1u << static_cast<unsigned>(ClauseKind::Eval))))
    return true;
  return false;
}

// Soft preferences: hold/window/all-instance reads see the freshest committed
// value when the producer runs first, so order them when that stays acyclic.
bool is_soft_edge(const Edge& e) {
  if (!(e.clause_mask & (1u << static_cast<unsigned>(ClauseKind::Eval)))) return false;
  return e.kind == EdgeKind::Hold || e.kind == EdgeKind::Window ||
         (e.kind == EdgeKind::InstanceAgg && !e.fresh_agg);
}

}  // namespace

DiagnosticList check_well_formed(const Ast& ast, const DependencyGraph& g) {
  DiagnosticList diags;
  // Zero-weight cycle detection on the weight-0 ordering subgraph. Every
  // edge weight is non-positive, so a cycle sums to zero exactly when all of
  // its edges weigh zero.
  std::map<int, std::vector<int>> adj;
  for (const auto& e : g.edges)
    if (is_ordering_edge(e) && e.weight == 0) adj[e.from].push_back(e.to);

  std::map<int, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::vector<int> stack;
  std::vector<int> cycle;

  std::function<bool(int)> dfs = [&](int v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    for (int w : adj[v]) {
      if (state[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        return true;
      }
      if (state[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };

  for (int s : g.streams) {
    if (state[s] == 0 && dfs(s)) {
      std::sort(cycle.begin(), cycle.end());
      std::string names;
      for (int v : cycle) {
        if (!names.empty()) names += ", ";
        names += ast.decls[v].name;
      }
      diags.error("zero-weight-cycle",
                  "accumulated edge weight of the cycle through {" + names +
                      "} is zero; no evaluation order exists",
                  ast.decls[cycle.front()].span);
      return diags;
    }
  }
  return diags;
}

MemoryBounds compute_memory_bounds(const Ast& ast, const DependencyGraph& g) {
  MemoryBounds b;
  for (int s : g.streams) b.per_stream[s] = 0;
  for (const auto& e : g.edges) {
    int64_t need = -e.weight;
    auto& cur = b.per_stream[e.to];
    if (need > cur) cur = need;
  }
  b.total = 0;
  for (auto& [decl, bound] : b.per_stream) b.total += bound;
  (void)ast;
  return b;
}

EvaluationOrder compute_evaluation_order(const Ast& ast, const DependencyGraph& g) {
  // Hard constraints: ordering edges. Soft constraints: hold/window/all-agg
  // eval reads, kept only when they do not close a cycle (detected per
  // strongly connected component of the combined graph).
  std::map<int, std::vector<int>> combined;
  for (const auto& e : g.edges)
    if (is_ordering_edge(e) || is_soft_edge(e)) combined[e.from].push_back(e.to);

  // Tarjan SCC.
  std::map<int, int> index, low, comp;
  std::vector<int> stack;
  std::map<int, bool> on_stack;
  int counter = 0, comp_count = 0;
  std::function<void(int)> strongconnect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : combined[v]) {
      if (!index.count(w)) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int c = comp_count++;
      for (;;) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = c;
        if (w == v) break;
      }
    }
  };
  for (int s : g.streams)
    if (!index.count(s)) strongconnect(s);

  std::map<int, std::vector<int>> adj;
  for (const auto& e : g.edges) {
    if (is_ordering_edge(e)) {
      adj[e.from].push_back(e.to);
    } else if (is_soft_edge(e) && comp[e.from] != comp[e.to]) {
      adj[e.from].push_back(e.to);
    }
  }

  EvaluationOrder order;
  std::map<int, int> layer;
  std::function<int(int)> depth = [&](int v) -> int {
    auto it = layer.find(v);
    if (it != layer.end()) return it->second;
    layer[v] = 0;  // break would-be cycles defensively; hard edges are acyclic
    int d = 0;
    for (int w : adj[v]) d = std::max(d, depth(w) + 1);
    layer[v] = d;
    return d;
  };

  int max_layer = 0;
  for (int s : g.streams) max_layer = std::max(max_layer, depth(s));
  order.layers.assign(static_cast<size_t>(max_layer) + 1, {});
  for (int s : g.streams) {
    order.layers[static_cast<size_t>(layer[s])].push_back(s);
    order.layer_of[s] = layer[s];
  }
  for (auto& l : order.layers) std::sort(l.begin(), l.end());  // declaration order
  (void)ast;
  return order;
}

std::string graph_to_dot(const Ast& ast, const DependencyGraph& g) {
  std::ostringstream os;
  os << "digraph dependencies {\n";
  for (int s : g.streams) {
    const Declaration& d = ast.decls[s];
    const char* shape = d.kind == DeclKind::Input ? "box"
                        : d.kind == DeclKind::Trigger ? "diamond"
                                                      : "ellipse";
    os << "  \"" << d.name << "\" [shape=" << shape << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  \"" << ast.decls[e.from].name << "\" -> \"" << ast.decls[e.to].name
       << "\" [label=\"" << e.weight;
    switch (e.kind) {
      case EdgeKind::Sync: break;
      case EdgeKind::Offset: break;
      case EdgeKind::Hold: os << " hold"; break;
      case EdgeKind::Window: os << " window"; break;
      case EdgeKind::InstanceAgg: os << (e.fresh_agg ? " fresh" : " instances"); break;
      case EdgeKind::SpawnAccess: os << " spawn"; break;
      case EdgeKind::CloseAccess: os << " close"; break;
    }
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace streamon
