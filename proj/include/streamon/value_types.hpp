#ifndef STREAMON_VALUE_TYPES_HPP
#define STREAMON_VALUE_TYPES_HPP

#include <vector>

#include "streamon/ast.hpp"
#include "streamon/diagnostics.hpp"

namespace streamon {

struct TypeTable {
  std::vector<ValueType> decl_type;                 // indexed by declaration
  std::vector<std::vector<ValueType>> param_types;  // indexed by declaration
};

// Unification-based value-type inference. Annotates every expression node
// (Expr::type) and fills the per-declaration table. Integer literals are
// polymorphic over Int/UInt and default to Int; there is no implicit
// numeric coercion.
DiagnosticList infer_value_types(Ast& ast, TypeTable& table);

}  // namespace streamon

#endif
