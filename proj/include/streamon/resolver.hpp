#ifndef STREAMON_RESOLVER_HPP
#define STREAMON_RESOLVER_HPP

#include "streamon/ast.hpp"
#include "streamon/diagnostics.hpp"

namespace streamon {

// Binds every identifier to a declaration or a parameter of the enclosing
// stream and checks instance-application arity. Mutates the AST in place
// (decl_ref / param_ref on Name and Instance nodes).
DiagnosticList resolve_names(Ast& ast);

}  // namespace streamon

#endif
