#ifndef STREAMON_PRINTER_HPP
#define STREAMON_PRINTER_HPP

#include <string>

#include "streamon/ast.hpp"

namespace streamon {

// Prints the desugared clause form; parsing the result yields a structurally
// equal AST.
std::string print_spec(const Ast& ast);
std::string print_decl(const Declaration& d);

// Canonical text for a period, e.g. 500000000 -> "0.5s".
std::string period_to_string(uint64_t period_ns);

}  // namespace streamon

#endif
