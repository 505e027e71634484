#ifndef STREAMON_PARSER_HPP
#define STREAMON_PARSER_HPP

#include <string>

#include "streamon/ast.hpp"
#include "streamon/diagnostics.hpp"

namespace streamon {

struct ParseResult {
  Ast ast;
  DiagnosticList diags;
  bool ok() const { return !diags.has_errors(); }
};

// Total: any byte sequence yields an AST or diagnostics.
// `:=` is desugared to an eval-with clause, bare triggers to clause form,
// and unnamed triggers receive synthetic names trigger_0, trigger_1, ...
ParseResult parse(const std::string& source);

// Exact conversion of a decimal duration/frequency literal to nanoseconds.
// Returns 0 and sets `error` if the unit is unknown, the value is not
// positive, or the period is not an integral number of nanoseconds.
uint64_t duration_to_ns(uint64_t mantissa, int frac_digits, const std::string& unit,
                        std::string& error);

}  // namespace streamon

#endif
