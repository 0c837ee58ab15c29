#pragma once

#include <string>

#include "lsp/syntax.hpp"

namespace lsp {

// Pretty printing in the concrete `.lsp` grammar. parse(print(t)) yields a
// term alpha-equivalent to t.
std::string prettyPrint(const ValuePtr& v);
std::string prettyPrint(const FormulaPtr& f);
std::string prettyPrint(const TypePtr& t);
std::string prettyPrint(const ProcPtr& p);
std::string prettyPrint(const AtomF& a);
std::string prettyPrint(const Context& ctx);

// Printing after renaming every binder to a position-determined name; two
// alpha-equivalent terms normalize to the same text. Used for golden output
// and deduplication keys.
std::string normalizedPrint(const ProcPtr& p);
std::string normalizedPrint(const TypePtr& t);

}  // namespace lsp
