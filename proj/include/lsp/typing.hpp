#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsp/parser.hpp"
#include "lsp/syntax.hpp"

// Algorithmic type checker: the declarative rules are realized by threading
// one context through the derivation left to right, marking linear entries
// as consumed. A brute-force declarative checker over explicit context
// splits serves as a correctness oracle.

namespace lsp {

enum class ErrCode {
  Dual,        // endpoint types not dual at a restriction
  Split,       // leftover linear resource at a scope exit
  Formula,     // unprovable formula
  Update,      // context update on a linear or non-equivalent binding
  Wf,          // ill-formed context/formula/type or unbound name
  Unqual,      // un(ctx) violated at a replication or at the leaves
  NotSession,  // channel operation on a non-session type
  Mismatch,    // value does not inhabit the expected type
};

std::string errCodeName(ErrCode code);  // "E-DUAL", "E-SPLIT", ...

struct TypeError {
  ErrCode code;
  std::string message;
  std::string contextSlice;  // offending part of the context, printed
};

struct ThreadedEntry {
  ContextEntry entry;
  bool consumed = false;
};

// Ordered context with consumed flags. Invariant: bindings carry no
// top-level refinement and resources are atomic (cf-normal form).
class ThreadedContext {
 public:
  static ThreadedContext fromContext(const Context& ctx);  // throws TypeError

  std::vector<ThreadedEntry> entries;
  std::set<std::string> usedNames;  // every name ever bound or free

  // Index of the innermost unconsumed binding for a name, or -1.
  int lookupBinding(const std::string& name) const;
  std::set<std::string> dom() const;  // all binding names, consumed included
  size_t appendBinding(const std::string& name, const TypePtr& t);
  size_t appendResource(const FormulaPtr& atom);
  Context residual() const;  // unconsumed entries
  std::string print() const;
};

// ------------------------------------------------ spec-level operations
// The wf* functions return the first violation, if any.
std::optional<TypeError> wfFormula(const Context& ctx, const FormulaPtr& f);
std::optional<TypeError> wfType(const Context& ctx, const TypePtr& t);
std::optional<TypeError> wfContext(const Context& ctx);

// True iff ctx = lhs ∘ rhs is derivable by the context split rules.
bool checkSplit(const Context& ctx, const Context& lhs, const Context& rhs);

// The following throw TypeError on failure and mutate ctx on success.
void contextUpdate(ThreadedContext& ctx, const std::string& name,
                   const TypePtr& t);
void proveFormula(ThreadedContext& ctx, const FormulaPtr& f);
void checkValue(ThreadedContext& ctx, const ValuePtr& v, const TypePtr& t);
void checkProcess(ThreadedContext& ctx, const ProcPtr& p);

struct CheckResult {
  bool ok = false;
  std::vector<TypeError> errors;
};

// Full judgment: threads the process and requires the residual context to
// be unrestricted and resource-free.
CheckResult typecheckProcess(const Context& ctx, const ProcPtr& expanded);
// Parses nothing: expands macros of an already parsed program and checks
// its main process under the declared context.
CheckResult typecheck(const Program& program);

// Brute-force declarative derivation search (the oracle). nullopt when the
// fuel budget was exhausted before a verdict.
std::optional<bool> referenceCheck(const Context& ctx, const ProcPtr& p,
                                   long fuel);

}  // namespace lsp
