#pragma once

#include <stdexcept>

#include "lsp/syntax.hpp"

// Formula and type level operations: flattening modulo the tensor monoid
// laws, coinductive type equivalence, duality, the un predicate, canonical
// contexts (cf) and mu-unfolding.

namespace lsp {

// Multiset of atomic formulae, ordered by a canonical key.
class AtomBag {
 public:
  void add(const AtomF& atom);
  void add(const AtomBag& other);
  // Removes one occurrence; returns false when absent.
  bool removeOne(const AtomF& atom);
  bool contains(const AtomF& atom) const;
  int count(const AtomF& atom) const;
  bool empty() const { return atoms_.empty(); }
  size_t size() const { return atoms_.size(); }
  const std::vector<AtomF>& atoms() const { return atoms_; }
  bool operator==(const AtomBag& other) const;

 private:
  std::vector<AtomF> atoms_;  // sorted by print key
};

AtomBag flattenFormula(const FormulaPtr& f);
bool formulaEquivalent(const FormulaPtr& a, const FormulaPtr& b);

// Coinductive equi-recursive equivalence; both types must be contractive.
bool typeEquivalent(const TypePtr& a, const TypePtr& b);

// Dual endpoint type; nullptr when undefined (unit/base and refinements).
TypePtr dual(const TypePtr& t);

bool isUnrestricted(const TypePtr& t);
bool isUnrestrictedContext(const Context& ctx);

// Canonical contexts: refinement bindings dissolved into a plain binding
// plus atomic resources, tensors split, 1s dropped.
Context cf(const Context& ctx);
std::vector<ContextEntry> cfBinding(const std::string& name, const TypePtr& t);
std::vector<ContextEntry> cfFormula(const FormulaPtr& f);

struct NotRecursive : std::runtime_error {
  NotRecursive() : std::runtime_error("unfold applied to a non-recursive type") {}
};

// One-step unfolding of a recursive type; throws NotRecursive otherwise.
TypePtr unfold(const TypePtr& t);

// Unfolds any chain of leading mu binders; identity on other heads.
TypePtr unfoldHead(const TypePtr& t);

bool isContractive(const TypePtr& t);
bool hasRecursiveRefinement(const TypePtr& t);

}  // namespace lsp
