#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

// Abstract syntax for the pi calculus with assume/assert, its values,
// formulae (atoms, tensor, 1), and linearly refined session types.
// All nodes are immutable; trees are shared via shared_ptr<const T>.

namespace lsp {

// ---------------------------------------------------------------- values

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct VarV {
  std::string name;
};
struct UnitV {};
// A base-type constant: integers carry base "nat", named constants carry
// their declared base type (`p:product in the concrete syntax).
struct LitV {
  std::string text;
  std::string base;
};
// a+10 style sums; sums of two nat literals are folded at construction.
struct SumV {
  ValuePtr lhs, rhs;
};

struct Value {
  std::variant<VarV, UnitV, LitV, SumV> node;
};

ValuePtr mkVar(std::string name);
ValuePtr mkUnit();
ValuePtr mkLit(std::string text, std::string base);
ValuePtr mkIntLit(long long n);
ValuePtr mkSum(ValuePtr lhs, ValuePtr rhs);

bool valueEqual(const ValuePtr& a, const ValuePtr& b);

// -------------------------------------------------------------- formulae

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct AtomF {
  std::string pred;
  std::vector<ValuePtr> args;
};
struct TensorF {
  FormulaPtr lhs, rhs;
};
struct OneF {};

struct Formula {
  std::variant<AtomF, TensorF, OneF> node;
};

FormulaPtr mkAtom(std::string pred, std::vector<ValuePtr> args = {});
FormulaPtr mkTensor(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr mkOne();

bool atomEqual(const AtomF& a, const AtomF& b);
bool formulaEqual(const FormulaPtr& a, const FormulaPtr& b);  // syntactic

// ----------------------------------------------------------------- types

struct Type;
using TypePtr = std::shared_ptr<const Type>;

enum class Qual { Lin, Un };
enum class Dir { In, Out };

struct BaseT {
  std::string name;  // unit, nat, product, ...
};
struct EndT {};
struct SessionT {
  Qual q;
  Dir dir;
  std::string binder;  // names the communicated value inside cont
  TypePtr payload;
  TypePtr cont;
};
struct RefinedT {
  std::string binder;
  TypePtr base;
  FormulaPtr formula;
};
struct TVarT {
  std::string name;
};
struct RecT {
  std::string var;
  TypePtr body;
};

struct Type {
  std::variant<BaseT, EndT, SessionT, RefinedT, TVarT, RecT> node;
};

TypePtr mkBase(std::string name);
TypePtr mkEnd();
TypePtr mkSession(Qual q, Dir dir, std::string binder, TypePtr payload,
                  TypePtr cont);
TypePtr mkRefined(std::string binder, TypePtr base, FormulaPtr formula);
TypePtr mkTVar(std::string name);
TypePtr mkRec(std::string var, TypePtr body);

// ------------------------------------------------------------- processes

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct OutputP {
  std::string chan;
  ValuePtr val;
  ProcPtr cont;
};
struct InputP {
  std::string chan;
  std::string binder;
  ProcPtr cont;
};
struct ParP {
  ProcPtr lhs, rhs;
};
struct ReplP {
  ProcPtr body;
};
struct InactP {};
struct RestrictP {
  std::string left, right;
  TypePtr annot;       // type of the left endpoint
  TypePtr annotRight;  // optional explicit type of the right endpoint
  ProcPtr body;
};
struct AssumeP {
  FormulaPtr formula;
  ProcPtr body;
};
struct AssertP {
  FormulaPtr formula;
  ProcPtr cont;
};
// Macro invocation; only present between parsing and macro expansion.
struct CallP {
  std::string name;
  std::vector<ValuePtr> args;
};

struct Process {
  std::variant<OutputP, InputP, ParP, ReplP, InactP, RestrictP, AssumeP,
               AssertP, CallP>
      node;
};

ProcPtr mkOutput(std::string chan, ValuePtr val, ProcPtr cont);
ProcPtr mkInput(std::string chan, std::string binder, ProcPtr cont);
ProcPtr mkPar(ProcPtr lhs, ProcPtr rhs);
ProcPtr mkRepl(ProcPtr body);
ProcPtr mkInact();
ProcPtr mkRestrict(std::string left, std::string right, TypePtr annot,
                   ProcPtr body, TypePtr annotRight = nullptr);
ProcPtr mkAssume(FormulaPtr formula, ProcPtr body);
ProcPtr mkAssert(FormulaPtr formula, ProcPtr cont);
ProcPtr mkCall(std::string name, std::vector<ValuePtr> args);

// -------------------------------------------------------------- contexts

struct Binding {
  std::string name;
  TypePtr type;
};
struct Resource {
  FormulaPtr formula;
};
using ContextEntry = std::variant<Binding, Resource>;

struct Context {
  std::vector<ContextEntry> entries;

  std::set<std::string> dom() const;
  bool binds(const std::string& name) const;
  const TypePtr* lookup(const std::string& name) const;
};

// --------------------------------------------------- names and binding

// Globally fresh identifier derived from a base name.
std::string freshName(const std::string& base);

std::set<std::string> freeVars(const ValuePtr& v);
std::set<std::string> freeVars(const FormulaPtr& f);
std::set<std::string> freeVars(const TypePtr& t);  // term variables only
std::set<std::string> freeVars(const ProcPtr& p);
std::set<std::string> freeTypeVars(const TypePtr& t);

// Capture-free substitution of value v for term variable x.
ValuePtr substitute(const ValuePtr& in, const std::string& x,
                    const ValuePtr& v);
FormulaPtr substitute(const FormulaPtr& in, const std::string& x,
                      const ValuePtr& v);
TypePtr substitute(const TypePtr& in, const std::string& x, const ValuePtr& v);
ProcPtr substitute(const ProcPtr& in, const std::string& x, const ValuePtr& v);

// Substitution of a type for a type variable (used by mu-unfolding).
TypePtr substTypeVar(const TypePtr& in, const std::string& alpha,
                     const TypePtr& t);

// Renames binders so that all binding occurrences are pairwise distinct
// and distinct from the free variables (Barendregt convention).
ProcPtr refreshBinders(const ProcPtr& p);

bool alphaEqual(const TypePtr& a, const TypePtr& b);
bool alphaEqual(const ProcPtr& a, const ProcPtr& b);

}  // namespace lsp
