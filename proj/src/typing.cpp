#include "lsp/typing.hpp"

#include <map>

#include "lsp/print.hpp"
#include "lsp/types.hpp"

namespace lsp {

namespace {

[[noreturn]] void fail(ErrCode code, std::string msg, std::string slice = "") {
  throw TypeError{code, std::move(msg), std::move(slice)};
}

}  // namespace

std::string errCodeName(ErrCode code) {
  switch (code) {
    case ErrCode::Dual: return "E-DUAL";
    case ErrCode::Split: return "E-SPLIT";
    case ErrCode::Formula: return "E-FORMULA";
    case ErrCode::Update: return "E-UPDATE";
    case ErrCode::Wf: return "E-WF";
    case ErrCode::Unqual: return "E-UNQUAL";
    case ErrCode::NotSession: return "E-NOTSESSION";
    case ErrCode::Mismatch: return "E-MISMATCH";
  }
  return "E-UNKNOWN";
}

// ------------------------------------------------------ well-formedness

std::optional<TypeError> wfFormula(const Context& ctx, const FormulaPtr& f) {
  auto d = ctx.dom();
  for (const auto& x : freeVars(f))
    if (!d.count(x))
      return TypeError{ErrCode::Wf, "formula mentions unbound name " + x,
                       prettyPrint(f)};
  return std::nullopt;
}

std::optional<TypeError> wfType(const Context& ctx, const TypePtr& t) {
  auto d = ctx.dom();
  for (const auto& x : freeVars(t))
    if (!d.count(x))
      return TypeError{ErrCode::Wf, "type mentions unbound name " + x,
                       prettyPrint(t)};
  if (!isContractive(t))
    return TypeError{ErrCode::Wf, "non-contractive recursive type",
                     prettyPrint(t)};
  if (hasRecursiveRefinement(t))
    return TypeError{ErrCode::Wf, "recursive refinement type", prettyPrint(t)};
  return std::nullopt;
}

std::optional<TypeError> wfContext(const Context& ctx) {
  Context prefix;
  for (const auto& e : ctx.entries) {
    if (const auto* b = std::get_if<Binding>(&e)) {
      if (prefix.binds(b->name))
        return TypeError{ErrCode::Wf, "duplicate binding for " + b->name,
                         prettyPrint(ctx)};
      if (auto err = wfType(prefix, b->type)) return err;
    } else if (auto err = wfFormula(prefix, std::get<Resource>(e).formula)) {
      return err;
    }
    prefix.entries.push_back(e);
  }
  return std::nullopt;
}

// --------------------------------------------------------- context split

namespace {

bool entryEqual(const ContextEntry& a, const ContextEntry& b) {
  if (a.index() != b.index()) return false;
  if (const auto* ba = std::get_if<Binding>(&a)) {
    const auto& bb = std::get<Binding>(b);
    return ba->name == bb.name && alphaEqual(ba->type, bb.type);
  }
  return formulaEqual(std::get<Resource>(a).formula,
                      std::get<Resource>(b).formula);
}

bool prefixCovers(const std::vector<ContextEntry>& side, size_t n,
                  const std::set<std::string>& fv) {
  std::set<std::string> d;
  for (size_t i = 0; i < n; ++i)
    if (const auto* b = std::get_if<Binding>(&side[i])) d.insert(b->name);
  for (const auto& x : fv)
    if (!d.count(x)) return false;
  return true;
}

bool splitRec(const std::vector<ContextEntry>& w, size_t nw,
              const std::vector<ContextEntry>& l, size_t nl,
              const std::vector<ContextEntry>& r, size_t nr) {
  if (nw == 0) return nl == 0 && nr == 0;
  const auto& e = w[nw - 1];
  const auto* b = std::get_if<Binding>(&e);
  if (b && isUnrestricted(b->type)) {
    return nl > 0 && nr > 0 && entryEqual(l[nl - 1], e) &&
           entryEqual(r[nr - 1], e) && splitRec(w, nw - 1, l, nl - 1, r, nr - 1);
  }
  auto fv = b ? freeVars(b->type) : freeVars(std::get<Resource>(e).formula);
  if (nl > 0 && entryEqual(l[nl - 1], e) && prefixCovers(l, nl - 1, fv) &&
      splitRec(w, nw - 1, l, nl - 1, r, nr))
    return true;
  if (nr > 0 && entryEqual(r[nr - 1], e) && prefixCovers(r, nr - 1, fv) &&
      splitRec(w, nw - 1, l, nl, r, nr - 1))
    return true;
  return false;
}

}  // namespace

bool checkSplit(const Context& ctx, const Context& lhs, const Context& rhs) {
  return splitRec(ctx.entries, ctx.entries.size(), lhs.entries,
                  lhs.entries.size(), rhs.entries, rhs.entries.size());
}

// ------------------------------------------------------ threaded context

ThreadedContext ThreadedContext::fromContext(const Context& ctx) {
  if (auto err = wfContext(ctx)) throw *err;
  ThreadedContext tc;
  for (const auto& e : cf(ctx).entries) tc.entries.push_back({e, false});
  for (const auto& e : tc.entries) {
    if (const auto* b = std::get_if<Binding>(&e.entry)) {
      tc.usedNames.insert(b->name);
      for (const auto& x : freeVars(b->type)) tc.usedNames.insert(x);
    } else {
      for (const auto& x : freeVars(std::get<Resource>(e.entry).formula))
        tc.usedNames.insert(x);
    }
  }
  return tc;
}

int ThreadedContext::lookupBinding(const std::string& name) const {
  for (int i = (int)entries.size() - 1; i >= 0; --i) {
    if (entries[i].consumed) continue;
    const auto* b = std::get_if<Binding>(&entries[i].entry);
    if (b && b->name == name) return i;
  }
  return -1;
}

std::set<std::string> ThreadedContext::dom() const {
  std::set<std::string> out;
  for (const auto& e : entries)
    if (const auto* b = std::get_if<Binding>(&e.entry)) out.insert(b->name);
  return out;
}

size_t ThreadedContext::appendBinding(const std::string& name,
                                      const TypePtr& t) {
  usedNames.insert(name);
  entries.push_back({Binding{name, t}, false});
  return entries.size() - 1;
}

size_t ThreadedContext::appendResource(const FormulaPtr& atom) {
  entries.push_back({Resource{atom}, false});
  return entries.size() - 1;
}

Context ThreadedContext::residual() const {
  Context out;
  for (const auto& e : entries)
    if (!e.consumed) out.entries.push_back(e.entry);
  return out;
}

std::string ThreadedContext::print() const { return prettyPrint(residual()); }

// -------------------------------------------------- algorithmic checker

void contextUpdate(ThreadedContext& ctx, const std::string& name,
                   const TypePtr& t) {
  int idx = ctx.lookupBinding(name);
  if (idx < 0) {
    ctx.appendBinding(name, t);
    return;
  }
  const auto& b = std::get<Binding>(ctx.entries[idx].entry);
  if (!isUnrestricted(b.type))
    fail(ErrCode::Update, "cannot update linear binding " + name,
         name + " : " + prettyPrint(b.type));
  if (!typeEquivalent(t, b.type))
    fail(ErrCode::Update,
         "update changes the type of unrestricted " + name + " to " +
             prettyPrint(t),
         name + " : " + prettyPrint(b.type));
}

void proveFormula(ThreadedContext& ctx, const FormulaPtr& f) {
  for (const auto& x : freeVars(f))
    if (!ctx.dom().count(x))
      fail(ErrCode::Wf, "formula mentions unbound name " + x, prettyPrint(f));
  std::vector<std::string> missing;
  const AtomBag needed = flattenFormula(f);
  for (const AtomF& need : needed.atoms()) {
    bool found = false;
    for (auto& e : ctx.entries) {
      if (e.consumed) continue;
      const auto* r = std::get_if<Resource>(&e.entry);
      if (!r) continue;
      const auto* a = std::get_if<AtomF>(&r->formula->node);
      if (a && atomEqual(*a, need)) {
        e.consumed = true;
        found = true;
        break;
      }
    }
    if (!found) missing.push_back(prettyPrint(need));
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(ErrCode::Formula, "cannot prove " + prettyPrint(f) + "; missing " +
                               list, ctx.print());
  }
}

void checkValue(ThreadedContext& ctx, const ValuePtr& v, const TypePtr& t) {
  TypePtr target = unfoldHead(t);
  if (const auto* r = std::get_if<RefinedT>(&target->node)) {
    proveFormula(ctx, substitute(r->formula, r->binder, v));
    checkValue(ctx, v, r->base);
    return;
  }
  const auto* base = std::get_if<BaseT>(&target->node);
  if (std::holds_alternative<UnitV>(v->node)) {
    if (base && base->name == "unit") return;
    fail(ErrCode::Mismatch, "() used where " + prettyPrint(t) + " is expected");
  }
  if (const auto* l = std::get_if<LitV>(&v->node)) {
    if (base && base->name == l->base) return;
    fail(ErrCode::Mismatch, prettyPrint(v) + " : " + l->base +
                                " used where " + prettyPrint(t) +
                                " is expected");
  }
  if (const auto* s = std::get_if<SumV>(&v->node)) {
    if (base && base->name == "nat") {
      checkValue(ctx, s->lhs, mkBase("nat"));
      checkValue(ctx, s->rhs, mkBase("nat"));
      return;
    }
    fail(ErrCode::Mismatch, prettyPrint(v) + " : nat used where " +
                                prettyPrint(t) + " is expected");
  }
  const auto& var = std::get<VarV>(v->node);
  int idx = ctx.lookupBinding(var.name);
  if (idx < 0) {
    if (ctx.dom().count(var.name))
      fail(ErrCode::Split, "linear " + var.name + " is already used up");
    fail(ErrCode::Wf, "unbound name " + var.name);
  }
  const auto& b = std::get<Binding>(ctx.entries[idx].entry);
  if (!typeEquivalent(b.type, target))
    fail(ErrCode::Mismatch,
         var.name + " : " + prettyPrint(b.type) + " used where " +
             prettyPrint(t) + " is expected");
  if (!isUnrestricted(b.type)) ctx.entries[idx].consumed = true;
}

namespace {

// Resolves a channel to its session head; consumes a linear subject.
const SessionT& resolveSubject(ThreadedContext& ctx, const std::string& chan,
                               Dir dir, TypePtr& headOut) {
  int idx = ctx.lookupBinding(chan);
  if (idx < 0) {
    if (ctx.dom().count(chan))
      fail(ErrCode::Split, "linear " + chan + " is already used up");
    fail(ErrCode::Wf, "unbound channel " + chan);
  }
  const auto& b = std::get<Binding>(ctx.entries[idx].entry);
  headOut = unfoldHead(b.type);
  const auto* s = std::get_if<SessionT>(&headOut->node);
  if (!s)
    fail(ErrCode::NotSession,
         chan + " : " + prettyPrint(b.type) + " is not a session type");
  if (s->dir != dir)
    fail(ErrCode::NotSession,
         chan + " : " + prettyPrint(b.type) +
             (dir == Dir::Out ? " does not allow output" : " does not allow input"));
  if (s->q == Qual::Lin) ctx.entries[idx].consumed = true;
  return *std::get_if<SessionT>(&headOut->node);
}

// Closes the scope of a name: its remaining binding must be unrestricted.
void exitBinding(ThreadedContext& ctx, const std::string& name) {
  int idx = ctx.lookupBinding(name);
  if (idx < 0) return;
  auto& e = ctx.entries[idx];
  const auto& b = std::get<Binding>(e.entry);
  if (!isUnrestricted(b.type))
    fail(ErrCode::Split,
         "linear " + name + " : " + prettyPrint(b.type) +
             " is not fully used at the end of its scope");
  e.consumed = true;
}

}  // namespace

void checkProcess(ThreadedContext& ctx, const ProcPtr& p) {
  if (std::holds_alternative<InactP>(p->node)) return;

  if (const auto* out = std::get_if<OutputP>(&p->node)) {
    TypePtr head;
    const SessionT& s = resolveSubject(ctx, out->chan, Dir::Out, head);
    checkValue(ctx, out->val, s.payload);
    contextUpdate(ctx, out->chan, substitute(s.cont, s.binder, out->val));
    checkProcess(ctx, out->cont);
    return;
  }

  if (const auto* in = std::get_if<InputP>(&p->node)) {
    TypePtr head;
    const SessionT& s = resolveSubject(ctx, in->chan, Dir::In, head);
    std::string z = in->binder;
    ProcPtr body = in->cont;
    if (ctx.usedNames.count(z)) {
      std::string z2 = freshName(z);
      body = substitute(body, z, mkVar(z2));
      z = z2;
    }
    std::vector<size_t> scope;
    for (const auto& e : cfBinding(z, s.payload)) {
      if (const auto* b = std::get_if<Binding>(&e))
        scope.push_back(ctx.appendBinding(b->name, b->type));
      else
        scope.push_back(ctx.appendResource(std::get<Resource>(e).formula));
    }
    contextUpdate(ctx, in->chan, substitute(s.cont, s.binder, mkVar(z)));
    checkProcess(ctx, body);
    exitBinding(ctx, z);
    for (size_t i : scope) {
      auto& e = ctx.entries[i];
      if (e.consumed) continue;
      if (const auto* r = std::get_if<Resource>(&e.entry))
        fail(ErrCode::Split, "refinement resource " + prettyPrint(r->formula) +
                                 " of " + z + " is never used");
    }
    return;
  }

  if (const auto* par = std::get_if<ParP>(&p->node)) {
    // The right component types under a split of the original context, so
    // entries the left component appended must be closed at its exit.
    size_t before = ctx.entries.size();
    checkProcess(ctx, par->lhs);
    for (size_t i = before; i < ctx.entries.size(); ++i) {
      auto& e = ctx.entries[i];
      if (e.consumed) continue;
      if (const auto* b = std::get_if<Binding>(&e.entry)) {
        if (!isUnrestricted(b->type))
          fail(ErrCode::Unqual, "linear " + b->name + " : " +
                                    prettyPrint(b->type) +
                                    " is left over by a parallel component");
        e.consumed = true;
      } else {
        fail(ErrCode::Unqual,
             "assumption " +
                 prettyPrint(std::get<Resource>(e.entry).formula) +
                 " is left over by a parallel component");
      }
    }
    checkProcess(ctx, par->rhs);
    return;
  }

  if (const auto* rep = std::get_if<ReplP>(&p->node)) {
    for (const auto& x : freeVars(rep->body)) {
      int i = ctx.lookupBinding(x);
      if (i >= 0 &&
          !isUnrestricted(std::get<Binding>(ctx.entries[i].entry).type))
        fail(ErrCode::Unqual, "replicated process captures linear " + x,
             x + " : " +
                 prettyPrint(std::get<Binding>(ctx.entries[i].entry).type));
    }
    size_t before = ctx.entries.size();
    std::vector<bool> flags;
    for (const auto& e : ctx.entries) flags.push_back(e.consumed);
    checkProcess(ctx, rep->body);
    for (size_t i = 0; i < before; ++i)
      if (ctx.entries[i].consumed != flags[i])
        fail(ErrCode::Unqual,
             "replicated process consumes a linear resource", ctx.print());
    for (size_t i = before; i < ctx.entries.size(); ++i) {
      auto& e = ctx.entries[i];
      if (e.consumed) continue;
      if (const auto* b = std::get_if<Binding>(&e.entry)) {
        if (!isUnrestricted(b->type))
          fail(ErrCode::Unqual, "linear " + b->name +
                                    " leaks from a replicated process");
        e.consumed = true;
      } else {
        fail(ErrCode::Unqual,
             "assumption " +
                 prettyPrint(std::get<Resource>(e.entry).formula) +
                 " escapes a replicated process");
      }
    }
    return;
  }

  if (const auto* res = std::get_if<RestrictP>(&p->node)) {
    TypePtr t = res->annot;
    for (const auto& x : freeVars(t))
      if (!ctx.dom().count(x))
        fail(ErrCode::Wf, "type mentions unbound name " + x, prettyPrint(t));
    if (!isContractive(t))
      fail(ErrCode::Wf, "non-contractive recursive type", prettyPrint(t));
    if (hasRecursiveRefinement(t))
      fail(ErrCode::Wf, "recursive refinement type", prettyPrint(t));
    TypePtr d = dual(t);
    if (!d)
      fail(ErrCode::Dual, "type " + prettyPrint(t) + " has no dual");
    TypePtr rt = d;
    if (res->annotRight) {
      if (!typeEquivalent(res->annotRight, d))
        fail(ErrCode::Dual,
             "endpoint types are not dual: " + prettyPrint(t) + " vs " +
                 prettyPrint(res->annotRight));
      rt = res->annotRight;
    }
    std::string x = res->left, y = res->right;
    ProcPtr body = res->body;
    if (ctx.usedNames.count(x)) {
      std::string x2 = freshName(x);
      body = substitute(body, x, mkVar(x2));
      x = x2;
    }
    ctx.usedNames.insert(x);
    if (ctx.usedNames.count(y)) {
      std::string y2 = freshName(y);
      body = substitute(body, y, mkVar(y2));
      y = y2;
    }
    ctx.appendBinding(x, t);
    ctx.appendBinding(y, rt);
    checkProcess(ctx, body);
    exitBinding(ctx, x);
    exitBinding(ctx, y);
    return;
  }

  if (const auto* as = std::get_if<AssumeP>(&p->node)) {
    for (const auto& x : freeVars(as->formula))
      if (!ctx.dom().count(x))
        fail(ErrCode::Wf, "formula mentions unbound name " + x,
             prettyPrint(as->formula));
    for (const auto& e : cfFormula(as->formula))
      ctx.appendResource(std::get<Resource>(e).formula);
    checkProcess(ctx, as->body);
    return;
  }

  if (const auto* at = std::get_if<AssertP>(&p->node)) {
    proveFormula(ctx, at->formula);
    checkProcess(ctx, at->cont);
    return;
  }

  const auto& call = std::get<CallP>(p->node);
  fail(ErrCode::Wf, "unexpanded macro call " + call.name);
}

CheckResult typecheckProcess(const Context& ctx, const ProcPtr& expanded) {
  CheckResult result;
  try {
    ThreadedContext tc = ThreadedContext::fromContext(ctx);
    ProcPtr p = refreshBinders(expanded);
    for (const auto& x : freeVars(p)) tc.usedNames.insert(x);
    checkProcess(tc, p);
    for (const auto& e : tc.entries) {
      if (e.consumed) continue;
      if (const auto* b = std::get_if<Binding>(&e.entry)) {
        if (!isUnrestricted(b->type))
          fail(ErrCode::Unqual,
               "linear " + b->name + " : " + prettyPrint(b->type) +
                   " is left over");
      } else {
        fail(ErrCode::Unqual,
             "assumption " +
                 prettyPrint(std::get<Resource>(e.entry).formula) +
                 " is never matched by an assertion");
      }
    }
    result.ok = true;
  } catch (TypeError& e) {
    result.errors.push_back(std::move(e));
  }
  return result;
}

CheckResult typecheck(const Program& program) {
  ExpandResult expanded = expandMacros(program);
  if (!expanded.ok()) {
    CheckResult result;
    for (const auto& d : expanded.diagnostics)
      result.errors.push_back({ErrCode::Wf, d.message, ""});
    return result;
  }
  return typecheckProcess(program.declaredContext, expanded.process);
}

// ----------------------------------------------------- reference checker

namespace {

struct FuelOut {};

struct RefChecker {
  long fuel;
  std::map<std::string, bool> memo;

  void tick() {
    if (--fuel < 0) throw FuelOut{};
  }

  static bool wfOk(const Context& c) { return !wfContext(c).has_value(); }

  // All (l, r) with c = l ∘ r: unrestricted bindings are duplicated,
  // every other entry goes to exactly one side.
  std::vector<std::pair<Context, Context>> splits(const Context& c) {
    std::vector<size_t> lin;
    for (size_t i = 0; i < c.entries.size(); ++i) {
      const auto* b = std::get_if<Binding>(&c.entries[i]);
      if (!b || !isUnrestricted(b->type)) lin.push_back(i);
    }
    if (lin.size() > 12) throw FuelOut{};
    std::vector<std::pair<Context, Context>> out;
    for (unsigned long mask = 0; mask < (1ul << lin.size()); ++mask) {
      tick();
      Context l, r;
      size_t k = 0;
      for (size_t i = 0; i < c.entries.size(); ++i) {
        if (k < lin.size() && lin[k] == i) {
          (((mask >> k) & 1) ? l : r).entries.push_back(c.entries[i]);
          ++k;
        } else {
          l.entries.push_back(c.entries[i]);
          r.entries.push_back(c.entries[i]);
        }
      }
      if (wfOk(l) && wfOk(r)) out.emplace_back(std::move(l), std::move(r));
    }
    return out;
  }

  static std::optional<Context> update(const Context& c, const std::string& x,
                                       const TypePtr& u) {
    if (const TypePtr* t = c.lookup(x)) {
      if (isUnrestricted(*t) && typeEquivalent(*t, u)) return c;
      return std::nullopt;
    }
    auto d = c.dom();
    for (const auto& n : freeVars(u))
      if (!d.count(n)) return std::nullopt;
    Context c2 = c;
    c2.entries.push_back(Binding{x, u});
    return c2;
  }

  // Subject of a communication: a binding for x whose head unfolds to a
  // session in the given direction, with everything else unrestricted.
  const SessionT* subject(const Context& c, const std::string& x, Dir dir,
                          TypePtr& headOut) {
    const TypePtr* t = nullptr;
    for (const auto& e : c.entries) {
      if (const auto* b = std::get_if<Binding>(&e)) {
        if (b->name == x) {
          t = &b->type;
          continue;
        }
        if (!isUnrestricted(b->type)) return nullptr;
      } else {
        return nullptr;
      }
    }
    if (!t) return nullptr;
    headOut = unfoldHead(*t);
    const auto* s = std::get_if<SessionT>(&headOut->node);
    if (!s || s->dir != dir) return nullptr;
    return s;
  }

  bool form(const Context& c, const FormulaPtr& f) {
    tick();
    // Form: one resource equal to f, the rest unrestricted bindings.
    int found = -1;
    bool restUn = true;
    for (size_t i = 0; i < c.entries.size(); ++i) {
      if (const auto* r = std::get_if<Resource>(&c.entries[i])) {
        if (found < 0 && formulaEqual(r->formula, f)) {
          found = (int)i;
          continue;
        }
        restUn = false;
      } else if (!isUnrestricted(std::get<Binding>(c.entries[i]).type)) {
        restUn = false;
      }
    }
    if (found >= 0 && restUn) return true;
    if (std::holds_alternative<OneF>(f->node)) return isUnrestrictedContext(c);
    if (const auto* t = std::get_if<TensorF>(&f->node)) {
      for (const auto& [l, r] : splits(c))
        if (form(l, t->lhs) && form(r, t->rhs)) return true;
    }
    return false;
  }

  bool val(const Context& c, const ValuePtr& v, const TypePtr& t) {
    tick();
    TypePtr target = unfoldHead(t);
    if (const auto* rf = std::get_if<RefinedT>(&target->node)) {
      FormulaPtr inst = substitute(rf->formula, rf->binder, v);
      for (const auto& [l, r] : splits(c))
        if (form(l, inst) && val(r, v, rf->base)) return true;
      // fall through: Conv may still match a refined binding directly
    }
    if (const auto* var = std::get_if<VarV>(&v->node)) {
      const TypePtr* bt = nullptr;
      bool restUn = true;
      for (const auto& e : c.entries) {
        if (const auto* b = std::get_if<Binding>(&e)) {
          if (b->name == var->name && !bt) {
            bt = &b->type;
            continue;
          }
          if (!isUnrestricted(b->type)) restUn = false;
        } else {
          restUn = false;
        }
      }
      return bt && restUn && typeEquivalent(*bt, t);
    }
    const auto* base = std::get_if<BaseT>(&target->node);
    if (std::holds_alternative<UnitV>(v->node))
      return base && base->name == "unit" && isUnrestrictedContext(c);
    if (const auto* l = std::get_if<LitV>(&v->node))
      return base && base->name == l->base && isUnrestrictedContext(c);
    const auto& s = std::get<SumV>(v->node);
    return base && base->name == "nat" && val(c, s.lhs, mkBase("nat")) &&
           val(c, s.rhs, mkBase("nat"));
  }

  bool proc(const Context& c, const ProcPtr& p) {
    tick();
    std::string key = prettyPrint(c) + " |- " + prettyPrint(p);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool v = procRaw(c, p);
    memo[key] = v;
    return v;
  }

  bool procRaw(const Context& c, const ProcPtr& p) {
    // context manipulation: unfold resources and refinement bindings
    for (size_t i = 0; i < c.entries.size(); ++i) {
      if (const auto* r = std::get_if<Resource>(&c.entries[i])) {
        if (std::holds_alternative<OneF>(r->formula->node)) {
          Context c2 = c;
          c2.entries.erase(c2.entries.begin() + i);
          if (proc(c2, p)) return true;
        } else if (const auto* t = std::get_if<TensorF>(&r->formula->node)) {
          Context c2 = c;
          c2.entries[i] = Resource{t->lhs};
          c2.entries.insert(c2.entries.begin() + i + 1, Resource{t->rhs});
          if (proc(c2, p)) return true;
        }
      } else {
        const auto& b = std::get<Binding>(c.entries[i]);
        if (const auto* rf = std::get_if<RefinedT>(&b.type->node)) {
          Context c2 = c;
          c2.entries[i] = Binding{b.name, rf->base};
          c2.entries.insert(
              c2.entries.begin() + i + 1,
              Resource{substitute(rf->formula, rf->binder, mkVar(b.name))});
          if (proc(c2, p)) return true;
        }
      }
    }

    if (std::holds_alternative<InactP>(p->node))
      return isUnrestrictedContext(c);

    if (const auto* par = std::get_if<ParP>(&p->node)) {
      for (const auto& [l, r] : splits(c))
        if (proc(l, par->lhs) && proc(r, par->rhs)) return true;
      return false;
    }

    if (const auto* rep = std::get_if<ReplP>(&p->node))
      return isUnrestrictedContext(c) && proc(c, rep->body);

    if (const auto* res = std::get_if<RestrictP>(&p->node)) {
      TypePtr t = res->annot;
      auto d = c.dom();
      for (const auto& x : freeVars(t))
        if (!d.count(x)) return false;
      TypePtr du = dual(t);
      if (!du) return false;
      TypePtr rt = du;
      if (res->annotRight) {
        if (!typeEquivalent(res->annotRight, du)) return false;
        rt = res->annotRight;
      }
      std::string x = res->left, y = res->right;
      ProcPtr body = res->body;
      if (d.count(x)) {
        std::string x2 = freshName(x);
        body = substitute(body, x, mkVar(x2));
        x = x2;
      }
      if (d.count(y) || y == x) {
        std::string y2 = freshName(y);
        body = substitute(body, y, mkVar(y2));
        y = y2;
      }
      Context c2 = c;
      c2.entries.push_back(Binding{x, t});
      c2.entries.push_back(Binding{y, rt});
      return proc(c2, body);
    }

    if (const auto* out = std::get_if<OutputP>(&p->node)) {
      for (const auto& [g1, rest] : splits(c)) {
        TypePtr head;
        const SessionT* s = subject(g1, out->chan, Dir::Out, head);
        if (!s) continue;
        for (const auto& [g2, g3] : splits(rest)) {
          if (!val(g2, out->val, s->payload)) continue;
          auto g3u =
              update(g3, out->chan, substitute(s->cont, s->binder, out->val));
          if (g3u && proc(*g3u, out->cont)) return true;
        }
      }
      return false;
    }

    if (const auto* in = std::get_if<InputP>(&p->node)) {
      for (const auto& [g1, g2] : splits(c)) {
        TypePtr head;
        const SessionT* s = subject(g1, in->chan, Dir::In, head);
        if (!s) continue;
        std::string z = in->binder;
        ProcPtr body = in->cont;
        if (c.dom().count(z)) {
          std::string z2 = freshName(z);
          body = substitute(body, z, mkVar(z2));
          z = z2;
        }
        Context g2z = g2;
        g2z.entries.push_back(Binding{z, s->payload});
        auto g2u = update(g2z, in->chan, substitute(s->cont, s->binder, mkVar(z)));
        if (g2u && proc(*g2u, body)) return true;
      }
      return false;
    }

    if (const auto* as = std::get_if<AssumeP>(&p->node)) {
      auto d = c.dom();
      for (const auto& x : freeVars(as->formula))
        if (!d.count(x)) return false;
      Context c2 = c;
      c2.entries.push_back(Resource{as->formula});
      return proc(c2, as->body);
    }

    if (const auto* at = std::get_if<AssertP>(&p->node)) {
      for (const auto& [l, r] : splits(c))
        if (form(l, at->formula) && proc(r, at->cont)) return true;
      return false;
    }

    return false;  // unexpanded macro call
  }
};

}  // namespace

std::optional<bool> referenceCheck(const Context& ctx, const ProcPtr& p,
                                   long fuel) {
  if (wfContext(ctx)) return false;
  RefChecker rc{fuel, {}};
  try {
    return rc.proc(ctx, refreshBinders(p));
  } catch (FuelOut&) {
    return std::nullopt;
  }
}

}  // namespace lsp
