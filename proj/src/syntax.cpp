#include "lsp/syntax.hpp"

#include <atomic>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace lsp {

namespace {

bool natValue(const ValuePtr& v, long long& out) {
  const auto* lit = std::get_if<LitV>(&v->node);
  if (!lit || lit->base != "nat") return false;
  if (lit->text.empty()) return false;
  for (char c : lit->text)
    if (!isdigit(static_cast<unsigned char>(c))) return false;
  out = std::strtoll(lit->text.c_str(), nullptr, 10);
  return true;
}

}  // namespace

ValuePtr mkVar(std::string name) {
  return std::make_shared<Value>(Value{VarV{std::move(name)}});
}
ValuePtr mkUnit() { return std::make_shared<Value>(Value{UnitV{}}); }
ValuePtr mkLit(std::string text, std::string base) {
  return std::make_shared<Value>(Value{LitV{std::move(text), std::move(base)}});
}
ValuePtr mkIntLit(long long n) { return mkLit(std::to_string(n), "nat"); }
ValuePtr mkSum(ValuePtr lhs, ValuePtr rhs) {
  long long a, b;
  if (natValue(lhs, a) && natValue(rhs, b)) return mkIntLit(a + b);
  return std::make_shared<Value>(Value{SumV{std::move(lhs), std::move(rhs)}});
}

bool valueEqual(const ValuePtr& a, const ValuePtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* va = std::get_if<VarV>(&a->node))
    return va->name == std::get<VarV>(b->node).name;
  if (std::holds_alternative<UnitV>(a->node)) return true;
  if (const auto* la = std::get_if<LitV>(&a->node)) {
    const auto& lb = std::get<LitV>(b->node);
    return la->text == lb.text && la->base == lb.base;
  }
  const auto& sa = std::get<SumV>(a->node);
  const auto& sb = std::get<SumV>(b->node);
  return valueEqual(sa.lhs, sb.lhs) && valueEqual(sa.rhs, sb.rhs);
}

FormulaPtr mkAtom(std::string pred, std::vector<ValuePtr> args) {
  return std::make_shared<Formula>(
      Formula{AtomF{std::move(pred), std::move(args)}});
}
FormulaPtr mkTensor(FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<Formula>(
      Formula{TensorF{std::move(lhs), std::move(rhs)}});
}
FormulaPtr mkOne() { return std::make_shared<Formula>(Formula{OneF{}}); }

bool atomEqual(const AtomF& a, const AtomF& b) {
  if (a.pred != b.pred || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!valueEqual(a.args[i], b.args[i])) return false;
  return true;
}

bool formulaEqual(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* aa = std::get_if<AtomF>(&a->node))
    return atomEqual(*aa, std::get<AtomF>(b->node));
  if (std::holds_alternative<OneF>(a->node)) return true;
  const auto& ta = std::get<TensorF>(a->node);
  const auto& tb = std::get<TensorF>(b->node);
  return formulaEqual(ta.lhs, tb.lhs) && formulaEqual(ta.rhs, tb.rhs);
}

TypePtr mkBase(std::string name) {
  return std::make_shared<Type>(Type{BaseT{std::move(name)}});
}
TypePtr mkEnd() { return std::make_shared<Type>(Type{EndT{}}); }
TypePtr mkSession(Qual q, Dir dir, std::string binder, TypePtr payload,
                  TypePtr cont) {
  return std::make_shared<Type>(Type{SessionT{
      q, dir, std::move(binder), std::move(payload), std::move(cont)}});
}
TypePtr mkRefined(std::string binder, TypePtr base, FormulaPtr formula) {
  return std::make_shared<Type>(
      Type{RefinedT{std::move(binder), std::move(base), std::move(formula)}});
}
TypePtr mkTVar(std::string name) {
  return std::make_shared<Type>(Type{TVarT{std::move(name)}});
}
TypePtr mkRec(std::string var, TypePtr body) {
  return std::make_shared<Type>(Type{RecT{std::move(var), std::move(body)}});
}

ProcPtr mkOutput(std::string chan, ValuePtr val, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{OutputP{std::move(chan), std::move(val), std::move(cont)}});
}
ProcPtr mkInput(std::string chan, std::string binder, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{InputP{std::move(chan), std::move(binder), std::move(cont)}});
}
ProcPtr mkPar(ProcPtr lhs, ProcPtr rhs) {
  return std::make_shared<Process>(Process{ParP{std::move(lhs), std::move(rhs)}});
}
ProcPtr mkRepl(ProcPtr body) {
  return std::make_shared<Process>(Process{ReplP{std::move(body)}});
}
ProcPtr mkInact() { return std::make_shared<Process>(Process{InactP{}}); }
ProcPtr mkRestrict(std::string left, std::string right, TypePtr annot,
                   ProcPtr body, TypePtr annotRight) {
  return std::make_shared<Process>(
      Process{RestrictP{std::move(left), std::move(right), std::move(annot),
                        std::move(annotRight), std::move(body)}});
}
ProcPtr mkAssume(FormulaPtr formula, ProcPtr body) {
  return std::make_shared<Process>(
      Process{AssumeP{std::move(formula), std::move(body)}});
}
ProcPtr mkAssert(FormulaPtr formula, ProcPtr cont) {
  return std::make_shared<Process>(
      Process{AssertP{std::move(formula), std::move(cont)}});
}
ProcPtr mkCall(std::string name, std::vector<ValuePtr> args) {
  return std::make_shared<Process>(
      Process{CallP{std::move(name), std::move(args)}});
}

std::set<std::string> Context::dom() const {
  std::set<std::string> d;
  for (const auto& e : entries)
    if (const auto* b = std::get_if<Binding>(&e)) d.insert(b->name);
  return d;
}
bool Context::binds(const std::string& name) const {
  return lookup(name) != nullptr;
}
const TypePtr* Context::lookup(const std::string& name) const {
  for (const auto& e : entries)
    if (const auto* b = std::get_if<Binding>(&e))
      if (b->name == name) return &b->type;
  return nullptr;
}

std::string freshName(const std::string& base) {
  static std::atomic<uint64_t> counter{0};
  std::string stem = base;
  auto quote = stem.find('\'');
  if (quote != std::string::npos) stem = stem.substr(0, quote);
  if (stem.empty()) stem = "v";
  return stem + "'" + std::to_string(counter.fetch_add(1) + 1);
}

// ------------------------------------------------------------ free vars

std::set<std::string> freeVars(const ValuePtr& v) {
  std::set<std::string> out;
  if (const auto* var = std::get_if<VarV>(&v->node)) {
    out.insert(var->name);
  } else if (const auto* s = std::get_if<SumV>(&v->node)) {
    auto l = freeVars(s->lhs);
    out.insert(l.begin(), l.end());
    auto r = freeVars(s->rhs);
    out.insert(r.begin(), r.end());
  }
  return out;
}

std::set<std::string> freeVars(const FormulaPtr& f) {
  std::set<std::string> out;
  if (const auto* a = std::get_if<AtomF>(&f->node)) {
    for (const auto& v : a->args) {
      auto fv = freeVars(v);
      out.insert(fv.begin(), fv.end());
    }
  } else if (const auto* t = std::get_if<TensorF>(&f->node)) {
    auto l = freeVars(t->lhs);
    out.insert(l.begin(), l.end());
    auto r = freeVars(t->rhs);
    out.insert(r.begin(), r.end());
  }
  return out;
}

std::set<std::string> freeVars(const TypePtr& t) {
  std::set<std::string> out;
  if (const auto* s = std::get_if<SessionT>(&t->node)) {
    auto p = freeVars(s->payload);
    out.insert(p.begin(), p.end());
    auto c = freeVars(s->cont);
    c.erase(s->binder);
    out.insert(c.begin(), c.end());
  } else if (const auto* r = std::get_if<RefinedT>(&t->node)) {
    auto b = freeVars(r->base);
    out.insert(b.begin(), b.end());
    auto f = freeVars(r->formula);
    f.erase(r->binder);
    out.insert(f.begin(), f.end());
  } else if (const auto* m = std::get_if<RecT>(&t->node)) {
    return freeVars(m->body);
  }
  return out;
}

std::set<std::string> freeVars(const ProcPtr& p) {
  std::set<std::string> out;
  auto add = [&out](std::set<std::string> s) {
    out.insert(s.begin(), s.end());
  };
  if (const auto* o = std::get_if<OutputP>(&p->node)) {
    out.insert(o->chan);
    add(freeVars(o->val));
    add(freeVars(o->cont));
  } else if (const auto* i = std::get_if<InputP>(&p->node)) {
    out.insert(i->chan);
    auto c = freeVars(i->cont);
    c.erase(i->binder);
    add(std::move(c));
  } else if (const auto* pa = std::get_if<ParP>(&p->node)) {
    add(freeVars(pa->lhs));
    add(freeVars(pa->rhs));
  } else if (const auto* r = std::get_if<ReplP>(&p->node)) {
    add(freeVars(r->body));
  } else if (const auto* n = std::get_if<RestrictP>(&p->node)) {
    add(freeVars(n->annot));
    if (n->annotRight) add(freeVars(n->annotRight));
    auto b = freeVars(n->body);
    b.erase(n->left);
    b.erase(n->right);
    add(std::move(b));
  } else if (const auto* a = std::get_if<AssumeP>(&p->node)) {
    add(freeVars(a->formula));
    add(freeVars(a->body));
  } else if (const auto* as = std::get_if<AssertP>(&p->node)) {
    add(freeVars(as->formula));
    add(freeVars(as->cont));
  } else if (const auto* c = std::get_if<CallP>(&p->node)) {
    for (const auto& v : c->args) add(freeVars(v));
  }
  return out;
}

std::set<std::string> freeTypeVars(const TypePtr& t) {
  std::set<std::string> out;
  if (const auto* v = std::get_if<TVarT>(&t->node)) {
    out.insert(v->name);
  } else if (const auto* s = std::get_if<SessionT>(&t->node)) {
    auto p = freeTypeVars(s->payload);
    out.insert(p.begin(), p.end());
    auto c = freeTypeVars(s->cont);
    out.insert(c.begin(), c.end());
  } else if (const auto* r = std::get_if<RefinedT>(&t->node)) {
    return freeTypeVars(r->base);
  } else if (const auto* m = std::get_if<RecT>(&t->node)) {
    auto b = freeTypeVars(m->body);
    b.erase(m->var);
    out = std::move(b);
  }
  return out;
}

// ---------------------------------------------------------- substitution

ValuePtr substitute(const ValuePtr& in, const std::string& x,
                    const ValuePtr& v) {
  if (const auto* var = std::get_if<VarV>(&in->node))
    return var->name == x ? v : in;
  if (const auto* s = std::get_if<SumV>(&in->node))
    return mkSum(substitute(s->lhs, x, v), substitute(s->rhs, x, v));
  return in;
}

FormulaPtr substitute(const FormulaPtr& in, const std::string& x,
                      const ValuePtr& v) {
  if (const auto* a = std::get_if<AtomF>(&in->node)) {
    std::vector<ValuePtr> args;
    args.reserve(a->args.size());
    for (const auto& arg : a->args) args.push_back(substitute(arg, x, v));
    return mkAtom(a->pred, std::move(args));
  }
  if (const auto* t = std::get_if<TensorF>(&in->node))
    return mkTensor(substitute(t->lhs, x, v), substitute(t->rhs, x, v));
  return in;
}

TypePtr substitute(const TypePtr& in, const std::string& x, const ValuePtr& v) {
  if (const auto* s = std::get_if<SessionT>(&in->node)) {
    TypePtr payload = substitute(s->payload, x, v);
    if (s->binder == x) return mkSession(s->q, s->dir, s->binder, payload, s->cont);
    std::string binder = s->binder;
    TypePtr cont = s->cont;
    if (freeVars(v).count(binder)) {
      std::string nb = freshName(binder);
      cont = substitute(cont, binder, mkVar(nb));
      binder = nb;
    }
    return mkSession(s->q, s->dir, binder, payload, substitute(cont, x, v));
  }
  if (const auto* r = std::get_if<RefinedT>(&in->node)) {
    TypePtr base = substitute(r->base, x, v);
    if (r->binder == x) return mkRefined(r->binder, base, r->formula);
    std::string binder = r->binder;
    FormulaPtr formula = r->formula;
    if (freeVars(v).count(binder)) {
      std::string nb = freshName(binder);
      formula = substitute(formula, binder, mkVar(nb));
      binder = nb;
    }
    return mkRefined(binder, base, substitute(formula, x, v));
  }
  if (const auto* m = std::get_if<RecT>(&in->node))
    return mkRec(m->var, substitute(m->body, x, v));
  return in;
}

ProcPtr substitute(const ProcPtr& in, const std::string& x, const ValuePtr& v) {
  auto substChan = [&](const std::string& chan) -> std::string {
    if (chan != x) return chan;
    if (const auto* var = std::get_if<VarV>(&v->node)) return var->name;
    return chan;  // channels are only ever replaced by variables
  };
  if (const auto* o = std::get_if<OutputP>(&in->node))
    return mkOutput(substChan(o->chan), substitute(o->val, x, v),
                    substitute(o->cont, x, v));
  if (const auto* i = std::get_if<InputP>(&in->node)) {
    std::string chan = substChan(i->chan);
    if (i->binder == x) return mkInput(chan, i->binder, i->cont);
    std::string binder = i->binder;
    ProcPtr cont = i->cont;
    if (freeVars(v).count(binder)) {
      std::string nb = freshName(binder);
      cont = substitute(cont, binder, mkVar(nb));
      binder = nb;
    }
    return mkInput(chan, binder, substitute(cont, x, v));
  }
  if (const auto* pa = std::get_if<ParP>(&in->node))
    return mkPar(substitute(pa->lhs, x, v), substitute(pa->rhs, x, v));
  if (const auto* r = std::get_if<ReplP>(&in->node))
    return mkRepl(substitute(r->body, x, v));
  if (std::holds_alternative<InactP>(in->node)) return in;
  if (const auto* n = std::get_if<RestrictP>(&in->node)) {
    TypePtr annot = substitute(n->annot, x, v);
    TypePtr annotRight =
        n->annotRight ? substitute(n->annotRight, x, v) : nullptr;
    if (n->left == x || n->right == x)
      return mkRestrict(n->left, n->right, annot, n->body, annotRight);
    std::string left = n->left, right = n->right;
    ProcPtr body = n->body;
    auto fv = freeVars(v);
    if (fv.count(left)) {
      std::string nl = freshName(left);
      body = substitute(body, left, mkVar(nl));
      left = nl;
    }
    if (fv.count(right)) {
      std::string nr = freshName(right);
      body = substitute(body, right, mkVar(nr));
      right = nr;
    }
    return mkRestrict(left, right, annot, substitute(body, x, v), annotRight);
  }
  if (const auto* a = std::get_if<AssumeP>(&in->node))
    return mkAssume(substitute(a->formula, x, v), substitute(a->body, x, v));
  if (const auto* as = std::get_if<AssertP>(&in->node))
    return mkAssert(substitute(as->formula, x, v), substitute(as->cont, x, v));
  const auto& c = std::get<CallP>(in->node);
  std::vector<ValuePtr> args;
  args.reserve(c.args.size());
  for (const auto& arg : c.args) args.push_back(substitute(arg, x, v));
  return mkCall(c.name, std::move(args));
}

TypePtr substTypeVar(const TypePtr& in, const std::string& alpha,
                     const TypePtr& t) {
  if (const auto* v = std::get_if<TVarT>(&in->node))
    return v->name == alpha ? t : in;
  if (const auto* s = std::get_if<SessionT>(&in->node))
    return mkSession(s->q, s->dir, s->binder,
                     substTypeVar(s->payload, alpha, t),
                     substTypeVar(s->cont, alpha, t));
  if (const auto* r = std::get_if<RefinedT>(&in->node))
    return mkRefined(r->binder, substTypeVar(r->base, alpha, t), r->formula);
  if (const auto* m = std::get_if<RecT>(&in->node)) {
    if (m->var == alpha) return in;
    if (freeTypeVars(t).count(m->var)) {
      std::string nv = freshName(m->var);
      TypePtr body = substTypeVar(m->body, m->var, mkTVar(nv));
      return mkRec(nv, substTypeVar(body, alpha, t));
    }
    return mkRec(m->var, substTypeVar(m->body, alpha, t));
  }
  return in;
}

// ------------------------------------------------------ binder refresh

namespace {

using Renaming = std::map<std::string, std::string>;

ValuePtr renameValue(const ValuePtr& v, const Renaming& env) {
  if (const auto* var = std::get_if<VarV>(&v->node)) {
    auto it = env.find(var->name);
    return it == env.end() ? v : mkVar(it->second);
  }
  if (const auto* s = std::get_if<SumV>(&v->node))
    return mkSum(renameValue(s->lhs, env), renameValue(s->rhs, env));
  return v;
}

FormulaPtr renameFormula(const FormulaPtr& f, const Renaming& env) {
  if (const auto* a = std::get_if<AtomF>(&f->node)) {
    std::vector<ValuePtr> args;
    for (const auto& arg : a->args) args.push_back(renameValue(arg, env));
    return mkAtom(a->pred, std::move(args));
  }
  if (const auto* t = std::get_if<TensorF>(&f->node))
    return mkTensor(renameFormula(t->lhs, env), renameFormula(t->rhs, env));
  return f;
}

TypePtr renameType(const TypePtr& t, Renaming env) {
  if (const auto* s = std::get_if<SessionT>(&t->node)) {
    TypePtr payload = renameType(s->payload, env);
    Renaming inner = env;
    inner.erase(s->binder);
    return mkSession(s->q, s->dir, s->binder, payload,
                     renameType(s->cont, inner));
  }
  if (const auto* r = std::get_if<RefinedT>(&t->node)) {
    TypePtr base = renameType(r->base, env);
    Renaming inner = env;
    inner.erase(r->binder);
    return mkRefined(r->binder, base, renameFormula(r->formula, inner));
  }
  if (const auto* m = std::get_if<RecT>(&t->node))
    return mkRec(m->var, renameType(m->body, env));
  return t;
}

struct Refresher {
  std::set<std::string> used;

  std::string bind(const std::string& name, Renaming& env) {
    std::string chosen = name;
    if (used.count(chosen)) chosen = freshName(name);
    while (used.count(chosen)) chosen = freshName(name);
    used.insert(chosen);
    if (chosen != name)
      env[name] = chosen;
    else
      env.erase(name);
    return chosen;
  }

  ProcPtr go(const ProcPtr& p, Renaming env) {
    auto chan = [&env](const std::string& c) {
      auto it = env.find(c);
      return it == env.end() ? c : it->second;
    };
    if (const auto* o = std::get_if<OutputP>(&p->node))
      return mkOutput(chan(o->chan), renameValue(o->val, env),
                      go(o->cont, env));
    if (const auto* i = std::get_if<InputP>(&p->node)) {
      std::string c = chan(i->chan);
      Renaming inner = env;
      std::string binder = bind(i->binder, inner);
      return mkInput(c, binder, go(i->cont, inner));
    }
    if (const auto* pa = std::get_if<ParP>(&p->node))
      return mkPar(go(pa->lhs, env), go(pa->rhs, env));
    if (const auto* r = std::get_if<ReplP>(&p->node))
      return mkRepl(go(r->body, env));
    if (std::holds_alternative<InactP>(p->node)) return p;
    if (const auto* n = std::get_if<RestrictP>(&p->node)) {
      TypePtr annot = renameType(n->annot, env);
      TypePtr annotRight =
          n->annotRight ? renameType(n->annotRight, env) : nullptr;
      Renaming inner = env;
      std::string left = bind(n->left, inner);
      std::string right = bind(n->right, inner);
      return mkRestrict(left, right, annot, go(n->body, inner), annotRight);
    }
    if (const auto* a = std::get_if<AssumeP>(&p->node))
      return mkAssume(renameFormula(a->formula, env), go(a->body, env));
    if (const auto* as = std::get_if<AssertP>(&p->node))
      return mkAssert(renameFormula(as->formula, env), go(as->cont, env));
    const auto& c = std::get<CallP>(p->node);
    std::vector<ValuePtr> args;
    for (const auto& arg : c.args) args.push_back(renameValue(arg, env));
    return mkCall(c.name, std::move(args));
  }
};

}  // namespace

ProcPtr refreshBinders(const ProcPtr& p) {
  Refresher r;
  r.used = freeVars(p);
  return r.go(p, {});
}

// --------------------------------------------------- alpha equivalence

namespace {

// env maps left-side binder names to right-side binder names.
using AlphaEnv = std::vector<std::pair<std::string, std::string>>;

bool lookupAlpha(const AlphaEnv& env, const std::string& l, std::string& out) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == l) {
      out = it->second;
      return true;
    }
  return false;
}

bool boundRight(const AlphaEnv& env, const std::string& r) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->second == r) return true;
  return false;
}

bool eqName(const AlphaEnv& env, const std::string& l, const std::string& r) {
  std::string mapped;
  if (lookupAlpha(env, l, mapped)) return mapped == r;
  return !boundRight(env, r) && l == r;
}

bool eqValue(const ValuePtr& a, const ValuePtr& b, const AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* va = std::get_if<VarV>(&a->node))
    return eqName(env, va->name, std::get<VarV>(b->node).name);
  if (std::holds_alternative<UnitV>(a->node)) return true;
  if (const auto* la = std::get_if<LitV>(&a->node)) {
    const auto& lb = std::get<LitV>(b->node);
    return la->text == lb.text && la->base == lb.base;
  }
  const auto& sa = std::get<SumV>(a->node);
  const auto& sb = std::get<SumV>(b->node);
  return eqValue(sa.lhs, sb.lhs, env) && eqValue(sa.rhs, sb.rhs, env);
}

bool eqFormula(const FormulaPtr& a, const FormulaPtr& b, const AlphaEnv& env) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* aa = std::get_if<AtomF>(&a->node)) {
    const auto& ab = std::get<AtomF>(b->node);
    if (aa->pred != ab.pred || aa->args.size() != ab.args.size()) return false;
    for (size_t i = 0; i < aa->args.size(); ++i)
      if (!eqValue(aa->args[i], ab.args[i], env)) return false;
    return true;
  }
  if (std::holds_alternative<OneF>(a->node)) return true;
  const auto& ta = std::get<TensorF>(a->node);
  const auto& tb = std::get<TensorF>(b->node);
  return eqFormula(ta.lhs, tb.lhs, env) && eqFormula(ta.rhs, tb.rhs, env);
}

bool eqType(const TypePtr& a, const TypePtr& b, AlphaEnv env) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* ba = std::get_if<BaseT>(&a->node))
    return ba->name == std::get<BaseT>(b->node).name;
  if (std::holds_alternative<EndT>(a->node)) return true;
  if (const auto* sa = std::get_if<SessionT>(&a->node)) {
    const auto& sb = std::get<SessionT>(b->node);
    if (sa->q != sb.q || sa->dir != sb.dir) return false;
    if (!eqType(sa->payload, sb.payload, env)) return false;
    env.emplace_back(sa->binder, sb.binder);
    return eqType(sa->cont, sb.cont, env);
  }
  if (const auto* ra = std::get_if<RefinedT>(&a->node)) {
    const auto& rb = std::get<RefinedT>(b->node);
    if (!eqType(ra->base, rb.base, env)) return false;
    env.emplace_back(ra->binder, rb.binder);
    return eqFormula(ra->formula, rb.formula, env);
  }
  if (const auto* va = std::get_if<TVarT>(&a->node))
    return eqName(env, va->name, std::get<TVarT>(b->node).name);
  const auto& ma = std::get<RecT>(a->node);
  const auto& mb = std::get<RecT>(b->node);
  env.emplace_back(ma.var, mb.var);
  return eqType(ma.body, mb.body, env);
}

bool eqProc(const ProcPtr& a, const ProcPtr& b, AlphaEnv env) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* oa = std::get_if<OutputP>(&a->node)) {
    const auto& ob = std::get<OutputP>(b->node);
    return eqName(env, oa->chan, ob.chan) && eqValue(oa->val, ob.val, env) &&
           eqProc(oa->cont, ob.cont, env);
  }
  if (const auto* ia = std::get_if<InputP>(&a->node)) {
    const auto& ib = std::get<InputP>(b->node);
    if (!eqName(env, ia->chan, ib.chan)) return false;
    env.emplace_back(ia->binder, ib.binder);
    return eqProc(ia->cont, ib.cont, env);
  }
  if (const auto* pa = std::get_if<ParP>(&a->node)) {
    const auto& pb = std::get<ParP>(b->node);
    return eqProc(pa->lhs, pb.lhs, env) && eqProc(pa->rhs, pb.rhs, env);
  }
  if (const auto* ra = std::get_if<ReplP>(&a->node))
    return eqProc(ra->body, std::get<ReplP>(b->node).body, env);
  if (std::holds_alternative<InactP>(a->node)) return true;
  if (const auto* na = std::get_if<RestrictP>(&a->node)) {
    const auto& nb = std::get<RestrictP>(b->node);
    if (!eqType(na->annot, nb.annot, env)) return false;
    if ((na->annotRight == nullptr) != (nb.annotRight == nullptr)) return false;
    if (na->annotRight && !eqType(na->annotRight, nb.annotRight, env))
      return false;
    env.emplace_back(na->left, nb.left);
    env.emplace_back(na->right, nb.right);
    return eqProc(na->body, nb.body, env);
  }
  if (const auto* aa = std::get_if<AssumeP>(&a->node)) {
    const auto& ab = std::get<AssumeP>(b->node);
    return eqFormula(aa->formula, ab.formula, env) &&
           eqProc(aa->body, ab.body, env);
  }
  if (const auto* sa = std::get_if<AssertP>(&a->node)) {
    const auto& sb = std::get<AssertP>(b->node);
    return eqFormula(sa->formula, sb.formula, env) &&
           eqProc(sa->cont, sb.cont, env);
  }
  const auto& ca = std::get<CallP>(a->node);
  const auto& cb = std::get<CallP>(b->node);
  if (ca.name != cb.name || ca.args.size() != cb.args.size()) return false;
  for (size_t i = 0; i < ca.args.size(); ++i)
    if (!eqValue(ca.args[i], cb.args[i], env)) return false;
  return true;
}

}  // namespace

bool alphaEqual(const TypePtr& a, const TypePtr& b) { return eqType(a, b, {}); }
bool alphaEqual(const ProcPtr& a, const ProcPtr& b) { return eqProc(a, b, {}); }

}  // namespace lsp
