#include "lsp/types.hpp"

#include <algorithm>
#include <map>

#include "lsp/print.hpp"

namespace lsp {

// ------------------------------------------------------------- AtomBag

namespace {
std::string atomKey(const AtomF& a) { return prettyPrint(a); }
}  // namespace

void AtomBag::add(const AtomF& atom) {
  auto key = atomKey(atom);
  auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), key,
      [](const AtomF& a, const std::string& k) { return atomKey(a) < k; });
  atoms_.insert(it, atom);
}

void AtomBag::add(const AtomBag& other) {
  for (const auto& a : other.atoms_) add(a);
}

bool AtomBag::removeOne(const AtomF& atom) {
  for (auto it = atoms_.begin(); it != atoms_.end(); ++it)
    if (atomEqual(*it, atom)) {
      atoms_.erase(it);
      return true;
    }
  return false;
}

bool AtomBag::contains(const AtomF& atom) const { return count(atom) > 0; }

int AtomBag::count(const AtomF& atom) const {
  int n = 0;
  for (const auto& a : atoms_)
    if (atomEqual(a, atom)) ++n;
  return n;
}

bool AtomBag::operator==(const AtomBag& other) const {
  if (atoms_.size() != other.atoms_.size()) return false;
  for (size_t i = 0; i < atoms_.size(); ++i)
    if (!atomEqual(atoms_[i], other.atoms_[i])) return false;
  return true;
}

// ------------------------------------------------- formula flattening

namespace {
void flattenInto(const FormulaPtr& f, std::vector<AtomF>& out) {
  if (const auto* a = std::get_if<AtomF>(&f->node)) {
    out.push_back(*a);
  } else if (const auto* t = std::get_if<TensorF>(&f->node)) {
    flattenInto(t->lhs, out);
    flattenInto(t->rhs, out);
  }
}
}  // namespace

AtomBag flattenFormula(const FormulaPtr& f) {
  std::vector<AtomF> atoms;
  flattenInto(f, atoms);
  AtomBag bag;
  for (auto& a : atoms) bag.add(a);
  return bag;
}

bool formulaEquivalent(const FormulaPtr& a, const FormulaPtr& b) {
  return flattenFormula(a) == flattenFormula(b);
}

// ------------------------------------------------------------ unfolding

TypePtr unfold(const TypePtr& t) {
  const auto* m = std::get_if<RecT>(&t->node);
  if (!m) throw NotRecursive{};
  return substTypeVar(m->body, m->var, t);
}

TypePtr unfoldHead(const TypePtr& t) {
  TypePtr cur = t;
  for (int i = 0; i < 1000 && std::holds_alternative<RecT>(cur->node); ++i)
    cur = unfold(cur);
  if (std::holds_alternative<RecT>(cur->node))
    throw std::logic_error("non-contractive type in unfoldHead");
  return cur;
}

// -------------------------------------------------------------- duality

TypePtr dual(const TypePtr& t) {
  if (std::holds_alternative<EndT>(t->node)) return t;
  if (const auto* s = std::get_if<SessionT>(&t->node)) {
    TypePtr cont = dual(s->cont);
    if (!cont) return nullptr;
    Dir flipped = s->dir == Dir::In ? Dir::Out : Dir::In;
    return mkSession(s->q, flipped, s->binder, s->payload, cont);
  }
  if (const auto* m = std::get_if<RecT>(&t->node)) {
    TypePtr body = dual(m->body);
    if (!body) return nullptr;
    return mkRec(m->var, body);
  }
  if (std::holds_alternative<TVarT>(t->node)) return t;
  return nullptr;  // unit/base and refinement types have no dual
}

// --------------------------------------------------------- unrestricted

bool isUnrestricted(const TypePtr& t) {
  TypePtr h = t;
  if (std::holds_alternative<RecT>(h->node)) h = unfoldHead(h);
  if (std::holds_alternative<BaseT>(h->node)) return true;
  if (std::holds_alternative<EndT>(h->node)) return true;
  if (const auto* s = std::get_if<SessionT>(&h->node)) return s->q == Qual::Un;
  return false;
}

bool isUnrestrictedContext(const Context& ctx) {
  for (const auto& e : ctx.entries) {
    if (std::holds_alternative<Resource>(e)) return false;
    if (!isUnrestricted(std::get<Binding>(e).type)) return false;
  }
  return true;
}

// ------------------------------------------------------------------ cf

std::vector<ContextEntry> cfFormula(const FormulaPtr& f) {
  std::vector<AtomF> atoms;
  flattenInto(f, atoms);
  std::vector<ContextEntry> out;
  for (auto& a : atoms) out.push_back(Resource{mkAtom(a.pred, a.args)});
  return out;
}

std::vector<ContextEntry> cfBinding(const std::string& name,
                                    const TypePtr& t) {
  if (const auto* r = std::get_if<RefinedT>(&t->node)) {
    auto out = cfBinding(name, r->base);
    auto atoms = cfFormula(substitute(r->formula, r->binder, mkVar(name)));
    out.insert(out.end(), atoms.begin(), atoms.end());
    return out;
  }
  return {Binding{name, t}};
}

Context cf(const Context& ctx) {
  Context out;
  for (const auto& e : ctx.entries) {
    std::vector<ContextEntry> piece;
    if (const auto* b = std::get_if<Binding>(&e))
      piece = cfBinding(b->name, b->type);
    else
      piece = cfFormula(std::get<Resource>(e).formula);
    out.entries.insert(out.entries.end(), piece.begin(), piece.end());
  }
  return out;
}

// -------------------------------------------------------- contractivity

namespace {

bool recChainOk(const TypePtr& t, std::set<std::string> bound) {
  if (const auto* m = std::get_if<RecT>(&t->node)) {
    bound.insert(m->var);
    return recChainOk(m->body, std::move(bound));
  }
  if (const auto* v = std::get_if<TVarT>(&t->node)) return !bound.count(v->name);
  return true;
}

template <typename Pred>
bool anySubterm(const TypePtr& t, Pred pred) {
  if (pred(t)) return true;
  if (const auto* s = std::get_if<SessionT>(&t->node))
    return anySubterm(s->payload, pred) || anySubterm(s->cont, pred);
  if (const auto* r = std::get_if<RefinedT>(&t->node))
    return anySubterm(r->base, pred);
  if (const auto* m = std::get_if<RecT>(&t->node))
    return anySubterm(m->body, pred);
  return false;
}

}  // namespace

bool isContractive(const TypePtr& t) {
  return !anySubterm(t, [](const TypePtr& u) {
    return std::holds_alternative<RecT>(u->node) && !recChainOk(u, {});
  });
}

bool hasRecursiveRefinement(const TypePtr& t) {
  return anySubterm(t, [](const TypePtr& u) {
    const auto* m = std::get_if<RecT>(&u->node);
    if (!m) return false;
    TypePtr body = m->body;
    while (const auto* inner = std::get_if<RecT>(&body->node))
      body = inner->body;
    return std::holds_alternative<RefinedT>(body->node);
  });
}

// ----------------------------------------------------- type equivalence

namespace {

using AlphaEnv = std::vector<std::pair<std::string, std::string>>;

ValuePtr mapLeft(const ValuePtr& v, const AlphaEnv& env);

ValuePtr mapLeftVar(const std::string& name, const AlphaEnv& env) {
  for (auto it = env.rbegin(); it != env.rend(); ++it)
    if (it->first == name) return mkVar(it->second);
  return mkVar(name);
}

ValuePtr mapLeft(const ValuePtr& v, const AlphaEnv& env) {
  if (const auto* var = std::get_if<VarV>(&v->node))
    return mapLeftVar(var->name, env);
  if (const auto* s = std::get_if<SumV>(&v->node))
    return mkSum(mapLeft(s->lhs, env), mapLeft(s->rhs, env));
  return v;
}

FormulaPtr mapLeft(const FormulaPtr& f, const AlphaEnv& env) {
  if (const auto* a = std::get_if<AtomF>(&f->node)) {
    std::vector<ValuePtr> args;
    for (const auto& arg : a->args) args.push_back(mapLeft(arg, env));
    return mkAtom(a->pred, std::move(args));
  }
  if (const auto* t = std::get_if<TensorF>(&f->node))
    return mkTensor(mapLeft(t->lhs, env), mapLeft(t->rhs, env));
  return f;
}

struct EqChecker {
  std::set<std::string> assumed;

  std::string envKey(const AlphaEnv& env, const TypePtr& a, const TypePtr& b) {
    auto fa = freeVars(a);
    auto fb = freeVars(b);
    // effective mapping: innermost pair per left name
    std::map<std::string, std::string> eff;
    std::set<std::string> seen;
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (!seen.count(it->first)) {
        seen.insert(it->first);
        if (fa.count(it->first) || fb.count(it->second))
          eff[it->first] = it->second;
      }
    std::string out;
    for (const auto& [l, r] : eff) out += l + ">" + r + ";";
    return out;
  }

  bool eq(TypePtr a, TypePtr b, AlphaEnv env) {
    a = unfoldHead(a);
    b = unfoldHead(b);
    std::string key = normalizedPrint(a) + " || " + normalizedPrint(b) +
                      " || " + envKey(env, a, b);
    if (assumed.count(key)) return true;
    assumed.insert(key);

    if (a->node.index() != b->node.index()) return false;
    if (const auto* ba = std::get_if<BaseT>(&a->node))
      return ba->name == std::get<BaseT>(b->node).name;
    if (std::holds_alternative<EndT>(a->node)) return true;
    if (const auto* va = std::get_if<TVarT>(&a->node))
      return va->name == std::get<TVarT>(b->node).name;
    if (const auto* sa = std::get_if<SessionT>(&a->node)) {
      const auto& sb = std::get<SessionT>(b->node);
      if (sa->q != sb.q || sa->dir != sb.dir) return false;
      if (!eq(sa->payload, sb.payload, env)) return false;
      AlphaEnv inner = env;
      inner.emplace_back(sa->binder, sb.binder);
      return eq(sa->cont, sb.cont, inner);
    }
    const auto& ra = std::get<RefinedT>(a->node);
    const auto& rb = std::get<RefinedT>(b->node);
    if (!eq(ra.base, rb.base, env)) return false;
    AlphaEnv inner = env;
    inner.emplace_back(ra.binder, rb.binder);
    return formulaEquivalent(mapLeft(ra.formula, inner), rb.formula);
  }
};

}  // namespace

bool typeEquivalent(const TypePtr& a, const TypePtr& b) {
  EqChecker checker;
  return checker.eq(a, b, {});
}

}  // namespace lsp
