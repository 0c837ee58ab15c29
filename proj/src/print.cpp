#include "lsp/print.hpp"

#include <map>

namespace lsp {

namespace {

bool plainInt(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string printValue(const ValuePtr& v) {
  if (const auto* var = std::get_if<VarV>(&v->node)) return var->name;
  if (std::holds_alternative<UnitV>(v->node)) return "()";
  if (const auto* lit = std::get_if<LitV>(&v->node)) {
    if (lit->base == "nat" && plainInt(lit->text)) return lit->text;
    return "`" + lit->text + ":" + lit->base;
  }
  const auto& s = std::get<SumV>(v->node);
  return printValue(s.lhs) + "+" + printValue(s.rhs);
}

std::string printFormula(const FormulaPtr& f) {
  if (const auto* a = std::get_if<AtomF>(&f->node)) {
    if (a->args.empty()) return a->pred;
    std::string out = a->pred + "(";
    for (size_t i = 0; i < a->args.size(); ++i) {
      if (i) out += ",";
      out += printValue(a->args[i]);
    }
    return out + ")";
  }
  if (std::holds_alternative<OneF>(f->node)) return "1";
  const auto& t = std::get<TensorF>(f->node);
  std::string rhs = printFormula(t.rhs);
  if (std::holds_alternative<TensorF>(t.rhs->node)) rhs = "(" + rhs + ")";
  return printFormula(t.lhs) + " * " + rhs;
}

std::string printType(const TypePtr& t) {
  if (const auto* b = std::get_if<BaseT>(&t->node)) return b->name;
  if (std::holds_alternative<EndT>(t->node)) return "end";
  if (const auto* s = std::get_if<SessionT>(&t->node)) {
    std::string out = s->q == Qual::Lin ? "lin " : "un ";
    out += s->dir == Dir::Out ? "!" : "?";
    out += s->binder + ":";
    std::string payload = printType(s->payload);
    if (std::holds_alternative<SessionT>(s->payload->node) ||
        std::holds_alternative<RecT>(s->payload->node))
      payload = "(" + payload + ")";
    out += payload + ". " + printType(s->cont);
    return out;
  }
  if (const auto* r = std::get_if<RefinedT>(&t->node))
    return "{" + r->binder + ":" + printType(r->base) + " | " +
           printFormula(r->formula) + "}";
  if (const auto* v = std::get_if<TVarT>(&t->node)) return v->name;
  const auto& m = std::get<RecT>(t->node);
  return "rec " + m.var + ". " + printType(m.body);
}

std::string printProc(const ProcPtr& p);

// A prefix-level operand: parenthesized when it is a parallel composition.
std::string printOperand(const ProcPtr& p) {
  std::string out = printProc(p);
  if (std::holds_alternative<ParP>(p->node)) out = "(" + out + ")";
  return out;
}

std::string printProc(const ProcPtr& p) {
  if (const auto* o = std::get_if<OutputP>(&p->node))
    return o->chan + "!" + printValue(o->val) + ". " + printOperand(o->cont);
  if (const auto* i = std::get_if<InputP>(&p->node))
    return i->chan + "?" + i->binder + ". " + printOperand(i->cont);
  if (const auto* pa = std::get_if<ParP>(&p->node)) {
    // `|` parses left-associatively; parenthesize a nested right operand
    // so the tree shape survives a round trip.
    std::string rhs = printProc(pa->rhs);
    if (std::holds_alternative<ParP>(pa->rhs->node)) rhs = "(" + rhs + ")";
    return printProc(pa->lhs) + " | " + rhs;
  }
  if (const auto* r = std::get_if<ReplP>(&p->node))
    return "*" + printOperand(r->body);
  if (std::holds_alternative<InactP>(p->node)) return "0";
  if (const auto* n = std::get_if<RestrictP>(&p->node)) {
    std::string annot = printType(n->annot);
    if (n->annotRight) annot += ", " + printType(n->annotRight);
    return "new " + n->left + " " + n->right + ":(" + annot + ") " +
           printOperand(n->body);
  }
  if (const auto* a = std::get_if<AssumeP>(&p->node))
    return "(assume " + printFormula(a->formula) + ") " +
           printOperand(a->body);
  if (const auto* as = std::get_if<AssertP>(&p->node))
    return "assert " + printFormula(as->formula) + ". " +
           printOperand(as->cont);
  const auto& c = std::get<CallP>(p->node);
  std::string out = c.name + "(";
  for (size_t i = 0; i < c.args.size(); ++i) {
    if (i) out += ",";
    out += printValue(c.args[i]);
  }
  return out + ")";
}

}  // namespace

std::string prettyPrint(const ValuePtr& v) { return printValue(v); }
std::string prettyPrint(const FormulaPtr& f) { return printFormula(f); }
std::string prettyPrint(const TypePtr& t) { return printType(t); }
std::string prettyPrint(const ProcPtr& p) { return printProc(p); }
std::string prettyPrint(const AtomF& a) {
  return printFormula(mkAtom(a.pred, a.args));
}

std::string prettyPrint(const Context& ctx) {
  std::string out;
  for (const auto& e : ctx.entries) {
    if (!out.empty()) out += ", ";
    if (const auto* b = std::get_if<Binding>(&e))
      out += b->name + ":" + printType(b->type);
    else
      out += printFormula(std::get<Resource>(e).formula);
  }
  return out.empty() ? "." : out;
}

// ------------------------------------------------- normalized printing

namespace {

struct Normalizer {
  std::set<std::string> avoid;
  int counter = 0;

  std::string next(const char* stem) {
    std::string name;
    do {
      name = stem + std::to_string(counter++);
    } while (avoid.count(name));
    return name;
  }

  using Env = std::map<std::string, std::string>;

  ValuePtr value(const ValuePtr& v, const Env& env) {
    if (const auto* var = std::get_if<VarV>(&v->node)) {
      auto it = env.find(var->name);
      return it == env.end() ? v : mkVar(it->second);
    }
    if (const auto* s = std::get_if<SumV>(&v->node))
      return mkSum(value(s->lhs, env), value(s->rhs, env));
    return v;
  }

  FormulaPtr formula(const FormulaPtr& f, const Env& env) {
    if (const auto* a = std::get_if<AtomF>(&f->node)) {
      std::vector<ValuePtr> args;
      for (const auto& arg : a->args) args.push_back(value(arg, env));
      return mkAtom(a->pred, std::move(args));
    }
    if (const auto* t = std::get_if<TensorF>(&f->node))
      return mkTensor(formula(t->lhs, env), formula(t->rhs, env));
    return f;
  }

  TypePtr type(const TypePtr& t, Env env) {
    if (const auto* s = std::get_if<SessionT>(&t->node)) {
      TypePtr payload = type(s->payload, env);
      Env inner = env;
      std::string b = next("b");
      inner[s->binder] = b;
      return mkSession(s->q, s->dir, b, payload, type(s->cont, inner));
    }
    if (const auto* r = std::get_if<RefinedT>(&t->node)) {
      TypePtr base = type(r->base, env);
      Env inner = env;
      std::string b = next("b");
      inner[r->binder] = b;
      return mkRefined(b, base, formula(r->formula, inner));
    }
    if (const auto* m = std::get_if<RecT>(&t->node)) {
      Env inner = env;
      std::string a = next("a");
      inner[m->var] = a;
      return mkRec(a, type(m->body, inner));
    }
    if (const auto* v = std::get_if<TVarT>(&t->node)) {
      auto it = env.find(v->name);
      return it == env.end() ? t : mkTVar(it->second);
    }
    return t;
  }

  ProcPtr proc(const ProcPtr& p, Env env) {
    auto chan = [&env](const std::string& c) {
      auto it = env.find(c);
      return it == env.end() ? c : it->second;
    };
    if (const auto* o = std::get_if<OutputP>(&p->node))
      return mkOutput(chan(o->chan), value(o->val, env), proc(o->cont, env));
    if (const auto* i = std::get_if<InputP>(&p->node)) {
      std::string c = chan(i->chan);
      Env inner = env;
      std::string b = next("b");
      inner[i->binder] = b;
      return mkInput(c, b, proc(i->cont, inner));
    }
    if (const auto* pa = std::get_if<ParP>(&p->node))
      return mkPar(proc(pa->lhs, env), proc(pa->rhs, env));
    if (const auto* r = std::get_if<ReplP>(&p->node))
      return mkRepl(proc(r->body, env));
    if (std::holds_alternative<InactP>(p->node)) return p;
    if (const auto* n = std::get_if<RestrictP>(&p->node)) {
      TypePtr annot = type(n->annot, env);
      TypePtr annotRight = n->annotRight ? type(n->annotRight, env) : nullptr;
      Env inner = env;
      std::string l = next("b");
      std::string r = next("b");
      inner[n->left] = l;
      inner[n->right] = r;
      return mkRestrict(l, r, annot, proc(n->body, inner), annotRight);
    }
    if (const auto* a = std::get_if<AssumeP>(&p->node))
      return mkAssume(formula(a->formula, env), proc(a->body, env));
    if (const auto* as = std::get_if<AssertP>(&p->node))
      return mkAssert(formula(as->formula, env), proc(as->cont, env));
    const auto& c = std::get<CallP>(p->node);
    std::vector<ValuePtr> args;
    for (const auto& arg : c.args) args.push_back(value(arg, env));
    return mkCall(c.name, std::move(args));
  }
};

}  // namespace

std::string normalizedPrint(const ProcPtr& p) {
  Normalizer n;
  n.avoid = freeVars(p);
  return printProc(n.proc(p, {}));
}

std::string normalizedPrint(const TypePtr& t) {
  Normalizer n;
  n.avoid = freeVars(t);
  return printType(n.type(t, {}));
}

}  // namespace lsp
