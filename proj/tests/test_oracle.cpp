#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "lsp/parser.hpp"
#include "lsp/print.hpp"
#include "lsp/typing.hpp"

using namespace lsp;
using testutil::Gen;

namespace {

std::vector<std::string> boundNames(const Context& ctx) {
  std::vector<std::string> out;
  for (const auto& e : ctx.entries)
    if (const auto* b = std::get_if<Binding>(&e)) out.push_back(b->name);
  return out;
}

Context substContext(const Context& ctx, size_t skip, const std::string& x,
                     const ValuePtr& v) {
  Context out;
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    if (i == skip) continue;
    if (const auto* b = std::get_if<Binding>(&ctx.entries[i]))
      out.entries.push_back(Binding{b->name, substitute(b->type, x, v)});
    else
      out.entries.push_back(
          Resource{substitute(std::get<Resource>(ctx.entries[i]).formula, x, v)});
  }
  return out;
}

}  // namespace

TEST_CASE("oracle agreement on the corpus") {
  for (const auto& f : testutil::corpusFiles()) {
    Program prog = testutil::loadCorpus(f);
    ExpandResult e = expandMacros(prog);
    REQUIRE(e.ok());
    CheckResult algo = typecheck(prog);
    std::optional<bool> oracle =
        referenceCheck(prog.declaredContext, e.process, 2000000);
    CAPTURE(f);
    if (oracle.has_value()) CHECK(algo.ok == *oracle);
  }
}

TEST_CASE("oracle agreement on random processes") {
  Gen gen(42);
  int compared = 0, attempts = 0;
  int disagreements = 0;
  while (compared < 500 && attempts < 20000) {
    ++attempts;
    Context ctx = gen.context(gen.pick(3));
    if (wfContext(ctx).has_value()) continue;
    ProcPtr p = gen.process(boundNames(ctx), 5);
    CheckResult algo = typecheckProcess(ctx, p);
    std::optional<bool> oracle = referenceCheck(ctx, p, 300000);
    if (!oracle.has_value()) continue;
    ++compared;
    if (algo.ok != *oracle) {
      ++disagreements;
      CAPTURE(prettyPrint(ctx));
      CAPTURE(prettyPrint(p));
      CHECK(algo.ok == *oracle);
    }
  }
  CHECK(compared >= 500);
  CHECK(disagreements == 0);
}

TEST_CASE("weakening: a fresh unrestricted binding preserves typability") {
  Gen gen(7);
  int found = 0, attempts = 0;
  while (found < 200 && attempts < 20000) {
    ++attempts;
    Context ctx = gen.context(gen.pick(3));
    if (wfContext(ctx).has_value()) continue;
    ProcPtr p = gen.process(boundNames(ctx), 4);
    if (!typecheckProcess(ctx, p).ok) continue;
    ++found;
    Context wider = ctx;
    TypePtr t = gen.coin() ? mkEnd() : mkBase("nat");
    wider.entries.push_back(Binding{"fresh_w", t});
    CAPTURE(prettyPrint(ctx));
    CAPTURE(prettyPrint(p));
    CHECK(typecheckProcess(wider, p).ok);
  }
  CHECK(found >= 200);
}

TEST_CASE("strengthening: an unused unrestricted binding can be dropped") {
  Gen gen(11);
  int found = 0, attempts = 0;
  while (found < 200 && attempts < 30000) {
    ++attempts;
    Context ctx = gen.context(gen.pick(3));
    if (wfContext(ctx).has_value()) continue;
    ProcPtr p = gen.process(boundNames(ctx), 4);
    Context wider = ctx;
    TypePtr t = gen.coin() ? mkEnd() : mkBase("unit");
    wider.entries.push_back(Binding{"fresh_s", t});
    if (!typecheckProcess(wider, p).ok) continue;
    if (freeVars(p).count("fresh_s")) continue;
    ++found;
    CAPTURE(prettyPrint(ctx));
    CAPTURE(prettyPrint(p));
    CHECK(typecheckProcess(ctx, p).ok);
  }
  CHECK(found >= 200);
}

TEST_CASE("substitution: a base binding can be instantiated by a literal") {
  Gen gen(13);
  int found = 0, attempts = 0;
  while (found < 200 && attempts < 40000) {
    ++attempts;
    Context ctx = gen.context(1 + gen.pick(3));
    if (wfContext(ctx).has_value()) continue;
    // pick a nat binding to instantiate
    int idx = -1;
    for (size_t i = 0; i < ctx.entries.size(); ++i)
      if (const auto* b = std::get_if<Binding>(&ctx.entries[i]))
        if (const auto* base = std::get_if<BaseT>(&b->type->node))
          if (base->name == "nat") idx = (int)i;
    if (idx < 0) continue;
    ProcPtr p = gen.process(boundNames(ctx), 4);
    if (!typecheckProcess(ctx, p).ok) continue;
    ++found;
    std::string x = std::get<Binding>(ctx.entries[idx]).name;
    ValuePtr v = mkIntLit(gen.pick(100));
    Context inst = substContext(ctx, (size_t)idx, x, v);
    ProcPtr q = substitute(p, x, v);
    CAPTURE(prettyPrint(ctx));
    CAPTURE(prettyPrint(p));
    CAPTURE(x);
    CHECK(typecheckProcess(inst, q).ok);
  }
  CHECK(found >= 200);
}

TEST_CASE("dual is an involution on session types") {
  Gen gen(17);
  int checked = 0, attempts = 0;
  while (checked < 1000 && attempts < 10000) {
    ++attempts;
    TypePtr t = gen.type(3);
    TypePtr d = dual(t);
    if (!d) continue;
    ++checked;
    TypePtr dd = dual(d);
    REQUIRE(dd != nullptr);
    CHECK(alphaEqual(dd, t));
    CHECK(typeEquivalent(dd, t));
  }
  CHECK(checked >= 1000);
}

TEST_CASE("equivalent types have equivalent duals") {
  Gen gen(29);
  int checked = 0, attempts = 0;
  while (checked < 500 && attempts < 10000) {
    ++attempts;
    TypePtr t = gen.type(3);
    if (!std::holds_alternative<RecT>(t->node)) continue;
    TypePtr d = dual(t);
    if (!d) continue;
    ++checked;
    TypePtr u = unfold(t);
    REQUIRE(typeEquivalent(t, u));
    TypePtr du = dual(u);
    REQUIRE(du != nullptr);
    CHECK(typeEquivalent(d, du));
  }
  CHECK(checked >= 500);
}

TEST_CASE("cf is idempotent and preserves the domain") {
  Gen gen(19);
  for (int i = 0; i < 1000; ++i) {
    Context ctx = gen.context(1 + gen.pick(4));
    Context once = cf(ctx);
    Context twice = cf(once);
    CHECK(prettyPrint(once) == prettyPrint(twice));
    std::vector<std::string> a = boundNames(ctx), b = boundNames(once);
    CHECK(a == b);
  }
}

TEST_CASE("flattenFormula is a bag homomorphism") {
  Gen gen(23);
  for (int i = 0; i < 1000; ++i) {
    FormulaPtr f = gen.formula({"u", "v"}, 2);
    FormulaPtr g = gen.formula({"u", "v"}, 2);
    AtomBag joint = flattenFormula(mkTensor(f, g));
    AtomBag manual = flattenFormula(f);
    manual.add(flattenFormula(g));
    CHECK(joint == manual);
    CHECK(formulaEquivalent(mkTensor(f, g), mkTensor(g, f)));
    CHECK(formulaEquivalent(mkTensor(f, mkOne()), f));
  }
}

TEST_CASE("parse/print round trip on random terms") {
  Gen gen(31);
  for (int i = 0; i < 1000; ++i) {
    ProcPtr p = gen.process({"ch0", "ch1"}, 4);
    ProcPtr back = parseProcessText(prettyPrint(p));
    REQUIRE(back != nullptr);
    CHECK(alphaEqual(p, back));

    TypePtr t = gen.type(3);
    TypePtr tBack = parseTypeText(prettyPrint(t));
    REQUIRE(tBack != nullptr);
    CHECK(alphaEqual(t, tBack));
  }
}

TEST_CASE("typeEquivalent is reflexive, symmetric and unfolding-closed") {
  Gen gen(37);
  for (int i = 0; i < 500; ++i) {
    TypePtr t = gen.type(3);
    CHECK(typeEquivalent(t, t));
    TypePtr u = gen.type(3);
    CHECK(typeEquivalent(t, u) == typeEquivalent(u, t));
    if (std::holds_alternative<RecT>(t->node))
      CHECK(typeEquivalent(t, unfold(t)));
  }
}
