// End-to-end acceptance checks; prints one pass/fail line per criterion.

#include <iostream>
#include <optional>
#include <string>

#include "helpers.hpp"
#include "lsp/parser.hpp"
#include "lsp/print.hpp"
#include "lsp/semantics.hpp"
#include "lsp/typing.hpp"

using namespace lsp;
using testutil::Gen;
using testutil::loadCorpus;

namespace {

int failures = 0;

void report(int n, const std::string& what, bool ok,
            const std::string& detail = "") {
  std::cout << "criterion " << n << " (" << what << "): "
            << (ok ? "pass" : "fail");
  if (!ok && !detail.empty()) std::cout << " [" << detail << "]";
  std::cout << "\n";
  if (!ok) ++failures;
}

ProcPtr expanded(const Program& prog) {
  ExpandResult e = expandMacros(prog);
  return e.process;
}

bool hasCode(const CheckResult& r, ErrCode c) {
  for (const auto& e : r.errors)
    if (e.code == c) return true;
  return false;
}

// 1. golden accept/reject verdicts
void criterion1() {
  bool ok = true;
  std::string detail;
  if (!typecheck(loadCorpus("system_ok.lsp")).ok) {
    ok = false;
    detail += "system_ok not accepted; ";
  }
  if (!typecheck(loadCorpus("system_doublecharge_ok.lsp")).ok) {
    ok = false;
    detail += "system_doublecharge_ok not accepted; ";
  }
  CheckResult dual = typecheck(loadCorpus("system_overcharge.lsp"));
  if (dual.ok || !hasCode(dual, ErrCode::Dual)) {
    ok = false;
    detail += "system_overcharge not rejected with E-DUAL; ";
  }
  CheckResult dbl = typecheck(loadCorpus("system_doublecharge.lsp"));
  if (dbl.ok || !(hasCode(dbl, ErrCode::Formula) || hasCode(dbl, ErrCode::Split))) {
    ok = false;
    detail += "system_doublecharge not rejected with a linear-resource error";
  }
  report(1, "golden accept/reject", ok, detail);
}

// 2. golden traces
void criterion2() {
  bool ok = true;
  std::string detail;
  RunOptions opts;

  Trace good = run(expanded(loadCorpus("system_ok.lsp")), opts);
  ProcPtr bank = parseProcessText(
      "new r1 r2:(rec al. un ?y:(lin ?c:ccard. "
      "lin ?a:{x:nat | charge(c,x)}. end). al) "
      "*r1?y. y?c. y?a. assert charge(c,a). 0");
  if (good.verdict != Verdict::TerminatedClean ||
      !alphaEqual(good.terminal, canonicalize(bank).readback())) {
    ok = false;
    detail += "system_ok terminal mismatch; ";
  }
  ProcPtr mid = parseProcessText(
      "new r1 r2:(rec al. un ?y:(lin ?c:ccard. "
      "lin ?a:{x:nat | charge(c,x)}. end). al) "
      "(assume charge(`c:ccard,100)) "
      "(new b1 b2:(lin !c2:ccard. lin !a2:{x:nat | charge(c2,x)}. end) "
      "(r2!b2. b1!`c:ccard. b1!100. 0) "
      "| *r1?y. y?c. y?a. assert charge(c,a). 0)");
  bool seen = false;
  for (const auto& s : good.steps)
    if (alphaEqual(s.after, canonicalize(mid).readback())) seen = true;
  if (!seen) {
    ok = false;
    detail += "intermediate assume/Charge state not traversed; ";
  }

  Trace over = run(expanded(loadCorpus("system_overcharge_dynamic.lsp")), opts);
  if (over.verdict != Verdict::StuckAssert ||
      over.witness.find("charge(`c:ccard,110)") == std::string::npos ||
      over.witness.find("charge(`c:ccard,100)") == std::string::npos) {
    ok = false;
    detail += "overcharge run lacks the charge(c,100)/charge(c,110) witness; ";
  }

  Trace dbl = run(expanded(loadCorpus("system_doublecharge.lsp")), opts);
  if (dbl.verdict != Verdict::StuckAssert ||
      dbl.witness.find("charge(`c:ccard,100)") == std::string::npos) {
    ok = false;
    detail += "double-charge run lacks the unmatched charge(c,100) witness";
  }
  report(2, "golden traces", ok, detail);
}

// 3. preservation along traces and heatings
void criterion3() {
  bool ok = true;
  std::string detail;
  for (const auto& f : testutil::corpusFiles()) {
    Program prog = loadCorpus(f);
    if (!typecheck(prog).ok) continue;
    ProcPtr p = expanded(prog);
    RunOptions opts;
    Trace tr = run(p, opts);
    for (const auto& s : tr.steps)
      if (!typecheckProcess(prog.declaredContext, s.after).ok) {
        ok = false;
        detail = f + " snapshot fails to re-typecheck";
      }
    for (const auto& c : enumerateCanonicalForms(p, 1))
      if (!typecheckProcess(prog.declaredContext, c.readback()).ok) {
        ok = false;
        detail = f + " canonical form fails to re-typecheck";
      }
  }
  report(3, "preservation", ok, detail);
}

// 4. safety of accepted programs; unsafety of the stuck examples
void criterion4() {
  bool ok = true;
  std::string detail;
  for (const auto& f : testutil::corpusFiles()) {
    Program prog = loadCorpus(f);
    if (!isUnrestrictedContext(prog.declaredContext)) continue;
    if (!typecheck(prog).ok) continue;
    ProcPtr p = expanded(prog);
    RunOptions opts;
    Trace tr = run(p, opts);
    if (!checkSafety(p, 1).safe) {
      ok = false;
      detail = f + " initial state reported unsafe";
    }
    for (const auto& s : tr.steps)
      if (!checkSafety(s.after, 1).safe) {
        ok = false;
        detail = f + " snapshot reported unsafe";
      }
  }
  RunOptions opts;
  Trace over = run(expanded(loadCorpus("system_overcharge_dynamic.lsp")), opts);
  if (checkSafety(over.terminal, 1).safe) {
    ok = false;
    detail += "; overcharge terminal reported safe";
  }
  Trace dbl = run(expanded(loadCorpus("system_doublecharge.lsp")), opts);
  if (checkSafety(dbl.terminal, 1).safe) {
    ok = false;
    detail += "; double-charge terminal reported safe";
  }
  if (checkSafety(parseProcessText("(assume A) 0 | assert A. 0"), 1).safe) {
    ok = false;
    detail += "; (assume A)0 | assert A.0 reported safe";
  }
  if (checkSafety(parseProcessText("*assert A. 0"), 1).safe) {
    ok = false;
    detail += "; *assert A.0 reported safe";
  }
  report(4, "safety", ok, detail);
}

// 5. oracle equivalence
void criterion5() {
  bool ok = true;
  std::string detail;
  for (const auto& f : testutil::corpusFiles()) {
    Program prog = loadCorpus(f);
    std::optional<bool> oracle =
        referenceCheck(prog.declaredContext, expanded(prog), 2000000);
    if (oracle.has_value() && *oracle != typecheck(prog).ok) {
      ok = false;
      detail = f + " disagrees with the reference checker";
    }
  }
  Gen gen(42);
  int compared = 0, attempts = 0;
  while (compared < 500 && attempts < 20000) {
    ++attempts;
    Context ctx = gen.context(gen.pick(3));
    if (wfContext(ctx).has_value()) continue;
    std::vector<std::string> vars;
    for (const auto& e : ctx.entries)
      if (const auto* b = std::get_if<Binding>(&e)) vars.push_back(b->name);
    ProcPtr p = gen.process(vars, 5);
    std::optional<bool> oracle = referenceCheck(ctx, p, 300000);
    if (!oracle.has_value()) continue;
    ++compared;
    if (typecheckProcess(ctx, p).ok != *oracle) {
      ok = false;
      detail = "random disagreement: " + prettyPrint(ctx) + " |- " +
               prettyPrint(p);
    }
  }
  if (compared < 500) {
    ok = false;
    detail = "only " + std::to_string(compared) + " comparisons completed";
  }
  report(5, "oracle equivalence", ok, detail);
}

// 6. metatheory property tests
void criterion6() {
  bool ok = true;
  std::string detail;

  {  // weakening
    Gen gen(7);
    int found = 0, attempts = 0;
    while (found < 200 && attempts < 20000) {
      ++attempts;
      Context ctx = gen.context(gen.pick(3));
      if (wfContext(ctx).has_value()) continue;
      std::vector<std::string> vars;
      for (const auto& e : ctx.entries)
        if (const auto* b = std::get_if<Binding>(&e)) vars.push_back(b->name);
      ProcPtr p = gen.process(vars, 4);
      if (!typecheckProcess(ctx, p).ok) continue;
      ++found;
      Context wider = ctx;
      wider.entries.push_back(Binding{"fresh_w", mkEnd()});
      if (!typecheckProcess(wider, p).ok) {
        ok = false;
        detail = "weakening failed";
      }
    }
    if (found < 200) {
      ok = false;
      detail = "weakening: too few accepted judgments";
    }
  }
  {  // strengthening
    Gen gen(11);
    int found = 0, attempts = 0;
    while (found < 200 && attempts < 30000) {
      ++attempts;
      Context ctx = gen.context(gen.pick(3));
      if (wfContext(ctx).has_value()) continue;
      std::vector<std::string> vars;
      for (const auto& e : ctx.entries)
        if (const auto* b = std::get_if<Binding>(&e)) vars.push_back(b->name);
      ProcPtr p = gen.process(vars, 4);
      Context wider = ctx;
      wider.entries.push_back(Binding{"fresh_s", mkBase("unit")});
      if (!typecheckProcess(wider, p).ok) continue;
      if (freeVars(p).count("fresh_s")) continue;
      ++found;
      if (!typecheckProcess(ctx, p).ok) {
        ok = false;
        detail = "strengthening failed";
      }
    }
    if (found < 200) {
      ok = false;
      detail = "strengthening: too few accepted judgments";
    }
  }
  {  // substitution
    Gen gen(13);
    int found = 0, attempts = 0;
    while (found < 200 && attempts < 40000) {
      ++attempts;
      Context ctx = gen.context(1 + gen.pick(3));
      if (wfContext(ctx).has_value()) continue;
      int idx = -1;
      for (size_t i = 0; i < ctx.entries.size(); ++i)
        if (const auto* b = std::get_if<Binding>(&ctx.entries[i]))
          if (const auto* base = std::get_if<BaseT>(&b->type->node))
            if (base->name == "nat") idx = (int)i;
      if (idx < 0) continue;
      std::vector<std::string> vars;
      for (const auto& e : ctx.entries)
        if (const auto* b = std::get_if<Binding>(&e)) vars.push_back(b->name);
      ProcPtr p = gen.process(vars, 4);
      if (!typecheckProcess(ctx, p).ok) continue;
      ++found;
      std::string x = std::get<Binding>(ctx.entries[idx]).name;
      ValuePtr v = mkIntLit(gen.pick(100));
      Context inst;
      for (size_t i = 0; i < ctx.entries.size(); ++i) {
        if ((int)i == idx) continue;
        if (const auto* b = std::get_if<Binding>(&ctx.entries[i]))
          inst.entries.push_back(Binding{b->name, substitute(b->type, x, v)});
        else
          inst.entries.push_back(Resource{
              substitute(std::get<Resource>(ctx.entries[i]).formula, x, v)});
      }
      if (!typecheckProcess(inst, substitute(p, x, v)).ok) {
        ok = false;
        detail = "substitution failed";
      }
    }
    if (found < 200) {
      ok = false;
      detail = "substitution: too few accepted judgments";
    }
  }
  {  // dual involution
    Gen gen(17);
    int checked = 0, attempts = 0;
    while (checked < 1000 && attempts < 10000) {
      ++attempts;
      TypePtr t = gen.type(3);
      TypePtr d = dual(t);
      if (!d) continue;
      ++checked;
      if (!alphaEqual(dual(d), t)) {
        ok = false;
        detail = "dual involution failed";
      }
    }
    if (checked < 1000) {
      ok = false;
      detail = "dual involution: too few dualizable types";
    }
  }
  {  // cf idempotence
    Gen gen(19);
    for (int i = 0; i < 1000; ++i) {
      Context ctx = gen.context(1 + gen.pick(4));
      if (prettyPrint(cf(ctx)) != prettyPrint(cf(cf(ctx)))) {
        ok = false;
        detail = "cf idempotence failed";
      }
    }
  }
  {  // flattening homomorphism
    Gen gen(23);
    for (int i = 0; i < 1000; ++i) {
      FormulaPtr f = gen.formula({"u"}, 2);
      FormulaPtr g = gen.formula({"u"}, 2);
      AtomBag manual = flattenFormula(f);
      manual.add(flattenFormula(g));
      if (!(flattenFormula(mkTensor(f, g)) == manual)) {
        ok = false;
        detail = "flattening homomorphism failed";
      }
    }
  }
  {  // parse/print round trip
    Gen gen(31);
    for (int i = 0; i < 1000; ++i) {
      ProcPtr p = gen.process({"ch0", "ch1"}, 4);
      ProcPtr back = parseProcessText(prettyPrint(p));
      if (!back || !alphaEqual(p, back)) {
        ok = false;
        detail = "process round trip failed";
      }
      TypePtr t = gen.type(3);
      TypePtr tb = parseTypeText(prettyPrint(t));
      if (!tb || !alphaEqual(t, tb)) {
        ok = false;
        detail = "type round trip failed";
      }
    }
  }
  report(6, "metatheory properties", ok, detail);
}

// 7. boundary judgments
void criterion7() {
  bool ok = true;
  std::string detail;
  Context a;
  a.entries.push_back(Resource{mkAtom("A", {})});
  if (!typecheckProcess(a, parseProcessText("assert A. 0")).ok) {
    ok = false;
    detail += "A |- assert A.0 not accepted; ";
  }
  if (checkSafety(parseProcessText("assert A. 0"), 1).safe) {
    ok = false;
    detail += "assert A.0 reported safe; ";
  }
  if (typecheckProcess(Context{}, parseProcessText("(assume A) 0")).ok) {
    ok = false;
    detail += "(assume A)0 accepted under the empty context";
  }
  report(7, "boundary judgments", ok, detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria pass\n";
  return 0;
}
