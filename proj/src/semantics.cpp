#include "lsp/semantics.hpp"

#include <algorithm>
#include <map>

#include "lsp/print.hpp"

namespace lsp {

namespace {

bool isAssertHeaded(const ProcPtr& t) {
  return std::holds_alternative<AssertP>(t->node);
}

// Peels a maximal leading assert chain, flattening tensors and dropping 1s.
ProcPtr peelAsserts(const ProcPtr& q, std::vector<AtomF>& atoms) {
  ProcPtr rest = q;
  while (const auto* a = std::get_if<AssertP>(&rest->node)) {
    const AtomBag bag = flattenFormula(a->formula);
    for (const auto& atom : bag.atoms()) atoms.push_back(atom);
    rest = a->cont;
  }
  return rest;
}

ProcPtr rebuildAsserts(const std::vector<AtomF>& atoms, ProcPtr tail) {
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it)
    tail = mkAssert(mkAtom(it->pred, it->args), tail);
  return tail;
}

struct Collector {
  CanonicalProcess out;
  struct Pending {
    ProcPtr proc;
    std::vector<size_t> scopes;  // assumption indices in whose scope it sits
    bool inact;
  };
  std::vector<Pending> pending;

  void collect(const ProcPtr& q, std::vector<size_t> scope) {
    if (const auto* par = std::get_if<ParP>(&q->node)) {
      collect(par->lhs, scope);
      collect(par->rhs, scope);
      return;
    }
    if (const auto* res = std::get_if<RestrictP>(&q->node)) {
      out.restrictions.push_back(
          {res->left, res->right, res->annot, res->annotRight});
      collect(res->body, std::move(scope));
      return;
    }
    if (const auto* as = std::get_if<AssumeP>(&q->node)) {
      const AtomBag bag = flattenFormula(as->formula);
      for (const auto& atom : bag.atoms()) {
        scope.push_back(out.assumptions.size());
        out.assumptions.push_back({atom, {}});
      }
      collect(as->body, std::move(scope));
      return;
    }
    if (std::holds_alternative<AssertP>(q->node)) {
      std::vector<AtomF> atoms;
      ProcPtr rest = peelAsserts(q, atoms);
      if (atoms.empty()) {
        collect(rest, std::move(scope));  // assert 1.P heats to P
        return;
      }
      pending.push_back({rebuildAsserts(atoms, rest), std::move(scope), false});
      return;
    }
    bool inact = std::holds_alternative<InactP>(q->node);
    pending.push_back({q, std::move(scope), inact});
  }
};

}  // namespace

AtomBag CanonicalProcess::assumptionBag() const {
  AtomBag bag;
  for (const auto& a : assumptions) bag.add(a.atom);
  return bag;
}

CanonicalProcess canonicalize(const ProcPtr& p) {
  Collector col;
  col.collect(refreshBinders(p), {});
  CanonicalProcess c = std::move(col.out);

  bool allInact = true;
  for (const auto& pe : col.pending) allInact = allInact && pe.inact;
  for (const auto& pe : col.pending) {
    if (pe.inact) continue;
    size_t idx = c.threads.size();
    c.threads.push_back(pe.proc);
    for (size_t s : pe.scopes) c.assumptions[s].cover.insert(idx);
  }
  if (c.threads.empty()) c.threads.push_back(mkInact());

  // Directional heating: an assumption's scope may grow over any thread
  // that is not already blocked on an assert.
  for (auto& a : c.assumptions)
    for (size_t i = 0; i < c.threads.size(); ++i)
      if (!isAssertHeaded(c.threads[i])) a.cover.insert(i);

  // Drop restrictions whose endpoints no longer occur (new xy:T 0 ≡ 0).
  std::vector<bool> alive(c.restrictions.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<std::string> used;
    for (const auto& t : c.threads)
      for (const auto& x : freeVars(t)) used.insert(x);
    for (const auto& a : c.assumptions)
      for (const auto& arg : a.atom.args)
        for (const auto& x : freeVars(arg)) used.insert(x);
    for (size_t i = 0; i < c.restrictions.size(); ++i) {
      if (!alive[i]) continue;
      for (const auto& x : freeVars(c.restrictions[i].annot)) used.insert(x);
      if (c.restrictions[i].annotRight)
        for (const auto& x : freeVars(c.restrictions[i].annotRight))
          used.insert(x);
    }
    for (size_t i = 0; i < c.restrictions.size(); ++i)
      if (alive[i] && !used.count(c.restrictions[i].left) &&
          !used.count(c.restrictions[i].right)) {
        alive[i] = false;
        changed = true;
      }
  }
  std::vector<CRestriction> kept;
  for (size_t i = 0; i < c.restrictions.size(); ++i)
    if (alive[i]) kept.push_back(c.restrictions[i]);
  c.restrictions = std::move(kept);
  (void)allInact;
  return c;
}

// ------------------------------------------------------------- readback

namespace {

struct ScopedRange {
  size_t lo, hi;  // [lo, hi) thread range
  AtomF atom;
};

ProcPtr parJoin(const std::vector<ProcPtr>& parts) {
  if (parts.empty()) return mkInact();
  ProcPtr p = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
    p = mkPar(*it, p);
  return p;
}

ProcPtr buildRange(const std::vector<ProcPtr>& threads, size_t lo, size_t hi,
                   std::vector<ScopedRange> items) {
  std::vector<AtomF> whole;
  std::vector<ScopedRange> inner;
  for (auto& s : items) {
    if (s.lo == lo && s.hi == hi && lo < hi)
      whole.push_back(s.atom);
    else
      inner.push_back(s);
  }
  if (!whole.empty()) {
    ProcPtr p = buildRange(threads, lo, hi, std::move(inner));
    for (auto it = whole.rbegin(); it != whole.rend(); ++it)
      p = mkAssume(mkAtom(it->pred, it->args), p);
    return p;
  }
  std::vector<ProcPtr> parts;
  size_t i = lo;
  while (i < hi) {
    size_t best = i;
    for (const auto& s : inner)
      if (s.lo == i && s.hi > best && s.hi <= hi) best = s.hi;
    if (best > i) {
      std::vector<ScopedRange> sub;
      for (const auto& s : inner)
        if (s.lo >= i && s.hi <= best) sub.push_back(s);
      parts.push_back(buildRange(threads, i, best, std::move(sub)));
      i = best;
    } else {
      parts.push_back(threads[i]);
      ++i;
    }
  }
  return parJoin(parts);
}

}  // namespace

ProcPtr CanonicalProcess::readback() const {
  std::set<size_t> assertHeads;
  for (size_t i = 0; i < threads.size(); ++i)
    if (isAssertHeaded(threads[i])) assertHeads.insert(i);

  std::vector<AtomF> globals;
  std::vector<ScopedRange> scoped;
  std::vector<AtomF> emptyScoped;
  for (const auto& a : assumptions) {
    bool captures = false;
    for (size_t i : assertHeads)
      if (!a.cover.count(i)) captures = true;
    if (!captures) {
      globals.push_back(a.atom);
      continue;
    }
    if (a.cover.empty()) {
      emptyScoped.push_back(a.atom);
      continue;
    }
    // wrap the longest contiguous run of the cover
    size_t bestLo = 0, bestHi = 0;
    size_t i = 0;
    std::vector<size_t> cov(a.cover.begin(), a.cover.end());
    while (i < cov.size()) {
      size_t j = i;
      while (j + 1 < cov.size() && cov[j + 1] == cov[j] + 1) ++j;
      if (cov[j] + 1 - cov[i] > bestHi - bestLo) {
        bestLo = cov[i];
        bestHi = cov[j] + 1;
      }
      i = j + 1;
    }
    scoped.push_back({bestLo, bestHi, a.atom});
  }

  ProcPtr body = buildRange(threads, 0, threads.size(), std::move(scoped));
  for (const auto& atom : emptyScoped)
    body = mkPar(mkAssume(mkAtom(atom.pred, atom.args), mkInact()), body);
  for (auto it = globals.rbegin(); it != globals.rend(); ++it)
    body = mkAssume(mkAtom(it->pred, it->args), body);
  for (auto it = restrictions.rbegin(); it != restrictions.rend(); ++it)
    body = mkRestrict(it->left, it->right, it->annot, body, it->annotRight);
  return body;
}

// --------------------------------------------------------------- redexes

namespace {

struct HeadRef {
  size_t idx;
  bool virt;  // unfolded from a replication, *P ≡ P | *P
  ProcPtr head;
};

std::vector<HeadRef> threadHeads(const CanonicalProcess& c) {
  std::vector<HeadRef> out;
  for (size_t i = 0; i < c.threads.size(); ++i) {
    const ProcPtr& t = c.threads[i];
    if (const auto* rep = std::get_if<ReplP>(&t->node)) {
      const ProcPtr& b = rep->body;
      if (std::holds_alternative<OutputP>(b->node) ||
          std::holds_alternative<InputP>(b->node) ||
          std::holds_alternative<AssertP>(b->node))
        out.push_back({i, true, b});
    } else {
      out.push_back({i, false, t});
    }
  }
  return out;
}

size_t redexThread(const Redex& r) {
  if (r.kind == Redex::Kind::AssertCut) return r.thread;
  return std::min(r.sender, r.receiver);
}

bool redexLess(const Redex& a, const Redex& b) {
  auto key = [](const Redex& r) {
    return std::tuple(redexThread(r), r.kind == Redex::Kind::AssertCut,
                      r.restriction, r.sender, r.receiver, r.thread);
  };
  return key(a) < key(b);
}

}  // namespace

std::vector<Redex> findRedexes(const CanonicalProcess& c) {
  std::vector<Redex> out;
  auto heads = threadHeads(c);

  for (size_t ri = 0; ri < c.restrictions.size(); ++ri) {
    const auto& r = c.restrictions[ri];
    TypePtr head;
    try {
      head = unfoldHead(r.annot);
    } catch (...) {
      continue;
    }
    const auto* s = std::get_if<SessionT>(&head->node);
    if (!s) continue;
    std::string senderName = s->dir == Dir::Out ? r.left : r.right;
    std::string receiverName = s->dir == Dir::Out ? r.right : r.left;
    for (const auto& h1 : heads) {
      const auto* o = std::get_if<OutputP>(&h1.head->node);
      if (!o || o->chan != senderName) continue;
      for (const auto& h2 : heads) {
        if (h1.idx == h2.idx && h1.virt == h2.virt) continue;
        const auto* in = std::get_if<InputP>(&h2.head->node);
        if (!in || in->chan != receiverName) continue;
        Redex red;
        red.kind = Redex::Kind::Com;
        red.restriction = ri;
        red.sender = h1.idx;
        red.receiver = h2.idx;
        red.senderVirtual = h1.virt;
        red.receiverVirtual = h2.virt;
        out.push_back(red);
      }
    }
  }

  for (const auto& h : heads) {
    const auto* a = std::get_if<AssertP>(&h.head->node);
    if (!a) continue;
    const auto* atom = std::get_if<AtomF>(&a->formula->node);
    if (!atom) continue;
    for (size_t j = 0; j < c.assumptions.size(); ++j) {
      if (!atomEqual(c.assumptions[j].atom, *atom)) continue;
      if (!c.assumptions[j].cover.count(h.idx)) continue;
      Redex red;
      red.kind = Redex::Kind::AssertCut;
      red.thread = h.idx;
      red.threadVirtual = h.virt;
      red.assumption = j;
      red.atom = *atom;
      out.push_back(red);
      break;
    }
  }

  std::sort(out.begin(), out.end(), redexLess);
  return out;
}

std::string describeRedex(const CanonicalProcess& c, const Redex& r) {
  if (r.kind == Redex::Kind::AssertCut)
    return "assert " + prettyPrint(r.atom);
  const auto& rest = c.restrictions[r.restriction];
  const ProcPtr& t = c.threads[r.sender];
  const ProcPtr& head =
      r.senderVirtual ? std::get<ReplP>(t->node).body : t;
  const auto& o = std::get<OutputP>(head->node);
  std::string receiverName =
      o.chan == rest.left ? rest.right : rest.left;
  return o.chan + "!" + prettyPrint(o.val) + " -> " + receiverName;
}

// ------------------------------------------------------------- stepping

namespace {

const ProcPtr& headAt(const CanonicalProcess& c, size_t idx, bool virt) {
  const ProcPtr& t = c.threads[idx];
  if (!virt) return t;
  return std::get<ReplP>(t->node).body;
}

void placeThread(CanonicalProcess& c, size_t idx, bool virt, ProcPtr q) {
  if (!virt) {
    c.threads[idx] = std::move(q);
    return;
  }
  // the replication stays; its unfolded copy continues next to it
  c.threads.insert(c.threads.begin() + idx + 1, std::move(q));
  for (auto& a : c.assumptions) {
    std::set<size_t> cov;
    for (size_t i : a.cover) cov.insert(i > idx ? i + 1 : i);
    if (a.cover.count(idx)) cov.insert(idx + 1);
    a.cover = std::move(cov);
  }
}

ProcPtr applyRedex(const CanonicalProcess& c, const Redex& r) {
  CanonicalProcess n = c;
  if (r.kind == Redex::Kind::AssertCut) {
    const auto& a = std::get<AssertP>(headAt(c, r.thread, r.threadVirtual)->node);
    n.assumptions.erase(n.assumptions.begin() + r.assumption);
    placeThread(n, r.thread, r.threadVirtual, a.cont);
    return n.readback();
  }
  auto& rest = n.restrictions[r.restriction];
  TypePtr head = unfoldHead(rest.annot);
  const auto& s = std::get<SessionT>(head->node);
  const auto& o = std::get<OutputP>(headAt(c, r.sender, r.senderVirtual)->node);
  const auto& in =
      std::get<InputP>(headAt(c, r.receiver, r.receiverVirtual)->node);
  rest.annot = substitute(s.cont, s.binder, o.val);
  if (rest.annotRight) rest.annotRight = dual(rest.annot);
  ProcPtr senderCont = o.cont;
  ProcPtr receiverCont = substitute(in.cont, in.binder, o.val);
  if (r.sender > r.receiver) {
    placeThread(n, r.sender, r.senderVirtual, senderCont);
    placeThread(n, r.receiver, r.receiverVirtual, receiverCont);
  } else {
    placeThread(n, r.receiver, r.receiverVirtual, receiverCont);
    placeThread(n, r.sender, r.senderVirtual, senderCont);
  }
  return n.readback();
}

}  // namespace

std::optional<std::pair<ProcPtr, Redex>> reduceStep(const ProcPtr& p,
                                                    Policy policy,
                                                    std::mt19937& rng) {
  CanonicalProcess c = canonicalize(p);
  auto rs = findRedexes(c);
  if (rs.empty()) return std::nullopt;
  const Redex& r = policy == Policy::Leftmost
                       ? rs.front()
                       : rs[std::uniform_int_distribution<size_t>(
                             0, rs.size() - 1)(rng)];
  return std::pair{applyRedex(c, r), r};
}

namespace {

std::string bagText(const CanonicalProcess& c) {
  std::string s;
  const AtomBag bag = c.assumptionBag();
  for (const auto& a : bag.atoms()) s += (s.empty() ? "" : ", ") + prettyPrint(a);
  return s;
}

}  // namespace

std::string verdictName(Verdict v) {
  switch (v) {
    case Verdict::TerminatedClean: return "terminated-clean";
    case Verdict::StuckAssert: return "stuck-assert";
    case Verdict::StuckIo: return "stuck-io";
    case Verdict::StepLimit: return "step-limit";
  }
  return "unknown";
}

Trace run(const ProcPtr& p, const RunOptions& opts) {
  Trace tr;
  tr.initial = p;
  ProcPtr cur = p;
  std::mt19937 rng(opts.seed);
  size_t steps = 0;
  while (true) {
    CanonicalProcess c = canonicalize(cur);
    auto rs = findRedexes(c);
    if (rs.empty()) {
      auto heads = threadHeads(c);
      const AssertP* stuckAssert = nullptr;
      bool hasIo = false;
      for (const auto& h : heads) {
        if (const auto* a = std::get_if<AssertP>(&h.head->node)) {
          if (!h.virt && !stuckAssert) stuckAssert = a;
        } else if (std::holds_alternative<OutputP>(h.head->node) ||
                   std::holds_alternative<InputP>(h.head->node)) {
          // A replicated server with no partner is quiescent, not stuck.
          if (!h.virt) hasIo = true;
        }
      }
      if (stuckAssert) {
        tr.verdict = Verdict::StuckAssert;
        tr.witness = "assert " + prettyPrint(stuckAssert->formula) +
                     " unmatched; assumptions {" +
                     bagText(c) + "}";
      } else if (hasIo) {
        tr.verdict = Verdict::StuckIo;
      } else {
        SafetyReport rep = checkSafety(cur, opts.unfoldBudget);
        if (rep.safe) {
          tr.verdict = Verdict::TerminatedClean;
        } else {
          tr.verdict = Verdict::StuckAssert;
          tr.witness = "assert " + rep.witnesses.front().atom +
                       " unmatched; assumptions {" +
                       bagText(c) + "}";
        }
      }
      break;
    }
    if (steps >= opts.maxSteps) {
      tr.verdict = Verdict::StepLimit;
      break;
    }
    const Redex& r = opts.policy == Policy::Leftmost
                         ? rs.front()
                         : rs[std::uniform_int_distribution<size_t>(
                               0, rs.size() - 1)(rng)];
    ProcPtr next = canonicalize(applyRedex(c, r)).readback();
    tr.steps.push_back({r,
                        r.kind == Redex::Kind::Com ? "Com" : "Assert",
                        describeRedex(c, r), next});
    cur = next;
    ++steps;
  }
  tr.terminal = canonicalize(cur).readback();
  return tr;
}

// ------------------------------------------------- replication unfolding

namespace {

int countRepls(const ProcPtr& p) {
  if (const auto* o = std::get_if<OutputP>(&p->node)) return countRepls(o->cont);
  if (const auto* i = std::get_if<InputP>(&p->node)) return countRepls(i->cont);
  if (const auto* par = std::get_if<ParP>(&p->node))
    return countRepls(par->lhs) + countRepls(par->rhs);
  if (const auto* rep = std::get_if<ReplP>(&p->node))
    return 1 + countRepls(rep->body);
  if (const auto* res = std::get_if<RestrictP>(&p->node))
    return countRepls(res->body);
  if (const auto* as = std::get_if<AssumeP>(&p->node))
    return countRepls(as->body);
  if (const auto* at = std::get_if<AssertP>(&p->node))
    return countRepls(at->cont);
  return 0;
}

ProcPtr unfoldByPlan(const ProcPtr& p, const std::vector<int>& plan,
                     size_t& pos) {
  if (const auto* o = std::get_if<OutputP>(&p->node))
    return mkOutput(o->chan, o->val, unfoldByPlan(o->cont, plan, pos));
  if (const auto* i = std::get_if<InputP>(&p->node))
    return mkInput(i->chan, i->binder, unfoldByPlan(i->cont, plan, pos));
  if (const auto* par = std::get_if<ParP>(&p->node)) {
    ProcPtr l = unfoldByPlan(par->lhs, plan, pos);
    return mkPar(l, unfoldByPlan(par->rhs, plan, pos));
  }
  if (const auto* rep = std::get_if<ReplP>(&p->node)) {
    int n = plan[pos++];
    ProcPtr body = unfoldByPlan(rep->body, plan, pos);
    ProcPtr out = mkRepl(body);
    for (int k = 0; k < n; ++k) out = mkPar(body, out);
    return out;
  }
  if (const auto* res = std::get_if<RestrictP>(&p->node))
    return mkRestrict(res->left, res->right, res->annot,
                      unfoldByPlan(res->body, plan, pos), res->annotRight);
  if (const auto* as = std::get_if<AssumeP>(&p->node))
    return mkAssume(as->formula, unfoldByPlan(as->body, plan, pos));
  if (const auto* at = std::get_if<AssertP>(&p->node))
    return mkAssert(at->formula, unfoldByPlan(at->cont, plan, pos));
  return p;
}

}  // namespace

std::vector<CanonicalProcess> enumerateCanonicalForms(const ProcPtr& p0,
                                                      int unfoldBudget) {
  ProcPtr p = refreshBinders(p0);
  if (unfoldBudget < 0) unfoldBudget = 0;
  size_t k = (size_t)countRepls(p);
  std::vector<CanonicalProcess> out;
  std::set<std::string> seen;
  std::vector<int> plan(k, 0);
  size_t emitted = 0;
  while (true) {
    size_t pos = 0;
    ProcPtr q = refreshBinders(unfoldByPlan(p, plan, pos));
    CanonicalProcess c = canonicalize(q);
    std::string key = normalizedPrint(c.readback());
    if (seen.insert(key).second) out.push_back(std::move(c));
    if (++emitted >= 4096) break;
    // next mixed-radix plan
    size_t d = 0;
    while (d < k && plan[d] == unfoldBudget) plan[d++] = 0;
    if (d == k) break;
    ++plan[d];
  }
  return out;
}

// ---------------------------------------------------------------- safety

std::pair<bool, std::vector<SafetyWitness>> isSafeCanonical(
    const CanonicalProcess& c) {
  std::vector<SafetyWitness> ws;
  std::string form = normalizedPrint(c.readback());
  for (size_t i = 0; i < c.threads.size(); ++i) {
    std::vector<AtomF> atoms;
    peelAsserts(c.threads[i], atoms);
    for (const auto& atom : atoms) {
      bool matched = false;
      for (const auto& a : c.assumptions)
        if (atomEqual(a.atom, atom) && a.cover.count(i)) {
          matched = true;
          break;
        }
      if (!matched) ws.push_back({form, prettyPrint(atom), i});
    }
  }
  return {ws.empty(), ws};
}

SafetyReport checkSafety(const ProcPtr& p, int unfoldBudget) {
  SafetyReport rep;
  rep.unfoldBudgetUsed = unfoldBudget;
  for (const auto& c : enumerateCanonicalForms(p, unfoldBudget)) {
    ++rep.exploredForms;
    auto [ok, ws] = isSafeCanonical(c);
    (void)ok;
    rep.witnesses.insert(rep.witnesses.end(), ws.begin(), ws.end());
    // membership vs consumption: matched asserts outnumbering occurrences
    AtomBag bag = c.assumptionBag();
    AtomBag needed;
    for (size_t i = 0; i < c.threads.size(); ++i) {
      std::vector<AtomF> atoms;
      peelAsserts(c.threads[i], atoms);
      for (const auto& atom : atoms)
        for (const auto& a : c.assumptions)
          if (atomEqual(a.atom, atom) && a.cover.count(i)) {
            needed.add(atom);
            break;
          }
    }
    std::set<std::string> reported;
    for (const auto& atom : needed.atoms()) {
      std::string key = prettyPrint(atom);
      if (!reported.insert(key).second) continue;
      if (needed.count(atom) > bag.count(atom))
        rep.warnings.push_back(
            key + ": " + std::to_string(needed.count(atom)) +
            " asserts in scope but only " + std::to_string(bag.count(atom)) +
            " assumed occurrence(s); the (Assert) cut consumes");
    }
  }
  rep.safe = rep.witnesses.empty();
  return rep;
}

}  // namespace lsp
