#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lsp/syntax.hpp"
#include "lsp/types.hpp"

// Heating to canonical form, the reduction engine, bounded exploration of
// replication unfoldings, and the assert-safety analyzer.

namespace lsp {

// A restriction hoisted to the outermost level.
struct CRestriction {
  std::string left, right;
  TypePtr annot;
  TypePtr annotRight;  // may be null
};

// One assumed atom together with the threads its assume scopes over.
// Scope growth (the directional heating rule) never captures a thread
// that is already waiting on an assert, which keeps e.g.
// (assume A)0 | assert A.0 stuck.
struct ScopedAtom {
  AtomF atom;
  std::set<size_t> cover;  // thread indices; always a contiguous range
};

struct CanonicalProcess {
  std::vector<CRestriction> restrictions;
  std::vector<ScopedAtom> assumptions;
  std::vector<ProcPtr> threads;  // no Par, Restrict or Assume nodes

  AtomBag assumptionBag() const;
  ProcPtr readback() const;
};

// Heats a process into canonical form: parallel compositions flattened,
// restrictions and assumes hoisted, assume/assert tensors split and 1s
// dropped, inert threads removed. Replications are not unfolded.
CanonicalProcess canonicalize(const ProcPtr& p);

struct Redex {
  enum class Kind { Com, AssertCut };
  Kind kind = Kind::Com;
  // Com
  size_t restriction = 0;
  size_t sender = 0, receiver = 0;
  bool senderVirtual = false, receiverVirtual = false;  // *P ≡ P | *P
  // AssertCut
  size_t thread = 0;
  bool threadVirtual = false;
  size_t assumption = 0;
  AtomF atom;
};

std::vector<Redex> findRedexes(const CanonicalProcess& c);
std::string describeRedex(const CanonicalProcess& c, const Redex& r);

enum class Policy { Leftmost, Random };

std::optional<std::pair<ProcPtr, Redex>> reduceStep(const ProcPtr& p,
                                                    Policy policy,
                                                    std::mt19937& rng);

enum class Verdict { TerminatedClean, StuckAssert, StuckIo, StepLimit };
std::string verdictName(Verdict v);

struct TraceStep {
  Redex redex;
  std::string rule;  // "Com" or "Assert"
  std::string detail;
  ProcPtr after;
};

struct Trace {
  ProcPtr initial;
  std::vector<TraceStep> steps;
  ProcPtr terminal;
  Verdict verdict = Verdict::TerminatedClean;
  std::string witness;  // for stuck-assert verdicts
};

struct RunOptions {
  size_t maxSteps = 1000;
  Policy policy = Policy::Leftmost;
  unsigned seed = 0;
  int unfoldBudget = 1;  // used by the terminal safety classification
};

Trace run(const ProcPtr& p, const RunOptions& opts);

// Canonical forms reachable when each replication node is unfolded between
// zero and unfoldBudget times; always contains canonicalize(p).
std::vector<CanonicalProcess> enumerateCanonicalForms(const ProcPtr& p,
                                                      int unfoldBudget);

struct SafetyWitness {
  std::string form;  // normalized print of the offending canonical form
  std::string atom;
  size_t thread = 0;
};

struct SafetyReport {
  bool safe = true;
  std::vector<SafetyWitness> witnesses;
  size_t exploredForms = 0;
  int unfoldBudgetUsed = 0;
  // Spots where membership-based safety and the consuming (Assert) cut
  // disagree: more matching asserts in scope than assumed occurrences.
  std::vector<std::string> warnings;
};

// Membership check per thread: every leading assert atom of a thread must
// occur among the assumptions scoping over that thread.
std::pair<bool, std::vector<SafetyWitness>> isSafeCanonical(
    const CanonicalProcess& c);

SafetyReport checkSafety(const ProcPtr& p, int unfoldBudget);

}  // namespace lsp
