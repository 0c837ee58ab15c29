#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lsp/parser.hpp"
#include "lsp/print.hpp"
#include "lsp/semantics.hpp"
#include "lsp/typing.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitParseError = 2;
constexpr int kExitStuck = 3;
constexpr int kExitStepLimit = 4;

std::string readFile(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return "";
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ok = true;
  return ss.str();
}

json diagJson(const lsp::Diagnostic& d) {
  return {{"severity",
           d.severity == lsp::Diagnostic::Severity::Error ? "error" : "warning"},
          {"code", d.code},
          {"message", d.message},
          {"begin", d.begin},
          {"end", d.end}};
}

// Parses the file; on failure prints diagnostics and returns no program.
std::optional<lsp::Program> load(const std::string& path, bool jsonMode,
                                 json& report) {
  bool ok = false;
  std::string src = readFile(path, ok);
  if (!ok) {
    if (jsonMode)
      report["diagnostics"].push_back(
          {{"severity", "error"}, {"message", "cannot read " + path}});
    else
      std::cerr << "error: cannot read " << path << "\n";
    return std::nullopt;
  }
  lsp::ParseResult pr = lsp::parseProgram(src);
  for (const auto& d : pr.diagnostics) {
    if (jsonMode)
      report["diagnostics"].push_back(diagJson(d));
    else
      std::cerr << path << ": " << d.code << ": " << d.message << "\n";
  }
  return pr.program;
}

lsp::ProcPtr expand(const lsp::Program& prog, const std::string& path,
                    bool jsonMode, json& report) {
  lsp::ExpandResult er = lsp::expandMacros(prog);
  for (const auto& d : er.diagnostics) {
    if (jsonMode)
      report["diagnostics"].push_back(diagJson(d));
    else
      std::cerr << path << ": " << d.code << ": " << d.message << "\n";
  }
  return er.process;
}

void emit(bool jsonMode, const json& report, const std::string& text) {
  if (jsonMode)
    std::cout << report.dump(2) << "\n";
  else
    std::cout << text;
}

int cmdCheck(const std::string& file, const std::string& contextFile,
             bool jsonMode) {
  json report = {{"command", "check"}, {"file", file},
                 {"diagnostics", json::array()}};
  auto prog = load(file, jsonMode, report);
  if (!prog || !prog->main) {
    report["verdict"] = "parse-error";
    report["exitCode"] = kExitParseError;
    emit(jsonMode, report, "");
    return kExitParseError;
  }
  if (!contextFile.empty()) {
    auto ctxProg = load(contextFile, jsonMode, report);
    if (!ctxProg) {
      report["verdict"] = "parse-error";
      report["exitCode"] = kExitParseError;
      emit(jsonMode, report, "");
      return kExitParseError;
    }
    auto merged = ctxProg->declaredContext;
    for (const auto& e : prog->declaredContext.entries)
      merged.entries.push_back(e);
    prog->declaredContext = merged;
  }
  std::string warning;
  if (!lsp::isUnrestrictedContext(prog->declaredContext))
    warning =
        "warning: context is not unrestricted; processes typable under "
        "arbitrary contexts may not be safe";
  lsp::CheckResult res = lsp::typecheck(*prog);
  std::ostringstream out;
  if (!warning.empty()) {
    out << warning << "\n";
    report["warnings"] = {warning};
  }
  if (res.ok) {
    out << "accept\n";
    report["verdict"] = "accept";
    report["exitCode"] = kExitOk;
    emit(jsonMode, report, out.str());
    return kExitOk;
  }
  report["verdict"] = "reject";
  report["errors"] = json::array();
  for (const auto& e : res.errors) {
    out << lsp::errCodeName(e.code) << ": " << e.message;
    if (!e.contextSlice.empty()) out << "\n  in context: " << e.contextSlice;
    out << "\n";
    report["errors"].push_back({{"code", lsp::errCodeName(e.code)},
                                {"message", e.message},
                                {"context", e.contextSlice}});
  }
  report["exitCode"] = kExitTypeError;
  emit(jsonMode, report, out.str());
  return kExitTypeError;
}

int cmdReduce(const std::string& file, size_t maxSteps,
              const std::string& policy, unsigned seed, int unfold, bool trace,
              bool jsonMode) {
  json report = {{"command", "reduce"}, {"file", file},
                 {"diagnostics", json::array()}};
  auto prog = load(file, jsonMode, report);
  lsp::ProcPtr p = prog ? expand(*prog, file, jsonMode, report) : nullptr;
  if (!p) {
    report["verdict"] = "parse-error";
    report["exitCode"] = kExitParseError;
    emit(jsonMode, report, "");
    return kExitParseError;
  }
  lsp::RunOptions opts;
  opts.maxSteps = maxSteps;
  opts.policy = policy == "random" ? lsp::Policy::Random : lsp::Policy::Leftmost;
  opts.seed = seed;
  opts.unfoldBudget = unfold;
  lsp::Trace tr = lsp::run(p, opts);
  std::ostringstream out;
  report["trace"] = json::array();
  for (size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i];
    std::string snapshot = lsp::normalizedPrint(s.after);
    if (trace)
      out << "step " << (i + 1) << ": " << s.rule << " " << s.detail << " |- "
          << snapshot << "\n";
    report["trace"].push_back(
        {{"step", i + 1}, {"rule", s.rule}, {"detail", s.detail},
         {"process", snapshot}});
  }
  out << "terminal: " << lsp::normalizedPrint(tr.terminal) << "\n";
  out << "verdict: " << lsp::verdictName(tr.verdict);
  if (!tr.witness.empty()) out << " (" << tr.witness << ")";
  out << "\n";
  report["steps"] = tr.steps.size();
  report["terminal"] = lsp::normalizedPrint(tr.terminal);
  report["verdict"] = lsp::verdictName(tr.verdict);
  if (!tr.witness.empty()) report["witness"] = tr.witness;
  int code = kExitOk;
  if (tr.verdict == lsp::Verdict::StuckAssert ||
      tr.verdict == lsp::Verdict::StuckIo)
    code = kExitStuck;
  else if (tr.verdict == lsp::Verdict::StepLimit)
    code = kExitStepLimit;
  report["exitCode"] = code;
  emit(jsonMode, report, out.str());
  return code;
}

int cmdSafety(const std::string& file, int unfold, bool jsonMode) {
  json report = {{"command", "safety"}, {"file", file},
                 {"diagnostics", json::array()}};
  auto prog = load(file, jsonMode, report);
  lsp::ProcPtr p = prog ? expand(*prog, file, jsonMode, report) : nullptr;
  if (!p) {
    report["verdict"] = "parse-error";
    report["exitCode"] = kExitParseError;
    emit(jsonMode, report, "");
    return kExitParseError;
  }
  lsp::SafetyReport rep = lsp::checkSafety(p, unfold);
  std::ostringstream out;
  out << "verdict: " << (rep.safe ? "safe" : "unsafe") << " (explored "
      << rep.exploredForms << " canonical form(s), unfold budget "
      << rep.unfoldBudgetUsed << ")\n";
  report["verdict"] = rep.safe ? "safe" : "unsafe";
  report["exploredForms"] = rep.exploredForms;
  report["unfoldBudget"] = rep.unfoldBudgetUsed;
  report["witnesses"] = json::array();
  for (const auto& w : rep.witnesses) {
    out << "witness: unmatched assert " << w.atom << " in thread " << w.thread
        << " of " << w.form << "\n";
    report["witnesses"].push_back(
        {{"atom", w.atom}, {"thread", w.thread}, {"form", w.form}});
  }
  report["warnings"] = json::array();
  for (const auto& w : rep.warnings) {
    out << "note: " << w << "\n";
    report["warnings"].push_back(w);
  }
  int code = rep.safe ? kExitOk : kExitStuck;
  report["exitCode"] = code;
  emit(jsonMode, report, out.str());
  return code;
}

int cmdCanon(const std::string& file, bool jsonMode) {
  json report = {{"command", "canon"}, {"file", file},
                 {"diagnostics", json::array()}};
  auto prog = load(file, jsonMode, report);
  lsp::ProcPtr p = prog ? expand(*prog, file, jsonMode, report) : nullptr;
  if (!p) {
    report["verdict"] = "parse-error";
    report["exitCode"] = kExitParseError;
    emit(jsonMode, report, "");
    return kExitParseError;
  }
  lsp::CanonicalProcess c = lsp::canonicalize(p);
  std::ostringstream out;
  report["restrictions"] = json::array();
  for (const auto& r : c.restrictions) {
    out << "new " << r.left << " " << r.right << " : "
        << lsp::prettyPrint(r.annot) << "\n";
    report["restrictions"].push_back({{"left", r.left},
                                      {"right", r.right},
                                      {"type", lsp::prettyPrint(r.annot)}});
  }
  report["assumptions"] = json::array();
  const lsp::AtomBag assumed = c.assumptionBag();
  for (const auto& a : assumed.atoms()) {
    out << "assume " << lsp::prettyPrint(a) << "\n";
    report["assumptions"].push_back(lsp::prettyPrint(a));
  }
  report["threads"] = json::array();
  for (const auto& t : c.threads) {
    out << "thread " << lsp::prettyPrint(t) << "\n";
    report["threads"].push_back(lsp::prettyPrint(t));
  }
  report["verdict"] = "ok";
  report["exitCode"] = kExitOk;
  emit(jsonMode, report, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"type checker and interpreter for session processes with "
               "assume/assert"};
  app.require_subcommand(1);
  bool jsonMode = false;
  app.add_flag("--json", jsonMode, "machine-readable output");

  std::string file, contextFile, policy = "leftmost";
  size_t maxSteps = 1000;
  unsigned seed = 0;
  int unfold = 1;
  bool trace = false;

  auto* check = app.add_subcommand("check", "type check a program");
  check->add_option("file", file)->required();
  check->add_option("--context", contextFile,
                    "declaration file providing the typing context");

  auto* reduce = app.add_subcommand("reduce", "run the reduction engine");
  reduce->add_option("file", file)->required();
  reduce->add_option("--max-steps", maxSteps, "step limit (default 1000)");
  reduce->add_option("--policy", policy, "leftmost|random");
  reduce->add_option("--seed", seed, "seed for the random policy");
  reduce->add_option("--unfold", unfold, "replication budget (default 1)");
  reduce->add_flag("--trace", trace, "print each reduction step");

  auto* safety = app.add_subcommand("safety", "assert-safety analysis");
  safety->add_option("file", file)->required();
  safety->add_option("--unfold", unfold, "replication budget (default 1)");

  auto* canon = app.add_subcommand("canon", "print the canonical form");
  canon->add_option("file", file)->required();

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return cmdCheck(file, contextFile, jsonMode);
  if (reduce->parsed())
    return cmdReduce(file, maxSteps, policy, seed, unfold, trace, jsonMode);
  if (safety->parsed()) return cmdSafety(file, unfold, jsonMode);
  return cmdCanon(file, jsonMode);
}
