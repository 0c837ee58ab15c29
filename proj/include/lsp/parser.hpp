#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsp/syntax.hpp"

namespace lsp {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  size_t begin = 0, end = 0;  // byte offsets into the source
  std::string code;           // stable identifier, e.g. E-CONTRACT
  std::string message;
};

struct Macro {
  std::vector<std::string> params;
  ProcPtr body;  // may contain macro calls
};

struct Program {
  std::vector<std::string> baseTypes;  // always includes "unit"
  std::map<std::string, TypePtr> typeAliases;
  std::map<std::string, Macro> macros;
  Context declaredContext;
  ProcPtr main;  // nullptr for declaration-only files (e.g. context files)
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return program.has_value(); }
};

ParseResult parseProgram(const std::string& source);

struct ExpandResult {
  ProcPtr process;  // nullptr on failure
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return process != nullptr; }
};

// Replaces macro calls by their bodies (capture-avoiding, arguments
// substituted for parameters). Fails on unknown macros, arity mismatches
// and cyclic macro references.
ExpandResult expandMacros(const Program& p);

// Convenience: parse a single process given as `main = <text>`.
ProcPtr parseProcessText(const std::string& text);
// Convenience: parse a single type (base types implied: unit/nat/product/ccard).
TypePtr parseTypeText(const std::string& text);

}  // namespace lsp
