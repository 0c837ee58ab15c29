#include "doctest.h"
#include "helpers.hpp"
#include "lsp/parser.hpp"
#include "lsp/print.hpp"
#include "lsp/syntax.hpp"

using namespace lsp;
using testutil::corpusFiles;
using testutil::loadCorpus;

TEST_CASE("every corpus file parses") {
  for (const auto& f : corpusFiles()) {
    ParseResult r = parseProgram(testutil::slurp(testutil::corpusPath(f)));
    CAPTURE(f);
    CHECK(r.ok());
    REQUIRE(r.program.has_value());
    CHECK(r.program->main != nullptr);
  }
}

TEST_CASE("output chains and assume formulae") {
  ProcPtr p = parseProcessText("s1!p. s1!c. s1!100. 0");
  const auto* o = std::get_if<OutputP>(&p->node);
  REQUIRE(o != nullptr);
  CHECK(o->chan == "s1");
  int prefixes = 0;
  ProcPtr cur = p;
  while (const auto* out = std::get_if<OutputP>(&cur->node)) {
    ++prefixes;
    cur = out->cont;
  }
  CHECK(prefixes == 3);
  CHECK(std::holds_alternative<InactP>(cur->node));

  ProcPtr a = parseProcessText("(assume charge(c,100) * charge(c,100)) 0");
  const auto* as = std::get_if<AssumeP>(&a->node);
  REQUIRE(as != nullptr);
  CHECK(std::holds_alternative<TensorF>(as->formula->node));
}

TEST_CASE("parse diagnostics carry stable codes and spans") {
  auto codeOf = [](const std::string& src) {
    ParseResult r = parseProgram(src);
    REQUIRE(!r.ok());
    REQUIRE(!r.diagnostics.empty());
    const auto& d = r.diagnostics.front();
    CHECK(d.begin <= d.end);
    CHECK(d.end <= src.size());
    return d.code;
  };
  CHECK(codeOf("type B = rec a. rec b. a\nmain = 0") == "E-CONTRACT");
  CHECK(codeOf("base nat;\ntype B = rec a. {x:nat | A(x)}\nmain = 0") ==
        "E-RECREF");
  CHECK(codeOf("base nat;\nbase nat;\nmain = 0") == "E-DUP");
  CHECK(codeOf("main = 0\nmain = 0") == "E-DUP");
  CHECK(codeOf("main = x!") == "E-SYNTAX");
  CHECK(codeOf("type T = foo\nmain = 0") == "E-UNKNOWN");
  CHECK(codeOf("main = s1!`p:product. 0") == "E-UNKNOWN");  // base undeclared
  CHECK(codeOf("main = s1!7. 0") == "E-UNKNOWN");           // nat undeclared
}

TEST_CASE("macro expansion") {
  const char* src =
      "base product, ccard, nat;\n"
      "type T = lin !c2:ccard. lin !a2:nat. end\n"
      "Charge(c,a) = new b1 b2:(T) (r2!b2. b1!c. b1!a. 0)\n"
      "main = Charge(c,100)\n";
  ParseResult r = parseProgram(src);
  REQUIRE(r.ok());
  ExpandResult e = expandMacros(*r.program);
  REQUIRE(e.ok());
  ProcPtr expected = parseProcessText(
      "new b1 b2:(lin !c2:ccard. lin !a2:nat. end) (r2!b2. b1!c. b1!100. 0)");
  CHECK(alphaEqual(e.process, expected));
}

TEST_CASE("macro expansion commutes with later substitution") {
  // Charge(c, a+10) then [100/a] yields an emission of 110.
  const char* src =
      "base ccard, nat;\n"
      "Charge(c,x) = b1!c. b1!x. 0\n"
      "main = Charge(c, a+10)\n";
  ParseResult r = parseProgram(src);
  REQUIRE(r.ok());
  ExpandResult e = expandMacros(*r.program);
  REQUIRE(e.ok());
  ProcPtr after = substitute(e.process, "a", mkIntLit(100));
  CHECK(alphaEqual(after, parseProcessText("b1!c. b1!110. 0")));
}

TEST_CASE("macro with unused parameter") {
  const char* src = "base nat;\nM(x) = 0\nmain = M(7)\n";
  ParseResult r = parseProgram(src);
  REQUIRE(r.ok());
  ExpandResult e = expandMacros(*r.program);
  REQUIRE(e.ok());
  CHECK(std::holds_alternative<InactP>(e.process->node));
}

TEST_CASE("macro errors: unknown, arity, cycle") {
  auto expandCode = [](const std::string& src) {
    ParseResult r = parseProgram(src);
    REQUIRE(r.ok());
    ExpandResult e = expandMacros(*r.program);
    REQUIRE(!e.ok());
    return e.diagnostics.front().code;
  };
  CHECK(expandCode("main = M()") == "E-UNKNOWN");
  CHECK(expandCode("base nat;\nM(x) = 0\nmain = M(1,2)") == "E-ARITY");
  CHECK(expandCode("A() = B()\nB() = A()\nmain = A()") == "E-CYCLE");
}

TEST_CASE("pretty printing fixed points") {
  CHECK(prettyPrint(mkInact()) == "0");
  CHECK(prettyPrint(mkAssume(mkOne(), mkInact())) == "(assume 1) 0");
  TypePtr s1 = parseTypeText(
      "lin !p:product. lin !c:ccard. lin !a:{x:nat | charge(c,x)}. end");
  CHECK(prettyPrint(s1) ==
        "lin !p:product. lin !c:ccard. lin !a:{x:nat | charge(c,x)}. end");
}

TEST_CASE("round trip on corpus main processes") {
  for (const auto& f : corpusFiles()) {
    Program prog = loadCorpus(f);
    ExpandResult e = expandMacros(prog);
    REQUIRE(e.ok());
    ProcPtr back = parseProcessText(prettyPrint(e.process));
    CAPTURE(f);
    CHECK(alphaEqual(back, e.process));
  }
}

TEST_CASE("declared contexts parse into bindings and resources") {
  ParseResult r = parseProgram(
      "base nat;\ncontext x : unit, A(x), y : un !v:nat. end;\nmain = 0");
  REQUIRE(r.ok());
  const auto& ctx = r.program->declaredContext;
  REQUIRE(ctx.entries.size() == 3);
  CHECK(std::holds_alternative<Binding>(ctx.entries[0]));
  CHECK(std::holds_alternative<Resource>(ctx.entries[1]));
  CHECK(std::holds_alternative<Binding>(ctx.entries[2]));
}
