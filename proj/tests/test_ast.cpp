#include "doctest.h"
#include "lsp/print.hpp"
#include "lsp/syntax.hpp"
#include "lsp/types.hpp"

using namespace lsp;

TEST_CASE("value construction and folding") {
  CHECK(prettyPrint(mkUnit()) == "()");
  CHECK(prettyPrint(mkIntLit(100)) == "100");
  CHECK(prettyPrint(mkSum(mkIntLit(100), mkIntLit(10))) == "110");
  CHECK(prettyPrint(mkSum(mkVar("a"), mkIntLit(10))) == "a+10");
}

TEST_CASE("substitution in values and formulae") {
  auto f = mkAtom("charge", {mkVar("c"), mkVar("x")});
  auto g = substitute(f, "x", mkIntLit(100));
  CHECK(prettyPrint(g) == "charge(c,100)");
  CHECK(freeVars(g).count("c") == 1);
  CHECK(freeVars(g).count("x") == 0);
}

TEST_CASE("capture-free substitution in processes") {
  // (y?x.0)[y/z] must not capture the binder x
  auto p = mkInput("z", "x", mkOutput("w", mkVar("x"), mkInact()));
  auto q = substitute(p, "z", mkVar("y"));
  CHECK(freeVars(q).count("y") == 1);
  CHECK(freeVars(q).count("z") == 0);
  auto r = substitute(p, "w", mkVar("x"));
  CHECK(freeVars(r).count("x") == 1);  // the substituted-in x stays free
}

TEST_CASE("alpha equality of types") {
  auto t1 = mkSession(Qual::Lin, Dir::Out, "x", mkBase("nat"),
                      mkSession(Qual::Lin, Dir::In, "y", mkBase("nat"), mkEnd()));
  auto t2 = mkSession(Qual::Lin, Dir::Out, "a", mkBase("nat"),
                      mkSession(Qual::Lin, Dir::In, "b", mkBase("nat"), mkEnd()));
  CHECK(alphaEqual(t1, t2));
  auto t3 = mkSession(Qual::Un, Dir::Out, "x", mkBase("nat"), mkEnd());
  CHECK(!alphaEqual(t1, t3));
}

TEST_CASE("refreshBinders yields an alpha-equal process") {
  auto p = mkRestrict("x", "y",
                      mkSession(Qual::Lin, Dir::Out, "v", mkBase("unit"),
                                mkEnd()),
                      mkOutput("x", mkUnit(), mkInact()));
  auto q = refreshBinders(mkPar(p, p));
  CHECK(alphaEqual(q, mkPar(p, p)));
}
