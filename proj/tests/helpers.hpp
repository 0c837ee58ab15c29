#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lsp/parser.hpp"
#include "lsp/print.hpp"
#include "lsp/syntax.hpp"
#include "lsp/types.hpp"

namespace testutil {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpusPath(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

inline lsp::Program loadCorpus(const std::string& name) {
  lsp::ParseResult r = lsp::parseProgram(slurp(corpusPath(name)));
  if (!r.ok()) throw std::runtime_error("corpus parse failure: " + name);
  return *r.program;
}

inline const std::vector<std::string>& corpusFiles() {
  static const std::vector<std::string> files = {
      "system_ok.lsp",
      "system_plain.lsp",
      "system_overcharge.lsp",
      "system_overcharge_dynamic.lsp",
      "system_doublecharge.lsp",
      "system_doublecharge_ok.lsp",
      "stuck_pair.lsp",
      "assume_scope.lsp",
      "repl_assert.lsp",
      "inact.lsp",
      "assert_typable_unsafe.lsp",
      "assume_leak.lsp",
  };
  return files;
}

// ------------------------------------------------- random term generators

class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 0; }

  std::string name(const char* stem, int n) {
    return stem + std::to_string(pick(n));
  }

  lsp::ValuePtr value(const std::vector<std::string>& vars) {
    switch (pick(4)) {
      case 0:
        if (!vars.empty()) return lsp::mkVar(vars[pick((int)vars.size())]);
        [[fallthrough]];
      case 1: return lsp::mkIntLit(pick(200));
      case 2: return lsp::mkUnit();
      default:
        return lsp::mkSum(lsp::mkIntLit(pick(50)), lsp::mkIntLit(pick(50)));
    }
  }

  lsp::FormulaPtr formula(const std::vector<std::string>& vars, int depth) {
    if (depth > 0 && pick(3) == 0)
      return lsp::mkTensor(formula(vars, depth - 1), formula(vars, depth - 1));
    if (pick(5) == 0) return lsp::mkOne();
    std::vector<lsp::ValuePtr> args;
    int n = pick(3);
    for (int i = 0; i < n; ++i) args.push_back(value(vars));
    return lsp::mkAtom(name("P", 3), std::move(args));
  }

  // Closed session/base type, optionally allowing lin qualifiers,
  // refinements and recursion.
  lsp::TypePtr type(int depth, bool linOk = true, bool refOk = true,
                    std::vector<std::string> tvars = {}) {
    if (depth <= 0) {
      switch (pick(3)) {
        case 0: return lsp::mkEnd();
        case 1: return lsp::mkBase("nat");
        default: return lsp::mkBase("unit");
      }
    }
    switch (pick(refOk ? 6 : 5)) {
      case 0: return lsp::mkEnd();
      case 1: return lsp::mkBase(pick(2) ? "nat" : "unit");
      case 2:
      case 3: {
        lsp::Qual q = (linOk && coin()) ? lsp::Qual::Lin : lsp::Qual::Un;
        lsp::Dir d = coin() ? lsp::Dir::Out : lsp::Dir::In;
        std::string b = name("v", 4);
        // recursion variables stay in tail position (payloads closed),
        // matching how the session examples use recursion
        return lsp::mkSession(q, d, b, type(depth - 1, linOk, refOk, {}),
                              type(depth - 1, linOk, refOk, tvars));
      }
      case 4: {
        if (!tvars.empty() && coin()) {
          // keep contractive: wrap the variable in a session prefix
          std::string a = tvars[pick((int)tvars.size())];
          lsp::Qual q = (linOk && coin()) ? lsp::Qual::Lin : lsp::Qual::Un;
          lsp::Dir d = coin() ? lsp::Dir::Out : lsp::Dir::In;
          return lsp::mkSession(q, d, name("v", 4),
                                type(depth - 1, linOk, false, {}),
                                lsp::mkTVar(a));
        }
        std::string a = "r" + std::to_string(pick(3));
        tvars.push_back(a);
        lsp::Qual q = (linOk && coin()) ? lsp::Qual::Lin : lsp::Qual::Un;
        lsp::Dir d = coin() ? lsp::Dir::Out : lsp::Dir::In;
        return lsp::mkRec(
            a, lsp::mkSession(q, d, name("v", 4),
                              type(depth - 1, linOk, false, {}),
                              coin() ? lsp::mkTVar(a)
                                     : type(depth - 1, linOk, false, tvars)));
      }
      default: {
        std::string b = name("v", 4);
        return lsp::mkRefined(b, lsp::mkBase("nat"), formula({b}, 1));
      }
    }
  }

  // Random small process over the given channel/value variables.
  lsp::ProcPtr process(const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || pick(6) == 0) return lsp::mkInact();
    switch (pick(8)) {
      case 0: {
        if (vars.empty()) return lsp::mkInact();
        const std::string& c = vars[pick((int)vars.size())];
        return lsp::mkOutput(c, value(vars), process(vars, depth - 1));
      }
      case 1: {
        if (vars.empty()) return lsp::mkInact();
        const std::string& c = vars[pick((int)vars.size())];
        std::string b = "w" + std::to_string(pick(100));
        auto inner = vars;
        inner.push_back(b);
        return lsp::mkInput(c, b, process(inner, depth - 1));
      }
      case 2:
        return lsp::mkPar(process(vars, depth - 1), process(vars, depth - 1));
      case 3: return lsp::mkRepl(process(vars, depth - 1));
      case 4: {
        std::string x = "x" + std::to_string(pick(100));
        std::string y = "y" + std::to_string(pick(100));
        auto inner = vars;
        inner.push_back(x);
        inner.push_back(y);
        return lsp::mkRestrict(x, y, type(2, true, false, {}),
                               process(inner, depth - 1));
      }
      case 5:
        return lsp::mkAssume(formula(vars, 1), process(vars, depth - 1));
      case 6:
        return lsp::mkAssert(formula(vars, 1), process(vars, depth - 1));
      default: return lsp::mkInact();
    }
  }

  // Random context whose entries are mutually well formed.
  lsp::Context context(int n) {
    lsp::Context ctx;
    std::vector<std::string> vars;
    for (int i = 0; i < n; ++i) {
      if (!vars.empty() && pick(4) == 0) {
        ctx.entries.push_back(lsp::Resource{formula(vars, 1)});
      } else {
        std::string x = "g" + std::to_string(i);
        ctx.entries.push_back(lsp::Binding{x, type(2)});
        vars.push_back(x);
      }
    }
    return ctx;
  }

  std::mt19937& rng() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace testutil
