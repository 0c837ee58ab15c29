#include "lsp/parser.hpp"

#include <cctype>

#include "lsp/types.hpp"

namespace lsp {

namespace {

enum class Tok {
  Ident,
  Int,
  Lit,  // `name:base
  Bang,
  Question,
  Dot,
  Pipe,
  Star,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Colon,
  Comma,
  Semi,
  Eq,
  Plus,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  std::string litBase;
  size_t begin = 0, end = 0;
};

struct ParseFail {
  Diagnostic diag;
};

[[noreturn]] void fail(const Token& at, std::string code, std::string msg) {
  Diagnostic d;
  d.severity = Diagnostic::Severity::Error;
  d.begin = at.begin;
  d.end = at.end > at.begin ? at.end : at.begin + 1;
  d.code = std::move(code);
  d.message = std::move(msg);
  throw ParseFail{std::move(d)};
}

bool identStart(char c) { return isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identCont(char c) {
  return isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0, n = src.size();
  while (i < n) {
    char c = src[i];
    if (isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    size_t begin = i;
    auto push = [&](Tok k, size_t len) {
      out.push_back({k, src.substr(begin, len), "", begin, begin + len});
      i = begin + len;
    };
    if (identStart(c)) {
      size_t j = i + 1;
      while (j < n && identCont(src[j])) ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      size_t j = i + 1;
      while (j < n && isdigit(static_cast<unsigned char>(src[j]))) ++j;
      push(Tok::Int, j - i);
      continue;
    }
    if (c == '`') {
      size_t j = i + 1;
      if (j >= n || !identStart(src[j])) {
        Token t{Tok::Eof, "`", "", begin, begin + 1};
        fail(t, "E-SYNTAX", "expected identifier after backquote");
      }
      size_t nameStart = j;
      while (j < n && identCont(src[j])) ++j;
      std::string name = src.substr(nameStart, j - nameStart);
      if (j >= n || src[j] != ':') {
        Token t{Tok::Eof, name, "", begin, j};
        fail(t, "E-SYNTAX", "back-quoted literal needs a base type: `" + name +
                                ":<base>");
      }
      ++j;
      if (j >= n || !identStart(src[j])) {
        Token t{Tok::Eof, name, "", begin, j};
        fail(t, "E-SYNTAX", "expected base type name in literal");
      }
      size_t baseStart = j;
      while (j < n && identCont(src[j])) ++j;
      Token t{Tok::Lit, name, src.substr(baseStart, j - baseStart), begin, j};
      out.push_back(t);
      i = j;
      continue;
    }
    switch (c) {
      case '!': push(Tok::Bang, 1); break;
      case '?': push(Tok::Question, 1); break;
      case '.': push(Tok::Dot, 1); break;
      case '|': push(Tok::Pipe, 1); break;
      case '*': push(Tok::Star, 1); break;
      case '(': push(Tok::LParen, 1); break;
      case ')': push(Tok::RParen, 1); break;
      case '{': push(Tok::LBrace, 1); break;
      case '}': push(Tok::RBrace, 1); break;
      case ':': push(Tok::Colon, 1); break;
      case ',': push(Tok::Comma, 1); break;
      case ';': push(Tok::Semi, 1); break;
      case '=': push(Tok::Eq, 1); break;
      case '+': push(Tok::Plus, 1); break;
      default: {
        Token t{Tok::Eof, std::string(1, c), "", begin, begin + 1};
        fail(t, "E-SYNTAX", std::string("unexpected character '") + c + "'");
      }
    }
  }
  out.push_back({Tok::Eof, "", "", n, n});
  return out;
}

const std::set<std::string> kKeywords = {"new",  "assume", "assert", "base",
                                         "type", "context", "rec",    "lin",
                                         "un",   "end"};

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  Program prog;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  const Token& cur() const { return peek(); }
  Token next() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool atIdent(const std::string& s) const {
    return cur().kind == Tok::Ident && cur().text == s;
  }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail(cur(), "E-SYNTAX", "expected " + what);
    return next();
  }
  std::string expectIdent(const std::string& what) {
    if (cur().kind != Tok::Ident || kKeywords.count(cur().text))
      fail(cur(), "E-SYNTAX", "expected " + what);
    return next().text;
  }

  bool isBaseType(const std::string& name) const {
    for (const auto& b : prog.baseTypes)
      if (b == name) return true;
    return false;
  }

  // ------------------------------------------------------------ values

  ValuePtr parseValueAtom() {
    if (at(Tok::LParen)) {
      Token open = next();
      if (at(Tok::RParen)) {
        next();
        return mkUnit();
      }
      ValuePtr v = parseValue();
      expect(Tok::RParen, "')'");
      (void)open;
      return v;
    }
    if (at(Tok::Int)) {
      Token t = next();
      if (!isBaseType("nat"))
        fail(t, "E-UNKNOWN", "integer literal used but base type nat not declared");
      return mkLit(t.text, "nat");
    }
    if (at(Tok::Lit)) {
      Token t = next();
      if (!isBaseType(t.litBase))
        fail(t, "E-UNKNOWN", "unknown base type '" + t.litBase + "'");
      return mkLit(t.text, t.litBase);
    }
    if (cur().kind == Tok::Ident && !kKeywords.count(cur().text))
      return mkVar(next().text);
    fail(cur(), "E-SYNTAX", "expected a value");
  }

  ValuePtr parseValue() {
    ValuePtr v = parseValueAtom();
    while (at(Tok::Plus)) {
      next();
      v = mkSum(v, parseValueAtom());
    }
    return v;
  }

  // ---------------------------------------------------------- formulae

  FormulaPtr parseFormulaAtom() {
    if (at(Tok::Int) && cur().text == "1") {
      next();
      return mkOne();
    }
    if (at(Tok::LParen)) {
      next();
      FormulaPtr f = parseFormula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (cur().kind == Tok::Ident && !kKeywords.count(cur().text)) {
      std::string pred = next().text;
      std::vector<ValuePtr> args;
      if (at(Tok::LParen)) {
        next();
        if (!at(Tok::RParen)) {
          args.push_back(parseValue());
          while (at(Tok::Comma)) {
            next();
            args.push_back(parseValue());
          }
        }
        expect(Tok::RParen, "')'");
      }
      return mkAtom(pred, std::move(args));
    }
    fail(cur(), "E-SYNTAX", "expected a formula");
  }

  FormulaPtr parseFormula() {
    FormulaPtr f = parseFormulaAtom();
    while (at(Tok::Star)) {
      next();
      f = mkTensor(f, parseFormulaAtom());
    }
    return f;
  }

  // ------------------------------------------------------------- types

  TypePtr parseType(std::set<std::string> boundTVars) {
    if (at(Tok::LParen)) {
      next();
      TypePtr t = parseType(boundTVars);
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::LBrace)) {
      next();
      std::string binder = expectIdent("refinement binder");
      expect(Tok::Colon, "':'");
      TypePtr base = parseType(boundTVars);
      expect(Tok::Pipe, "'|'");
      FormulaPtr f = parseFormula();
      expect(Tok::RBrace, "'}'");
      return mkRefined(binder, base, f);
    }
    if (cur().kind != Tok::Ident) fail(cur(), "E-SYNTAX", "expected a type");
    Token head = cur();
    if (head.text == "end") {
      next();
      return mkEnd();
    }
    if (head.text == "rec") {
      next();
      std::string var = expectIdent("type variable");
      expect(Tok::Dot, "'.'");
      boundTVars.insert(var);
      return mkRec(var, parseType(boundTVars));
    }
    if (head.text == "lin" || head.text == "un") {
      next();
      Qual q = head.text == "lin" ? Qual::Lin : Qual::Un;
      Dir dir;
      if (at(Tok::Bang))
        dir = Dir::Out;
      else if (at(Tok::Question))
        dir = Dir::In;
      else
        fail(cur(), "E-SYNTAX", "expected '!' or '?' after qualifier");
      next();
      std::string binder = expectIdent("payload binder");
      expect(Tok::Colon, "':'");
      TypePtr payload = parseType(boundTVars);
      expect(Tok::Dot, "'.'");
      TypePtr cont = parseType(boundTVars);
      return mkSession(q, dir, binder, payload, cont);
    }
    next();
    if (isBaseType(head.text)) return mkBase(head.text);
    auto alias = prog.typeAliases.find(head.text);
    if (alias != prog.typeAliases.end()) return alias->second;
    if (boundTVars.count(head.text)) return mkTVar(head.text);
    fail(head, "E-UNKNOWN", "unknown type name '" + head.text + "'");
  }

  TypePtr parseCheckedType(const Token& at) {
    TypePtr t = parseType({});
    if (!isContractive(t))
      fail(at, "E-CONTRACT", "type is not contractive");
    if (hasRecursiveRefinement(t))
      fail(at, "E-RECREF", "recursive refinement types are not supported");
    return t;
  }

  // --------------------------------------------------------- processes

  ProcPtr parsePrefix() {
    if (at(Tok::Int) && cur().text == "0") {
      next();
      return mkInact();
    }
    if (at(Tok::Star)) {
      next();
      return mkRepl(parsePrefix());
    }
    if (atIdent("new")) {
      next();
      std::string left = expectIdent("channel endpoint");
      std::string right = expectIdent("channel endpoint");
      expect(Tok::Colon, "':'");
      Token annotTok = cur();
      TypePtr annot;
      TypePtr annotRight;
      if (at(Tok::LParen)) {
        next();
        annot = parseType({});
        if (at(Tok::Comma)) {
          next();
          annotRight = parseType({});
        }
        expect(Tok::RParen, "')'");
      } else {
        annot = parseType({});
      }
      if (!isContractive(annot) || (annotRight && !isContractive(annotRight)))
        fail(annotTok, "E-CONTRACT", "type is not contractive");
      if (hasRecursiveRefinement(annot) ||
          (annotRight && hasRecursiveRefinement(annotRight)))
        fail(annotTok, "E-RECREF", "recursive refinement types are not supported");
      return mkRestrict(left, right, annot, parsePrefix(), annotRight);
    }
    if (atIdent("assert")) {
      next();
      FormulaPtr f = parseFormula();
      expect(Tok::Dot, "'.'");
      return mkAssert(f, parsePrefix());
    }
    if (at(Tok::LParen)) {
      if (peek(1).kind == Tok::Ident && peek(1).text == "assume") {
        next();
        next();
        FormulaPtr f = parseFormula();
        expect(Tok::RParen, "')'");
        return mkAssume(f, parsePrefix());
      }
      next();
      ProcPtr p = parsePar();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (cur().kind == Tok::Ident && !kKeywords.count(cur().text)) {
      std::string name = next().text;
      if (at(Tok::Bang)) {
        next();
        ValuePtr v = parseValue();
        expect(Tok::Dot, "'.'");
        return mkOutput(name, v, parsePrefix());
      }
      if (at(Tok::Question)) {
        next();
        std::string binder = expectIdent("input binder");
        expect(Tok::Dot, "'.'");
        return mkInput(name, binder, parsePrefix());
      }
      if (at(Tok::LParen)) {
        next();
        std::vector<ValuePtr> args;
        if (!at(Tok::RParen)) {
          args.push_back(parseValue());
          while (at(Tok::Comma)) {
            next();
            args.push_back(parseValue());
          }
        }
        expect(Tok::RParen, "')'");
        return mkCall(name, std::move(args));
      }
      fail(cur(), "E-SYNTAX",
           "expected '!', '?' or '(' after identifier '" + name + "'");
    }
    fail(cur(), "E-SYNTAX", "expected a process");
  }

  ProcPtr parsePar() {
    ProcPtr p = parsePrefix();
    while (at(Tok::Pipe)) {
      next();
      p = mkPar(p, parsePrefix());
    }
    return p;
  }

  // ------------------------------------------------------ declarations

  void parseContextDecl() {
    // context entry {, entry}; entry := x : T | formula
    while (true) {
      if (cur().kind == Tok::Ident && !kKeywords.count(cur().text) &&
          peek(1).kind == Tok::Colon) {
        Token nameTok = cur();
        std::string name = next().text;
        next();  // ':'
        TypePtr t = parseCheckedType(nameTok);
        for (const auto& e : prog.declaredContext.entries)
          if (const auto* b = std::get_if<Binding>(&e))
            if (b->name == name)
              fail(nameTok, "E-DUP", "duplicate context binding '" + name + "'");
        prog.declaredContext.entries.push_back(Binding{name, t});
      } else {
        prog.declaredContext.entries.push_back(Resource{parseFormula()});
      }
      if (at(Tok::Comma))
        next();
      else
        break;
    }
  }

  void parseTop() {
    prog.baseTypes.push_back("unit");
    while (!at(Tok::Eof)) {
      if (atIdent("base")) {
        next();
        while (true) {
          Token t = cur();
          std::string name = expectIdent("base type name");
          if (isBaseType(name))
            fail(t, "E-DUP", "duplicate base type '" + name + "'");
          prog.baseTypes.push_back(name);
          if (at(Tok::Comma))
            next();
          else
            break;
        }
        expect(Tok::Semi, "';'");
        continue;
      }
      if (atIdent("type")) {
        next();
        Token nameTok = cur();
        std::string name = expectIdent("type alias name");
        if (prog.typeAliases.count(name) || isBaseType(name))
          fail(nameTok, "E-DUP", "duplicate type name '" + name + "'");
        expect(Tok::Eq, "'='");
        prog.typeAliases[name] = parseCheckedType(nameTok);
        if (at(Tok::Semi)) next();
        continue;
      }
      if (atIdent("context")) {
        next();
        parseContextDecl();
        if (at(Tok::Semi)) next();
        continue;
      }
      // macro or main definition
      Token nameTok = cur();
      std::string name = expectIdent("definition name");
      std::vector<std::string> params;
      bool hasParams = false;
      if (at(Tok::LParen)) {
        hasParams = true;
        next();
        if (!at(Tok::RParen)) {
          params.push_back(expectIdent("parameter"));
          while (at(Tok::Comma)) {
            next();
            params.push_back(expectIdent("parameter"));
          }
        }
        expect(Tok::RParen, "')'");
      }
      expect(Tok::Eq, "'='");
      ProcPtr body = parsePar();
      if (name == "main") {
        if (hasParams)
          fail(nameTok, "E-SYNTAX", "main takes no parameters");
        if (prog.main) fail(nameTok, "E-DUP", "duplicate main definition");
        prog.main = body;
      } else {
        if (prog.macros.count(name))
          fail(nameTok, "E-DUP", "duplicate macro '" + name + "'");
        prog.macros[name] = Macro{std::move(params), body};
      }
      if (at(Tok::Semi)) next();
    }
  }
};

}  // namespace

ParseResult parseProgram(const std::string& source) {
  ParseResult result;
  try {
    Parser p;
    p.toks = lex(source);
    p.parseTop();
    result.program = std::move(p.prog);
  } catch (const ParseFail& f) {
    Diagnostic d = f.diag;
    if (d.begin > source.size()) d.begin = source.size();
    if (d.end > source.size()) d.end = source.size();
    if (d.end <= d.begin) {
      // keep the span non-empty: point at the last character
      d.begin = source.empty() ? 0 : source.size() - 1;
      d.end = source.size();
    }
    result.diagnostics.push_back(d);
  }
  return result;
}

// ----------------------------------------------------- macro expansion

namespace {

struct ExpandFail {
  Diagnostic diag;
};

ProcPtr expandIn(const Program& prog, const ProcPtr& p,
                 std::vector<std::string>& stack);

ProcPtr expandCall(const Program& prog, const CallP& call,
                   std::vector<std::string>& stack) {
  for (const auto& seen : stack)
    if (seen == call.name) {
      Diagnostic d;
      d.code = "E-CYCLE";
      d.message = "cyclic macro reference through '" + call.name + "'";
      d.end = 1;
      throw ExpandFail{d};
    }
  auto it = prog.macros.find(call.name);
  if (it == prog.macros.end()) {
    Diagnostic d;
    d.code = "E-UNKNOWN";
    d.message = "unknown macro '" + call.name + "'";
    d.end = 1;
    throw ExpandFail{d};
  }
  const Macro& m = it->second;
  if (m.params.size() != call.args.size()) {
    Diagnostic d;
    d.code = "E-ARITY";
    d.message = "macro '" + call.name + "' expects " +
                std::to_string(m.params.size()) + " arguments, got " +
                std::to_string(call.args.size());
    d.end = 1;
    throw ExpandFail{d};
  }
  ProcPtr body = refreshBinders(m.body);
  // rename parameters apart before substituting the arguments
  std::vector<std::string> fresh;
  for (const auto& param : m.params) {
    std::string f = freshName(param);
    body = substitute(body, param, mkVar(f));
    fresh.push_back(f);
  }
  for (size_t i = 0; i < fresh.size(); ++i)
    body = substitute(body, fresh[i], call.args[i]);
  stack.push_back(call.name);
  ProcPtr out = expandIn(prog, body, stack);
  stack.pop_back();
  return out;
}

ProcPtr expandIn(const Program& prog, const ProcPtr& p,
                 std::vector<std::string>& stack) {
  if (const auto* c = std::get_if<CallP>(&p->node))
    return expandCall(prog, *c, stack);
  if (const auto* o = std::get_if<OutputP>(&p->node))
    return mkOutput(o->chan, o->val, expandIn(prog, o->cont, stack));
  if (const auto* i = std::get_if<InputP>(&p->node))
    return mkInput(i->chan, i->binder, expandIn(prog, i->cont, stack));
  if (const auto* pa = std::get_if<ParP>(&p->node))
    return mkPar(expandIn(prog, pa->lhs, stack), expandIn(prog, pa->rhs, stack));
  if (const auto* r = std::get_if<ReplP>(&p->node))
    return mkRepl(expandIn(prog, r->body, stack));
  if (const auto* n = std::get_if<RestrictP>(&p->node))
    return mkRestrict(n->left, n->right, n->annot,
                      expandIn(prog, n->body, stack), n->annotRight);
  if (const auto* a = std::get_if<AssumeP>(&p->node))
    return mkAssume(a->formula, expandIn(prog, a->body, stack));
  if (const auto* as = std::get_if<AssertP>(&p->node))
    return mkAssert(as->formula, expandIn(prog, as->cont, stack));
  return p;
}

}  // namespace

ExpandResult expandMacros(const Program& p) {
  ExpandResult result;
  if (!p.main) {
    Diagnostic d;
    d.code = "E-NOMAIN";
    d.message = "program has no main process";
    d.end = 1;
    result.diagnostics.push_back(d);
    return result;
  }
  try {
    std::vector<std::string> stack;
    result.process = expandIn(p, p.main, stack);
  } catch (const ExpandFail& f) {
    result.diagnostics.push_back(f.diag);
  }
  return result;
}

ProcPtr parseProcessText(const std::string& text) {
  auto r = parseProgram("base product, ccard, nat;\nmain = " + text);
  if (!r.ok()) throw std::runtime_error("parse error: " + r.diagnostics[0].message);
  auto e = expandMacros(*r.program);
  if (!e.ok()) throw std::runtime_error("expand error: " + e.diagnostics[0].message);
  return e.process;
}

TypePtr parseTypeText(const std::string& text) {
  auto r = parseProgram("base product, ccard, nat;\ntype X = " + text);
  if (!r.ok()) throw std::runtime_error("parse error: " + r.diagnostics[0].message);
  return r.program->typeAliases.at("X");
}

}  // namespace lsp
