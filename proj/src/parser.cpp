#include "hgrd/parser.hpp"

#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace hgrd {

std::string Diagnostic::str() const {
  const char *k = "error";
  switch (kind) {
  case DiagKind::SyntaxError:
    k = "syntax error";
    break;
  case DiagKind::UnboundIdentifier:
    k = "unbound identifier";
    break;
  case DiagKind::NonConstantDivisor:
    k = "non-constant divisor";
    break;
  case DiagKind::TypeError:
    k = "type error";
    break;
  case DiagKind::UnreachableCode:
    k = "unreachable code";
    break;
  }
  std::ostringstream os;
  os << loc.file << ":" << loc.line << ":" << loc.column << ": " << k << ": "
     << message;
  return os.str();
}

namespace {

enum class Tok {
  End,
  Ident,
  Number,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Amp,
  Assign,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  AndAnd,
  OrOr,
  Dot,
  PlusPlus,
  LaunchOpen,  // <<<
  LaunchClose, // >>>
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long number = 0;
  SourceLoc loc;
};

class Lexer {
public:
  Lexer(const std::string &src, const std::string &file)
      : src_(src), file_(file) {}

  Token next() {
    skipWhitespaceAndComments();
    Token t;
    t.loc = here();
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        advance();
      t.kind = Tok::Ident;
      t.text = src_.substr(start, pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
      t.kind = Tok::Number;
      t.text = src_.substr(start, pos_ - start);
      t.number = std::stoll(t.text);
      return t;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (two('<', '<') && pos_ + 2 < src_.size() && src_[pos_ + 2] == '<') {
      advance();
      advance();
      advance();
      t.kind = Tok::LaunchOpen;
      return t;
    }
    if (two('>', '>') && pos_ + 2 < src_.size() && src_[pos_ + 2] == '>') {
      advance();
      advance();
      advance();
      t.kind = Tok::LaunchClose;
      return t;
    }
    if (two('<', '=')) {
      advance();
      advance();
      t.kind = Tok::Le;
      return t;
    }
    if (two('>', '=')) {
      advance();
      advance();
      t.kind = Tok::Ge;
      return t;
    }
    if (two('=', '=')) {
      advance();
      advance();
      t.kind = Tok::EqEq;
      return t;
    }
    if (two('!', '=')) {
      advance();
      advance();
      t.kind = Tok::Ne;
      return t;
    }
    if (two('&', '&')) {
      advance();
      advance();
      t.kind = Tok::AndAnd;
      return t;
    }
    if (two('|', '|')) {
      advance();
      advance();
      t.kind = Tok::OrOr;
      return t;
    }
    if (two('+', '+')) {
      advance();
      advance();
      t.kind = Tok::PlusPlus;
      return t;
    }
    advance();
    switch (c) {
    case '(':
      t.kind = Tok::LParen;
      return t;
    case ')':
      t.kind = Tok::RParen;
      return t;
    case '{':
      t.kind = Tok::LBrace;
      return t;
    case '}':
      t.kind = Tok::RBrace;
      return t;
    case '[':
      t.kind = Tok::LBracket;
      return t;
    case ']':
      t.kind = Tok::RBracket;
      return t;
    case ',':
      t.kind = Tok::Comma;
      return t;
    case ';':
      t.kind = Tok::Semi;
      return t;
    case '&':
      t.kind = Tok::Amp;
      return t;
    case '=':
      t.kind = Tok::Assign;
      return t;
    case '+':
      t.kind = Tok::Plus;
      return t;
    case '-':
      t.kind = Tok::Minus;
      return t;
    case '*':
      t.kind = Tok::Star;
      return t;
    case '/':
      t.kind = Tok::Slash;
      return t;
    case '%':
      t.kind = Tok::Percent;
      return t;
    case '<':
      t.kind = Tok::Lt;
      return t;
    case '>':
      t.kind = Tok::Gt;
      return t;
    case '.':
      t.kind = Tok::Dot;
      return t;
    default:
      break;
    }
    t.kind = Tok::End;
    t.text = std::string(1, c);
    t.number = -1; // marks a bad character for the parser
    return t;
  }

  SourceLoc here() const { return SourceLoc{file_, line_, col_}; }
  int lineCount() const { return line_; }

private:
  void advance() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skipWhitespaceAndComments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < src_.size() &&
               !(src_[pos_] == '*' && src_[pos_ + 1] == '/'))
          advance();
        advance();
        advance();
        continue;
      }
      break;
    }
  }

  const std::string &src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct ParseError {
  Diagnostic diag;
};

class Parser {
public:
  Parser(const std::string &src, const std::string &file)
      : lexer_(src, file), file_(file) {
    cur_ = lexer_.next();
    peek_ = lexer_.next();
  }

  ParseResult run() {
    ParseResult result;
    Program program;
    program.fileName = file_;
    try {
      while (cur_.kind != Tok::End)
        parseTopLevel(program);
      resolve(program);
    } catch (const ParseError &e) {
      result.diagnostics.push_back(e.diag);
      return result;
    }
    if (!diags_.empty()) {
      result.diagnostics = diags_;
      return result;
    }
    result.program = std::move(program);
    return result;
  }

private:
  [[noreturn]] void fail(DiagKind kind, const SourceLoc &loc,
                         const std::string &msg) {
    throw ParseError{Diagnostic{kind, loc, msg}};
  }
  [[noreturn]] void syntax(const std::string &msg) {
    fail(DiagKind::SyntaxError, cur_.loc, msg);
  }

  Token take() {
    Token t = cur_;
    cur_ = peek_;
    peek_ = lexer_.next();
    return t;
  }
  bool at(Tok k) const { return cur_.kind == k; }
  bool atIdent(const char *s) const {
    return cur_.kind == Tok::Ident && cur_.text == s;
  }
  Token expect(Tok k, const char *what) {
    if (!at(k))
      syntax(std::string("expected ") + what);
    return take();
  }
  bool accept(Tok k) {
    if (at(k)) {
      take();
      return true;
    }
    return false;
  }

  int freshId() { return ++nodeCounter_; }

  ExprPtr makeExpr(SourceLoc loc,
                   std::variant<IntLit, VarRef, BuiltinRef, BinaryExpr,
                                ArrayLoad, InputExpr>
                       node) {
    auto e = std::make_unique<Expr>();
    e->loc = std::move(loc);
    e->nodeId = freshId();
    e->node = std::move(node);
    return e;
  }

  StmtPtr makeStmt(SourceLoc loc,
                   std::variant<AssignStmt, ArrayStoreStmt, IfStmt, ForStmt,
                                BarrierStmt, FenceStmt, AtomicStmt, AssertStmt,
                                AllocStmt, LaunchStmt, CallStmt, ReturnStmt>
                       node) {
    auto s = std::make_unique<Stmt>();
    s->loc = std::move(loc);
    s->nodeId = freshId();
    s->node = std::move(node);
    return s;
  }

  // --- top level ---------------------------------------------------------

  void parseTopLevel(Program &program) {
    if (atIdent("__global__")) {
      take();
      if (!atIdent("void"))
        syntax("expected 'void' after '__global__'");
      take();
      KernelDecl k;
      k.loc = cur_.loc;
      k.name = expect(Tok::Ident, "kernel name").text;
      k.params = parseParams();
      k.body = parseBlock(/*inKernel=*/true);
      program.kernels.push_back(std::move(k));
      return;
    }
    if (atIdent("void") || atIdent("int")) {
      bool isInt = cur_.text == "int";
      take();
      if (isInt && at(Tok::Star))
        syntax("top-level array declarations are not supported");
      FunctionDecl f;
      f.loc = cur_.loc;
      f.name = expect(Tok::Ident, "function name").text;
      f.params = parseParams();
      f.body = parseBlock(/*inKernel=*/false);
      program.hostFunctions.push_back(std::move(f));
      return;
    }
    syntax("expected a kernel or host function declaration");
  }

  std::vector<Param> parseParams() {
    expect(Tok::LParen, "'('");
    std::vector<Param> params;
    if (accept(Tok::RParen))
      return params;
    do {
      Param p;
      p.loc = cur_.loc;
      if (!at(Tok::Ident))
        syntax("expected parameter type");
      std::string ty = take().text;
      bool ptr = accept(Tok::Star);
      if (ty == "int" && !ptr)
        p.type = ParamType::Int;
      else if (ty == "int" && ptr)
        p.type = ParamType::IntArray;
      else if (ty == "float" && ptr)
        p.type = ParamType::FloatArray;
      else if (ty == "lock" && ptr)
        p.type = ParamType::LockArray;
      else
        fail(DiagKind::SyntaxError, p.loc, "unsupported parameter type '" +
                                               ty + (ptr ? "*" : "") + "'");
      p.name = expect(Tok::Ident, "parameter name").text;
      params.push_back(std::move(p));
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    return params;
  }

  StmtList parseBlock(bool inKernel) {
    expect(Tok::LBrace, "'{'");
    StmtList stmts;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End))
        syntax("unexpected end of input inside block");
      stmts.push_back(parseStmt(inKernel));
    }
    take();
    return stmts;
  }

  // --- statements --------------------------------------------------------

  StmtPtr parseStmt(bool inKernel) {
    SourceLoc loc = cur_.loc;
    if (at(Tok::Ident)) {
      const std::string &w = cur_.text;
      if (w == "if")
        return parseIf(inKernel);
      if (w == "for")
        return parseFor(inKernel);
      if (w == "return") {
        take();
        ReturnStmt r;
        if (!at(Tok::Semi))
          r.value = parseExpr();
        expect(Tok::Semi, "';'");
        return makeStmt(loc, std::move(r));
      }
      if (w == "__syncthreads" || w == "__syncwarp") {
        if (!inKernel)
          fail(DiagKind::SyntaxError, loc, w + " is kernel-only");
        BarrierStmt b;
        b.kind = w == "__syncthreads" ? BarrierKind::SyncThreads
                                      : BarrierKind::SyncWarp;
        take();
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return makeStmt(loc, std::move(b));
      }
      if (w == "__threadfence" || w == "__threadfence_block") {
        if (!inKernel)
          fail(DiagKind::SyntaxError, loc, w + " is kernel-only");
        FenceStmt f;
        f.scope = w == "__threadfence" ? Scope::Device : Scope::Block;
        take();
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return makeStmt(loc, std::move(f));
      }
      if (w.rfind("atomic", 0) == 0)
        return parseAtomic(inKernel);
      if (w == "assert") {
        if (inKernel)
          fail(DiagKind::SyntaxError, loc, "assert is host-only");
        take();
        expect(Tok::LParen, "'('");
        AssertStmt a;
        a.cond = parseExpr();
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return makeStmt(loc, std::move(a));
      }
      if (w == "cudaMalloc" || w == "cudaMallocPitch")
        return parseAlloc(inKernel);
      if (w == "int" || w == "float" || w == "lock")
        return parseDecl(inKernel);
      // Remaining forms start with a plain identifier: assignment, array
      // store, kernel launch, or host call.
      return parseIdentStmt(inKernel);
    }
    syntax("expected a statement");
  }

  StmtPtr parseDecl(bool inKernel) {
    SourceLoc loc = cur_.loc;
    std::string ty = take().text;
    bool ptr = accept(Tok::Star);
    AssignStmt a;
    a.isDecl = true;
    if (ty == "int" && !ptr)
      a.declType = ParamType::Int;
    else if (ty == "int" && ptr)
      a.declType = ParamType::IntArray;
    else if (ty == "float" && ptr)
      a.declType = ParamType::FloatArray;
    else if (ty == "lock" && ptr)
      a.declType = ParamType::LockArray;
    else
      fail(DiagKind::SyntaxError, loc, "unsupported declaration type");
    if (inKernel && ptr)
      fail(DiagKind::SyntaxError, loc,
           "array declarations are host-only; kernels receive arrays as "
           "parameters");
    a.name = expect(Tok::Ident, "variable name").text;
    if (accept(Tok::Assign)) {
      if (ptr)
        fail(DiagKind::SyntaxError, loc,
             "array variables are initialized by cudaMalloc");
      a.value = parseExpr();
    }
    expect(Tok::Semi, "';'");
    return makeStmt(loc, std::move(a));
  }

  StmtPtr parseIdentStmt(bool inKernel) {
    SourceLoc loc = cur_.loc;
    std::string name = take().text;
    if (at(Tok::LBracket)) {
      take();
      ArrayStoreStmt s;
      s.array = name;
      s.index = parseExpr();
      expect(Tok::RBracket, "']'");
      expect(Tok::Assign, "'='");
      s.value = parseExpr();
      expect(Tok::Semi, "';'");
      return makeStmt(loc, std::move(s));
    }
    if (at(Tok::Assign)) {
      take();
      AssignStmt a;
      a.name = name;
      a.value = parseExpr();
      expect(Tok::Semi, "';'");
      return makeStmt(loc, std::move(a));
    }
    if (at(Tok::LaunchOpen)) {
      if (inKernel)
        fail(DiagKind::SyntaxError, loc, "kernel launch is host-only");
      take();
      LaunchStmt l;
      l.kernel = name;
      l.grid = parseDim3();
      expect(Tok::Comma, "','");
      l.block = parseDim3();
      expect(Tok::LaunchClose, "'>>>'");
      expect(Tok::LParen, "'('");
      if (!at(Tok::RParen)) {
        do
          l.args.push_back(parseExpr());
        while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      return makeStmt(loc, std::move(l));
    }
    if (at(Tok::LParen)) {
      if (inKernel)
        fail(DiagKind::SyntaxError, loc,
             "function calls are not allowed in kernels");
      take();
      CallStmt c;
      c.callee = name;
      if (!at(Tok::RParen)) {
        do
          c.args.push_back(parseExpr());
        while (accept(Tok::Comma));
      }
      expect(Tok::RParen, "')'");
      expect(Tok::Semi, "';'");
      return makeStmt(loc, std::move(c));
    }
    syntax("expected '=', '[', '(' or '<<<' after identifier");
  }

  std::array<ExprPtr, 3> parseDim3() {
    std::array<ExprPtr, 3> dims;
    if (at(Tok::LParen)) {
      // Either a parenthesized triple or a parenthesized scalar expression.
      SourceLoc loc = cur_.loc;
      take();
      ExprPtr first = parseExpr();
      if (accept(Tok::Comma)) {
        dims[0] = std::move(first);
        dims[1] = parseExpr();
        expect(Tok::Comma, "','");
        dims[2] = parseExpr();
        expect(Tok::RParen, "')'");
        return dims;
      }
      expect(Tok::RParen, "')'");
      dims[0] = std::move(first);
      dims[1] = makeExpr(loc, IntLit{1});
      dims[2] = makeExpr(loc, IntLit{1});
      return dims;
    }
    // A bare scalar: '>>>' lexes as one token, so a full expression is
    // unambiguous here.
    SourceLoc loc = cur_.loc;
    dims[0] = parseExpr();
    dims[1] = makeExpr(loc, IntLit{1});
    dims[2] = makeExpr(loc, IntLit{1});
    return dims;
  }

  StmtPtr parseAtomic(bool inKernel) {
    SourceLoc loc = cur_.loc;
    std::string name = take().text;
    if (!inKernel)
      fail(DiagKind::SyntaxError, loc, "atomic operations are kernel-only");
    AtomicStmt a;
    std::string base = name;
    if (base.size() > 6 && base.substr(base.size() - 6) == "_block") {
      a.scope = Scope::Block;
      base = base.substr(0, base.size() - 6);
    } else {
      a.scope = Scope::Device;
    }
    if (base == "atomicCAS")
      a.op = AtomicKind::Cas;
    else if (base == "atomicExch")
      a.op = AtomicKind::Exch;
    else if (base == "atomicAdd")
      a.op = AtomicKind::Add;
    else
      fail(DiagKind::SyntaxError, loc, "unknown intrinsic '" + name + "'");
    expect(Tok::LParen, "'('");
    a.array = expect(Tok::Ident, "array name").text;
    expect(Tok::LBracket, "'['");
    a.index = parseExpr();
    expect(Tok::RBracket, "']'");
    expect(Tok::Comma, "','");
    if (a.op == AtomicKind::Cas) {
      a.compare = parseExpr();
      expect(Tok::Comma, "','");
    }
    a.value = parseExpr();
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    return makeStmt(loc, std::move(a));
  }

  StmtPtr parseAlloc(bool inKernel) {
    SourceLoc loc = cur_.loc;
    std::string name = take().text;
    if (inKernel)
      fail(DiagKind::SyntaxError, loc, name + " is host-only");
    AllocStmt a;
    a.kind = name == "cudaMalloc" ? AllocKind::Malloc : AllocKind::MallocPitch;
    expect(Tok::LParen, "'('");
    expect(Tok::Amp, "'&'");
    a.array = expect(Tok::Ident, "array name").text;
    expect(Tok::Comma, "','");
    if (a.kind == AllocKind::MallocPitch) {
      expect(Tok::Amp, "'&'");
      a.pitchVar = expect(Tok::Ident, "pitch variable").text;
      expect(Tok::Comma, "','");
      a.width = parseExpr();
      expect(Tok::Comma, "','");
      a.height = parseExpr();
    } else {
      a.width = parseExpr();
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    return makeStmt(loc, std::move(a));
  }

  StmtPtr parseIf(bool inKernel) {
    SourceLoc loc = cur_.loc;
    take();
    expect(Tok::LParen, "'('");
    IfStmt s;
    s.cond = parseExpr();
    expect(Tok::RParen, "')'");
    s.thenBody = parseBlock(inKernel);
    if (atIdent("else")) {
      take();
      s.elseBody = parseBlock(inKernel);
    }
    return makeStmt(loc, std::move(s));
  }

  StmtPtr parseFor(bool inKernel) {
    SourceLoc loc = cur_.loc;
    take();
    expect(Tok::LParen, "'('");
    ForStmt f;
    if (atIdent("int")) {
      take();
      f.declaresIter = true;
    }
    f.iter = expect(Tok::Ident, "loop iterator").text;
    expect(Tok::Assign, "'='");
    f.init = parseExpr();
    expect(Tok::Semi, "';'");
    std::string condVar = expect(Tok::Ident, "loop iterator").text;
    if (condVar != f.iter)
      fail(DiagKind::SyntaxError, loc,
           "loop condition must test the iterator '" + f.iter + "'");
    if (at(Tok::Lt))
      f.inclusiveBound = false;
    else if (at(Tok::Le))
      f.inclusiveBound = true;
    else
      syntax("loop condition must be '<' or '<='");
    take();
    f.bound = parseExpr();
    expect(Tok::Semi, "';'");
    std::string stepVar = expect(Tok::Ident, "loop iterator").text;
    if (stepVar != f.iter)
      fail(DiagKind::SyntaxError, loc, "loop update must assign the iterator");
    if (accept(Tok::PlusPlus)) {
      f.step = 1;
    } else {
      expect(Tok::Assign, "'='");
      std::string rhsVar = expect(Tok::Ident, "iterator").text;
      if (rhsVar != f.iter)
        fail(DiagKind::SyntaxError, loc,
             "loop update must be 'i = i + <constant>' or 'i++'");
      expect(Tok::Plus, "'+'");
      Token n = expect(Tok::Number, "step constant");
      f.step = n.number;
      if (f.step <= 0)
        fail(DiagKind::SyntaxError, loc, "loop step must be positive");
    }
    expect(Tok::RParen, "')'");
    f.body = parseBlock(inKernel);
    return makeStmt(loc, std::move(f));
  }

  // --- expressions (C precedence) ----------------------------------------

  ExprPtr parseExpr() { return parseOr(); }

  ExprPtr parseOr() {
    ExprPtr lhs = parseAnd();
    while (at(Tok::OrOr)) {
      SourceLoc loc = cur_.loc;
      take();
      BinaryExpr b;
      b.op = BinOp::Or;
      b.lhs = std::move(lhs);
      b.rhs = parseAnd();
      lhs = makeExpr(loc, std::move(b));
    }
    return lhs;
  }

  ExprPtr parseAnd() {
    ExprPtr lhs = parseEquality();
    while (at(Tok::AndAnd)) {
      SourceLoc loc = cur_.loc;
      take();
      BinaryExpr b;
      b.op = BinOp::And;
      b.lhs = std::move(lhs);
      b.rhs = parseEquality();
      lhs = makeExpr(loc, std::move(b));
    }
    return lhs;
  }

  ExprPtr parseEquality() {
    ExprPtr lhs = parseRelational();
    while (at(Tok::EqEq) || at(Tok::Ne)) {
      SourceLoc loc = cur_.loc;
      BinOp op = at(Tok::EqEq) ? BinOp::Eq : BinOp::Ne;
      take();
      BinaryExpr b;
      b.op = op;
      b.lhs = std::move(lhs);
      b.rhs = parseRelational();
      lhs = makeExpr(loc, std::move(b));
    }
    return lhs;
  }

  ExprPtr parseRelational() {
    ExprPtr lhs = parseAddExpr();
    while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
      SourceLoc loc = cur_.loc;
      BinOp op = at(Tok::Lt)   ? BinOp::Lt
                 : at(Tok::Le) ? BinOp::Le
                 : at(Tok::Gt) ? BinOp::Gt
                               : BinOp::Ge;
      take();
      BinaryExpr b;
      b.op = op;
      b.lhs = std::move(lhs);
      b.rhs = parseAddExpr();
      lhs = makeExpr(loc, std::move(b));
    }
    return lhs;
  }

  ExprPtr parseAddExpr() {
    ExprPtr lhs = parseMulExpr();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      SourceLoc loc = cur_.loc;
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      take();
      BinaryExpr b;
      b.op = op;
      b.lhs = std::move(lhs);
      b.rhs = parseMulExpr();
      lhs = makeExpr(loc, std::move(b));
    }
    return lhs;
  }

  ExprPtr parseMulExpr() {
    ExprPtr lhs = parseUnary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      SourceLoc loc = cur_.loc;
      BinOp op = at(Tok::Star)    ? BinOp::Mul
                 : at(Tok::Slash) ? BinOp::Div
                                  : BinOp::Mod;
      take();
      BinaryExpr b;
      b.op = op;
      b.lhs = std::move(lhs);
      b.rhs = parseUnary();
      if (op == BinOp::Div || op == BinOp::Mod) {
        if (!b.rhs->is<IntLit>())
          fail(DiagKind::NonConstantDivisor, loc,
               "division and modulo require a constant divisor");
        if (b.rhs->as<IntLit>().value <= 0)
          fail(DiagKind::NonConstantDivisor, loc,
               "division and modulo require a positive divisor");
      }
      lhs = makeExpr(loc, std::move(b));
    }
    return lhs;
  }

  ExprPtr parseUnary() {
    if (at(Tok::Minus)) {
      SourceLoc loc = cur_.loc;
      take();
      ExprPtr inner = parseUnary();
      if (inner->is<IntLit>())
        return makeExpr(loc, IntLit{-inner->as<IntLit>().value});
      BinaryExpr b;
      b.op = BinOp::Sub;
      b.lhs = makeExpr(loc, IntLit{0});
      b.rhs = std::move(inner);
      return makeExpr(loc, std::move(b));
    }
    return parsePrimary();
  }

  ExprPtr parsePrimary() {
    SourceLoc loc = cur_.loc;
    if (at(Tok::Number)) {
      Token t = take();
      return makeExpr(loc, IntLit{t.number});
    }
    if (accept(Tok::LParen)) {
      ExprPtr e = parseExpr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Ident)) {
      std::string name = take().text;
      if (name == "__input") {
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        return makeExpr(loc, InputExpr{});
      }
      if (name == "threadIdx" || name == "blockIdx" || name == "blockDim" ||
          name == "gridDim") {
        expect(Tok::Dot, "'.'");
        Token axisTok = expect(Tok::Ident, "axis (x, y or z)");
        Axis axis;
        if (axisTok.text == "x")
          axis = Axis::X;
        else if (axisTok.text == "y")
          axis = Axis::Y;
        else if (axisTok.text == "z")
          axis = Axis::Z;
        else
          fail(DiagKind::SyntaxError, axisTok.loc, "axis must be x, y or z");
        BuiltinVar b = name == "threadIdx"  ? BuiltinVar::ThreadIdx
                       : name == "blockIdx" ? BuiltinVar::BlockIdx
                       : name == "blockDim" ? BuiltinVar::BlockDim
                                            : BuiltinVar::GridDim;
        return makeExpr(loc, BuiltinRef{b, axis});
      }
      if (accept(Tok::LBracket)) {
        ArrayLoad l;
        l.array = name;
        l.index = parseExpr();
        expect(Tok::RBracket, "']'");
        return makeExpr(loc, std::move(l));
      }
      return makeExpr(loc, VarRef{name});
    }
    syntax("expected an expression");
  }

  // --- resolution --------------------------------------------------------

  struct Binding {
    ParamType type;
  };
  using SymTable = std::map<std::string, Binding>;

  void note(DiagKind kind, const SourceLoc &loc, const std::string &msg) {
    diags_.push_back(Diagnostic{kind, loc, msg});
  }

  void resolve(Program &program) {
    int entries = 0;
    for (const auto &f : program.hostFunctions)
      if (f.name == program.entry)
        ++entries;
    if (entries != 1)
      note(DiagKind::SyntaxError, SourceLoc{file_, 1, 1},
           "expected exactly one entry function '" + program.entry + "'");

    std::set<std::string> names;
    for (const auto &k : program.kernels)
      if (!names.insert(k.name).second)
        note(DiagKind::SyntaxError, k.loc, "duplicate kernel '" + k.name + "'");
    for (const auto &f : program.hostFunctions)
      if (!names.insert(f.name).second)
        note(DiagKind::SyntaxError, f.loc,
             "duplicate function '" + f.name + "'");

    for (const auto &k : program.kernels) {
      SymTable table;
      std::set<std::string> paramNames;
      for (const auto &p : k.params) {
        if (!paramNames.insert(p.name).second)
          note(DiagKind::SyntaxError, p.loc,
               "duplicate parameter '" + p.name + "' in kernel " + k.name);
        table[p.name] = Binding{p.type};
      }
      resolveBody(program, k.body, table, /*inKernel=*/true);
    }
    for (const auto &f : program.hostFunctions) {
      SymTable table;
      for (const auto &p : f.params)
        table[p.name] = Binding{p.type};
      resolveBody(program, f.body, table, /*inKernel=*/false);
    }
  }

  void resolveBody(const Program &program, const StmtList &stmts,
                   SymTable &table, bool inKernel) {
    bool returned = false;
    for (const auto &stmt : stmts) {
      if (returned) {
        note(DiagKind::UnreachableCode, stmt->loc,
             "statement is unreachable after return");
        returned = false; // report once per block
      }
      resolveStmt(program, *stmt, table, inKernel);
      if (stmt->is<ReturnStmt>())
        returned = true;
    }
  }

  void resolveStmt(const Program &program, const Stmt &stmt, SymTable &table,
                   bool inKernel) {
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      if (a.value)
        resolveExpr(*a.value, table, inKernel);
      if (a.isDecl) {
        table[a.name] = Binding{a.declType};
      } else {
        auto it = table.find(a.name);
        if (it == table.end())
          note(DiagKind::UnboundIdentifier, stmt.loc,
               "assignment to undeclared variable '" + a.name + "'");
        else if (isArrayType(it->second.type))
          note(DiagKind::TypeError, stmt.loc,
               "cannot assign to array variable '" + a.name + "'");
      }
      return;
    }
    if (stmt.is<ArrayStoreStmt>()) {
      const auto &s = stmt.as<ArrayStoreStmt>();
      requireArray(table, s.array, stmt.loc);
      resolveExpr(*s.index, table, inKernel);
      resolveExpr(*s.value, table, inKernel);
      return;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      resolveExpr(*s.cond, table, inKernel);
      SymTable thenTable = table;
      resolveBody(program, s.thenBody, thenTable, inKernel);
      SymTable elseTable = table;
      resolveBody(program, s.elseBody, elseTable, inKernel);
      return;
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      resolveExpr(*s.init, table, inKernel);
      resolveExpr(*s.bound, table, inKernel);
      SymTable bodyTable = table;
      if (s.declaresIter)
        bodyTable[s.iter] = Binding{ParamType::Int};
      else if (!table.count(s.iter))
        note(DiagKind::UnboundIdentifier, stmt.loc,
             "loop iterator '" + s.iter + "' is not declared");
      resolveBody(program, s.body, bodyTable, inKernel);
      return;
    }
    if (stmt.is<AtomicStmt>()) {
      const auto &s = stmt.as<AtomicStmt>();
      requireArray(table, s.array, stmt.loc);
      resolveExpr(*s.index, table, inKernel);
      if (s.compare)
        resolveExpr(*s.compare, table, inKernel);
      resolveExpr(*s.value, table, inKernel);
      return;
    }
    if (stmt.is<AssertStmt>()) {
      resolveExpr(*stmt.as<AssertStmt>().cond, table, inKernel);
      return;
    }
    if (stmt.is<AllocStmt>()) {
      const auto &s = stmt.as<AllocStmt>();
      auto it = table.find(s.array);
      if (it == table.end())
        note(DiagKind::UnboundIdentifier, stmt.loc,
             "allocation target '" + s.array + "' is not declared");
      else if (!isArrayType(it->second.type))
        note(DiagKind::TypeError, stmt.loc,
             "allocation target '" + s.array + "' is not an array");
      if (!s.pitchVar.empty()) {
        auto pit = table.find(s.pitchVar);
        if (pit == table.end())
          note(DiagKind::UnboundIdentifier, stmt.loc,
               "pitch variable '" + s.pitchVar + "' is not declared");
        else if (pit->second.type != ParamType::Int)
          note(DiagKind::TypeError, stmt.loc,
               "pitch variable '" + s.pitchVar + "' must be int");
      }
      resolveExpr(*s.width, table, inKernel);
      if (s.height)
        resolveExpr(*s.height, table, inKernel);
      return;
    }
    if (stmt.is<LaunchStmt>()) {
      const auto &s = stmt.as<LaunchStmt>();
      const KernelDecl *kernel = program.findKernel(s.kernel);
      if (!kernel) {
        note(DiagKind::UnboundIdentifier, stmt.loc,
             "launch of unknown kernel '" + s.kernel + "'");
      } else if (kernel->params.size() != s.args.size()) {
        note(DiagKind::TypeError, stmt.loc,
             "kernel '" + s.kernel + "' expects " +
                 std::to_string(kernel->params.size()) + " arguments, got " +
                 std::to_string(s.args.size()));
      } else {
        for (size_t i = 0; i < s.args.size(); ++i) {
          const Expr &arg = *s.args[i];
          bool wantArray = isArrayType(kernel->params[i].type);
          bool isArrayArg = arg.is<VarRef>() &&
                            table.count(arg.as<VarRef>().name) &&
                            isArrayType(table.at(arg.as<VarRef>().name).type);
          if (wantArray != isArrayArg)
            note(DiagKind::TypeError, arg.loc,
                 "argument " + std::to_string(i + 1) + " of '" + s.kernel +
                     "' has the wrong kind");
        }
      }
      for (const auto &d : s.grid)
        resolveExpr(*d, table, inKernel);
      for (const auto &d : s.block)
        resolveExpr(*d, table, inKernel);
      for (const auto &a : s.args)
        resolveExpr(*a, table, inKernel);
      return;
    }
    if (stmt.is<CallStmt>()) {
      const auto &s = stmt.as<CallStmt>();
      const FunctionDecl *callee = program.findHost(s.callee);
      if (!callee) {
        note(DiagKind::UnboundIdentifier, stmt.loc,
             "call to unknown function '" + s.callee + "'");
      } else if (callee->params.size() != s.args.size()) {
        note(DiagKind::TypeError, stmt.loc,
             "function '" + s.callee + "' expects " +
                 std::to_string(callee->params.size()) + " arguments");
      }
      for (const auto &a : s.args)
        resolveExpr(*a, table, inKernel);
      return;
    }
    if (stmt.is<ReturnStmt>()) {
      const auto &s = stmt.as<ReturnStmt>();
      if (s.value)
        resolveExpr(*s.value, table, inKernel);
      return;
    }
    // BarrierStmt and FenceStmt have nothing to resolve.
  }

  void requireArray(const SymTable &table, const std::string &name,
                    const SourceLoc &loc) {
    auto it = table.find(name);
    if (it == table.end())
      note(DiagKind::UnboundIdentifier, loc,
           "use of undeclared array '" + name + "'");
    else if (!isArrayType(it->second.type))
      note(DiagKind::TypeError, loc, "'" + name + "' is not an array");
  }

  void resolveExpr(const Expr &expr, const SymTable &table, bool inKernel) {
    if (expr.is<VarRef>()) {
      const auto &name = expr.as<VarRef>().name;
      if (!table.count(name))
        note(DiagKind::UnboundIdentifier, expr.loc,
             "use of undeclared variable '" + name + "'");
      return;
    }
    if (expr.is<BuiltinRef>()) {
      if (!inKernel)
        note(DiagKind::TypeError, expr.loc,
             "thread builtins are kernel-only");
      return;
    }
    if (expr.is<InputExpr>()) {
      if (inKernel)
        note(DiagKind::TypeError, expr.loc, "__input() is host-only");
      return;
    }
    if (expr.is<BinaryExpr>()) {
      const auto &b = expr.as<BinaryExpr>();
      resolveExpr(*b.lhs, table, inKernel);
      resolveExpr(*b.rhs, table, inKernel);
      return;
    }
    if (expr.is<ArrayLoad>()) {
      const auto &l = expr.as<ArrayLoad>();
      requireArray(table, l.array, expr.loc);
      resolveExpr(*l.index, table, inKernel);
      return;
    }
  }

  Lexer lexer_;
  std::string file_;
  Token cur_, peek_;
  int nodeCounter_ = 0;
  std::vector<Diagnostic> diags_;
};

} // namespace

ParseResult parseTranslationUnit(const std::string &source,
                                 const std::string &fileName) {
  Parser parser(source, fileName);
  return parser.run();
}

} // namespace hgrd
