#include "hgrd/ast.hpp"

#include <functional>
#include <sstream>

namespace hgrd {

const KernelDecl *Program::findKernel(const std::string &name) const {
  for (const auto &k : kernels)
    if (k.name == name)
      return &k;
  return nullptr;
}

const FunctionDecl *Program::findHost(const std::string &name) const {
  for (const auto &f : hostFunctions)
    if (f.name == name)
      return &f;
  return nullptr;
}

const char *binOpSpelling(BinOp op) {
  switch (op) {
  case BinOp::Add:
    return "+";
  case BinOp::Sub:
    return "-";
  case BinOp::Mul:
    return "*";
  case BinOp::Div:
    return "/";
  case BinOp::Mod:
    return "%";
  case BinOp::Lt:
    return "<";
  case BinOp::Le:
    return "<=";
  case BinOp::Gt:
    return ">";
  case BinOp::Ge:
    return ">=";
  case BinOp::Eq:
    return "==";
  case BinOp::Ne:
    return "!=";
  case BinOp::And:
    return "&&";
  case BinOp::Or:
    return "||";
  }
  return "?";
}

const char *scopeName(Scope s) {
  switch (s) {
  case Scope::None:
    return "none";
  case Scope::Block:
    return "block";
  case Scope::Device:
    return "device";
  }
  return "?";
}

std::vector<LaunchSite> listLaunchSites(const Program &program) {
  std::vector<LaunchSite> sites;
  std::function<void(const FunctionDecl &, const StmtList &)> walk =
      [&](const FunctionDecl &fn, const StmtList &stmts) {
        for (const auto &stmt : stmts) {
          if (stmt->is<LaunchStmt>()) {
            LaunchSite site;
            site.hostFunction = &fn;
            site.launch = stmt.get();
            site.kernel = program.findKernel(stmt->as<LaunchStmt>().kernel);
            sites.push_back(site);
          } else if (stmt->is<IfStmt>()) {
            const auto &s = stmt->as<IfStmt>();
            walk(fn, s.thenBody);
            walk(fn, s.elseBody);
          } else if (stmt->is<ForStmt>()) {
            walk(fn, stmt->as<ForStmt>().body);
          }
        }
      };
  for (const auto &fn : program.hostFunctions)
    walk(fn, fn.body);
  return sites;
}

namespace {

int precedence(BinOp op) {
  switch (op) {
  case BinOp::Mul:
  case BinOp::Div:
  case BinOp::Mod:
    return 6;
  case BinOp::Add:
  case BinOp::Sub:
    return 5;
  case BinOp::Lt:
  case BinOp::Le:
  case BinOp::Gt:
  case BinOp::Ge:
    return 4;
  case BinOp::Eq:
  case BinOp::Ne:
    return 3;
  case BinOp::And:
    return 2;
  case BinOp::Or:
    return 1;
  }
  return 0;
}

const char *builtinName(BuiltinVar b) {
  switch (b) {
  case BuiltinVar::ThreadIdx:
    return "threadIdx";
  case BuiltinVar::BlockIdx:
    return "blockIdx";
  case BuiltinVar::BlockDim:
    return "blockDim";
  case BuiltinVar::GridDim:
    return "gridDim";
  }
  return "?";
}

const char *axisName(Axis a) {
  switch (a) {
  case Axis::X:
    return "x";
  case Axis::Y:
    return "y";
  case Axis::Z:
    return "z";
  }
  return "?";
}

void printExpr(std::ostream &os, const Expr &e, int parentPrec) {
  if (e.is<IntLit>()) {
    long long v = e.as<IntLit>().value;
    if (v < 0) {
      os << "(" << v << ")";
    } else {
      os << v;
    }
    return;
  }
  if (e.is<VarRef>()) {
    os << e.as<VarRef>().name;
    return;
  }
  if (e.is<BuiltinRef>()) {
    const auto &b = e.as<BuiltinRef>();
    os << builtinName(b.builtin) << "." << axisName(b.axis);
    return;
  }
  if (e.is<InputExpr>()) {
    os << "__input()";
    return;
  }
  if (e.is<ArrayLoad>()) {
    const auto &l = e.as<ArrayLoad>();
    os << l.array << "[";
    printExpr(os, *l.index, 0);
    os << "]";
    return;
  }
  const auto &b = e.as<BinaryExpr>();
  int prec = precedence(b.op);
  bool paren = prec < parentPrec;
  if (paren)
    os << "(";
  printExpr(os, *b.lhs, prec);
  os << " " << binOpSpelling(b.op) << " ";
  printExpr(os, *b.rhs, prec + 1);
  if (paren)
    os << ")";
}

const char *paramTypeName(ParamType t) {
  switch (t) {
  case ParamType::Int:
    return "int ";
  case ParamType::IntArray:
    return "int *";
  case ParamType::FloatArray:
    return "float *";
  case ParamType::LockArray:
    return "lock *";
  }
  return "?";
}

class Printer {
public:
  explicit Printer(std::ostream &os) : os_(os) {}

  void printParams(const std::vector<Param> &params) {
    os_ << "(";
    for (size_t i = 0; i < params.size(); ++i) {
      if (i)
        os_ << ", ";
      os_ << paramTypeName(params[i].type) << params[i].name;
    }
    os_ << ")";
  }

  void printBody(const StmtList &stmts) {
    os_ << " {\n";
    ++indent_;
    for (const auto &s : stmts)
      printStmt(*s);
    --indent_;
    pad();
    os_ << "}\n";
  }

  void printStmt(const Stmt &stmt) {
    pad();
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      if (a.isDecl)
        os_ << paramTypeName(a.declType);
      os_ << a.name;
      if (a.value) {
        os_ << " = ";
        printExpr(os_, *a.value, 0);
      }
      os_ << ";\n";
      return;
    }
    if (stmt.is<ArrayStoreStmt>()) {
      const auto &s = stmt.as<ArrayStoreStmt>();
      os_ << s.array << "[";
      printExpr(os_, *s.index, 0);
      os_ << "] = ";
      printExpr(os_, *s.value, 0);
      os_ << ";\n";
      return;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      os_ << "if (";
      printExpr(os_, *s.cond, 0);
      os_ << ")";
      printBody(s.thenBody);
      if (!s.elseBody.empty()) {
        pad();
        os_ << "else";
        printBody(s.elseBody);
      }
      return;
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      os_ << "for (";
      if (s.declaresIter)
        os_ << "int ";
      os_ << s.iter << " = ";
      printExpr(os_, *s.init, 0);
      os_ << "; " << s.iter << (s.inclusiveBound ? " <= " : " < ");
      printExpr(os_, *s.bound, 0);
      os_ << "; " << s.iter << " = " << s.iter << " + " << s.step << ")";
      printBody(s.body);
      return;
    }
    if (stmt.is<BarrierStmt>()) {
      os_ << (stmt.as<BarrierStmt>().kind == BarrierKind::SyncThreads
                  ? "__syncthreads();\n"
                  : "__syncwarp();\n");
      return;
    }
    if (stmt.is<FenceStmt>()) {
      os_ << (stmt.as<FenceStmt>().scope == Scope::Device
                  ? "__threadfence();\n"
                  : "__threadfence_block();\n");
      return;
    }
    if (stmt.is<AtomicStmt>()) {
      const auto &a = stmt.as<AtomicStmt>();
      os_ << (a.op == AtomicKind::Cas    ? "atomicCAS"
              : a.op == AtomicKind::Exch ? "atomicExch"
                                         : "atomicAdd");
      if (a.scope == Scope::Block)
        os_ << "_block";
      os_ << "(" << a.array << "[";
      printExpr(os_, *a.index, 0);
      os_ << "], ";
      if (a.compare) {
        printExpr(os_, *a.compare, 0);
        os_ << ", ";
      }
      printExpr(os_, *a.value, 0);
      os_ << ");\n";
      return;
    }
    if (stmt.is<AssertStmt>()) {
      os_ << "assert(";
      printExpr(os_, *stmt.as<AssertStmt>().cond, 0);
      os_ << ");\n";
      return;
    }
    if (stmt.is<AllocStmt>()) {
      const auto &a = stmt.as<AllocStmt>();
      if (a.kind == AllocKind::Malloc) {
        os_ << "cudaMalloc(&" << a.array << ", ";
        printExpr(os_, *a.width, 0);
        os_ << ");\n";
      } else {
        os_ << "cudaMallocPitch(&" << a.array << ", &" << a.pitchVar << ", ";
        printExpr(os_, *a.width, 0);
        os_ << ", ";
        printExpr(os_, *a.height, 0);
        os_ << ");\n";
      }
      return;
    }
    if (stmt.is<LaunchStmt>()) {
      const auto &l = stmt.as<LaunchStmt>();
      os_ << l.kernel << "<<<(";
      for (int i = 0; i < 3; ++i) {
        if (i)
          os_ << ", ";
        printExpr(os_, *l.grid[i], 0);
      }
      os_ << "), (";
      for (int i = 0; i < 3; ++i) {
        if (i)
          os_ << ", ";
        printExpr(os_, *l.block[i], 0);
      }
      os_ << ")>>>(";
      for (size_t i = 0; i < l.args.size(); ++i) {
        if (i)
          os_ << ", ";
        printExpr(os_, *l.args[i], 0);
      }
      os_ << ");\n";
      return;
    }
    if (stmt.is<CallStmt>()) {
      const auto &c = stmt.as<CallStmt>();
      os_ << c.callee << "(";
      for (size_t i = 0; i < c.args.size(); ++i) {
        if (i)
          os_ << ", ";
        printExpr(os_, *c.args[i], 0);
      }
      os_ << ");\n";
      return;
    }
    if (stmt.is<ReturnStmt>()) {
      const auto &r = stmt.as<ReturnStmt>();
      os_ << "return";
      if (r.value) {
        os_ << " ";
        printExpr(os_, *r.value, 0);
      }
      os_ << ";\n";
      return;
    }
  }

private:
  void pad() {
    for (int i = 0; i < indent_; ++i)
      os_ << "  ";
  }
  std::ostream &os_;
  int indent_ = 0;
};

} // namespace

std::string prettyPrint(const Expr &expr) {
  std::ostringstream os;
  printExpr(os, expr, 0);
  return os.str();
}

std::string prettyPrint(const Program &program) {
  std::ostringstream os;
  Printer p(os);
  // Kernels first, then host functions, matching the usual source layout.
  for (const auto &k : program.kernels) {
    os << "__global__ void " << k.name;
    p.printParams(k.params);
    p.printBody(k.body);
    os << "\n";
  }
  for (const auto &f : program.hostFunctions) {
    os << "void " << f.name;
    p.printParams(f.params);
    p.printBody(f.body);
    os << "\n";
  }
  return os.str();
}

namespace {

bool exprEq(const Expr &a, const Expr &b);

bool exprEq(const ExprPtr &a, const ExprPtr &b) {
  if (!a || !b)
    return !a && !b;
  return exprEq(*a, *b);
}

bool exprEq(const Expr &a, const Expr &b) {
  if (a.node.index() != b.node.index())
    return false;
  if (a.is<IntLit>())
    return a.as<IntLit>().value == b.as<IntLit>().value;
  if (a.is<VarRef>())
    return a.as<VarRef>().name == b.as<VarRef>().name;
  if (a.is<BuiltinRef>())
    return a.as<BuiltinRef>().builtin == b.as<BuiltinRef>().builtin &&
           a.as<BuiltinRef>().axis == b.as<BuiltinRef>().axis;
  if (a.is<InputExpr>())
    return true;
  if (a.is<ArrayLoad>())
    return a.as<ArrayLoad>().array == b.as<ArrayLoad>().array &&
           exprEq(a.as<ArrayLoad>().index, b.as<ArrayLoad>().index);
  const auto &x = a.as<BinaryExpr>();
  const auto &y = b.as<BinaryExpr>();
  return x.op == y.op && exprEq(x.lhs, y.lhs) && exprEq(x.rhs, y.rhs);
}

bool stmtEq(const Stmt &a, const Stmt &b);

bool bodyEq(const StmtList &a, const StmtList &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmtEq(*a[i], *b[i]))
      return false;
  return true;
}

bool stmtEq(const Stmt &a, const Stmt &b) {
  if (a.node.index() != b.node.index())
    return false;
  if (a.is<AssignStmt>()) {
    const auto &x = a.as<AssignStmt>();
    const auto &y = b.as<AssignStmt>();
    return x.name == y.name && x.isDecl == y.isDecl &&
           (!x.isDecl || x.declType == y.declType) && exprEq(x.value, y.value);
  }
  if (a.is<ArrayStoreStmt>()) {
    const auto &x = a.as<ArrayStoreStmt>();
    const auto &y = b.as<ArrayStoreStmt>();
    return x.array == y.array && exprEq(x.index, y.index) &&
           exprEq(x.value, y.value);
  }
  if (a.is<IfStmt>()) {
    const auto &x = a.as<IfStmt>();
    const auto &y = b.as<IfStmt>();
    return exprEq(x.cond, y.cond) && bodyEq(x.thenBody, y.thenBody) &&
           bodyEq(x.elseBody, y.elseBody);
  }
  if (a.is<ForStmt>()) {
    const auto &x = a.as<ForStmt>();
    const auto &y = b.as<ForStmt>();
    return x.iter == y.iter && x.inclusiveBound == y.inclusiveBound &&
           x.step == y.step && exprEq(x.init, y.init) &&
           exprEq(x.bound, y.bound) && bodyEq(x.body, y.body);
  }
  if (a.is<BarrierStmt>())
    return a.as<BarrierStmt>().kind == b.as<BarrierStmt>().kind;
  if (a.is<FenceStmt>())
    return a.as<FenceStmt>().scope == b.as<FenceStmt>().scope;
  if (a.is<AtomicStmt>()) {
    const auto &x = a.as<AtomicStmt>();
    const auto &y = b.as<AtomicStmt>();
    return x.op == y.op && x.scope == y.scope && x.array == y.array &&
           exprEq(x.index, y.index) && exprEq(x.compare, y.compare) &&
           exprEq(x.value, y.value);
  }
  if (a.is<AssertStmt>())
    return exprEq(a.as<AssertStmt>().cond, b.as<AssertStmt>().cond);
  if (a.is<AllocStmt>()) {
    const auto &x = a.as<AllocStmt>();
    const auto &y = b.as<AllocStmt>();
    return x.kind == y.kind && x.array == y.array &&
           x.pitchVar == y.pitchVar && exprEq(x.width, y.width) &&
           exprEq(x.height, y.height);
  }
  if (a.is<LaunchStmt>()) {
    const auto &x = a.as<LaunchStmt>();
    const auto &y = b.as<LaunchStmt>();
    if (x.kernel != y.kernel || x.args.size() != y.args.size())
      return false;
    for (int i = 0; i < 3; ++i)
      if (!exprEq(x.grid[i], y.grid[i]) || !exprEq(x.block[i], y.block[i]))
        return false;
    for (size_t i = 0; i < x.args.size(); ++i)
      if (!exprEq(x.args[i], y.args[i]))
        return false;
    return true;
  }
  if (a.is<CallStmt>()) {
    const auto &x = a.as<CallStmt>();
    const auto &y = b.as<CallStmt>();
    if (x.callee != y.callee || x.args.size() != y.args.size())
      return false;
    for (size_t i = 0; i < x.args.size(); ++i)
      if (!exprEq(x.args[i], y.args[i]))
        return false;
    return true;
  }
  if (a.is<ReturnStmt>())
    return exprEq(a.as<ReturnStmt>().value, b.as<ReturnStmt>().value);
  return false;
}

template <class Decl> bool declEq(const Decl &a, const Decl &b) {
  if (a.name != b.name || a.params.size() != b.params.size())
    return false;
  for (size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].name != b.params[i].name ||
        a.params[i].type != b.params[i].type)
      return false;
  return bodyEq(a.body, b.body);
}

} // namespace

bool structurallyEqual(const Expr &a, const Expr &b) { return exprEq(a, b); }

bool structurallyEqual(const Program &a, const Program &b) {
  if (a.kernels.size() != b.kernels.size() ||
      a.hostFunctions.size() != b.hostFunctions.size())
    return false;
  for (size_t i = 0; i < a.kernels.size(); ++i)
    if (!declEq(a.kernels[i], b.kernels[i]))
      return false;
  for (size_t i = 0; i < a.hostFunctions.size(); ++i)
    if (!declEq(a.hostFunctions[i], b.hostFunctions[i]))
      return false;
  return true;
}

} // namespace hgrd
