// AST for MiniCU, a small CUDA-like dialect: one translation unit holds
// host functions, kernel functions, and kernel launch sites.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace hgrd {

struct SourceLoc {
  std::string file;
  int line = 0;
  int column = 0;
};

inline bool operator==(const SourceLoc &a, const SourceLoc &b) {
  return a.file == b.file && a.line == b.line && a.column == b.column;
}
inline bool operator<(const SourceLoc &a, const SourceLoc &b) {
  if (a.file != b.file)
    return a.file < b.file;
  if (a.line != b.line)
    return a.line < b.line;
  return a.column < b.column;
}

enum class BinOp {
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,
  Or,
};

enum class BuiltinVar { ThreadIdx, BlockIdx, BlockDim, GridDim };
enum class Axis { X = 0, Y = 1, Z = 2 };

// Synchronization scope. Block < Device; system scope is out of the dialect.
enum class Scope { None, Block, Device };

enum class AtomicKind { Cas, Exch, Add };
enum class BarrierKind { SyncThreads, SyncWarp };
enum class AllocKind { Malloc, MallocPitch };

enum class ParamType { Int, FloatArray, IntArray, LockArray };

inline bool isArrayType(ParamType t) { return t != ParamType::Int; }

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
  long long value = 0;
};
struct VarRef {
  std::string name;
};
struct BuiltinRef {
  BuiltinVar builtin{};
  Axis axis{};
};
struct BinaryExpr {
  BinOp op{};
  ExprPtr lhs, rhs;
};
struct ArrayLoad {
  std::string array;
  ExprPtr index;
};
struct InputExpr {}; // __input(): unknown user input

struct Expr {
  SourceLoc loc;
  int nodeId = 0;
  std::variant<IntLit, VarRef, BuiltinRef, BinaryExpr, ArrayLoad, InputExpr>
      node;

  template <class T> bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T> const T &as() const { return std::get<T>(node); }
  template <class T> T &as() { return std::get<T>(node); }
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using StmtList = std::vector<StmtPtr>;

struct AssignStmt {
  std::string name;
  ExprPtr value; // null for a plain declaration like `float *A;`
  bool isDecl = false;
  ParamType declType = ParamType::Int;
};
struct ArrayStoreStmt {
  std::string array;
  ExprPtr index;
  ExprPtr value;
};
struct IfStmt {
  ExprPtr cond;
  StmtList thenBody;
  StmtList elseBody;
};
// Canonical counted loop: for (i = init; i </<= bound; i = i + step).
struct ForStmt {
  std::string iter;
  bool declaresIter = false;
  ExprPtr init;
  ExprPtr bound;
  bool inclusiveBound = false;
  long long step = 1;
  StmtList body;
};
struct BarrierStmt {
  BarrierKind kind{};
};
struct FenceStmt {
  Scope scope = Scope::Device;
};
struct AtomicStmt {
  AtomicKind op{};
  Scope scope = Scope::Device;
  std::string array;
  ExprPtr index;
  ExprPtr compare; // CAS only
  ExprPtr value;
};
struct AssertStmt {
  ExprPtr cond;
};
struct AllocStmt {
  AllocKind kind{};
  std::string array;
  std::string pitchVar; // mallocPitch out-parameter
  ExprPtr width;        // malloc: element count
  ExprPtr height;       // mallocPitch only
};
struct LaunchStmt {
  std::string kernel;
  std::array<ExprPtr, 3> grid;
  std::array<ExprPtr, 3> block;
  std::vector<ExprPtr> args;
};
struct CallStmt {
  std::string callee;
  std::vector<ExprPtr> args;
};
struct ReturnStmt {
  ExprPtr value; // may be null
};

struct Stmt {
  SourceLoc loc;
  int nodeId = 0;
  std::variant<AssignStmt, ArrayStoreStmt, IfStmt, ForStmt, BarrierStmt,
               FenceStmt, AtomicStmt, AssertStmt, AllocStmt, LaunchStmt,
               CallStmt, ReturnStmt>
      node;

  template <class T> bool is() const {
    return std::holds_alternative<T>(node);
  }
  template <class T> const T &as() const { return std::get<T>(node); }
  template <class T> T &as() { return std::get<T>(node); }
};

struct Param {
  std::string name;
  ParamType type = ParamType::Int;
  SourceLoc loc;
};

struct KernelDecl {
  std::string name;
  std::vector<Param> params;
  StmtList body;
  SourceLoc loc;
};

struct FunctionDecl {
  std::string name;
  std::vector<Param> params;
  StmtList body;
  SourceLoc loc;
};

struct Program {
  std::vector<FunctionDecl> hostFunctions;
  std::vector<KernelDecl> kernels;
  std::string entry = "main";
  std::string fileName;

  const KernelDecl *findKernel(const std::string &name) const;
  const FunctionDecl *findHost(const std::string &name) const;
  const FunctionDecl *entryFunction() const { return findHost(entry); }
};

struct LaunchSite {
  const FunctionDecl *hostFunction = nullptr;
  const Stmt *launch = nullptr; // holds a LaunchStmt
  const KernelDecl *kernel = nullptr;
};

// One entry per syntactic launch, in host program order.
std::vector<LaunchSite> listLaunchSites(const Program &program);

const char *binOpSpelling(BinOp op);
const char *scopeName(Scope s);

std::string prettyPrint(const Program &program);
std::string prettyPrint(const Expr &expr);

// Structural equality: node kinds, operators, literal values, builtin axes,
// names. Source locations and node ids are ignored.
bool structurallyEqual(const Expr &a, const Expr &b);
bool structurallyEqual(const Program &a, const Program &b);

} // namespace hgrd
