// Host-code analysis: a single symbolic walk of the entry function records,
// per kernel launch, expression trees for asserts, grid/block dimensions,
// kernel arguments, loop bounds, and allocation sizes.
#pragma once

#include "hgrd/ast.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgrd {

// Identity of one host-variable definition. `site` is the AST node id of the
// defining statement or expression; `aux` disambiguates synthetic rebindings
// (loop entry/exit, branch joins, call bindings). The name is informative
// only and does not participate in identity.
struct DefKey {
  int site = -1;
  int aux = 0;
  std::string name;

  bool operator<(const DefKey &other) const {
    return site != other.site ? site < other.site : aux < other.aux;
  }
  bool operator==(const DefKey &other) const {
    return site == other.site && aux == other.aux;
  }
};

struct ET;
using ETPtr = std::shared_ptr<const ET>;

// Expression tree over host values: binary tree whose leaves are constants
// and unknowns (user inputs), with a Bounds root for loop-iterator values.
struct ET {
  enum class Kind { Constant, Unknown, Binary, Bounds };
  Kind kind = Kind::Constant;
  long long value = 0; // Constant
  DefKey origin;       // Unknown; for Bounds, the iterator definition
  BinOp op{};          // Binary
  ETPtr lhs, rhs;      // Binary
  ETPtr minEt, maxEt;  // Bounds
  bool inclusiveMax = false;
  // Host-variable definitions this tree was built through. For a Bounds
  // root this is just the iterator; the bound subtrees keep their own.
  std::set<DefKey> originVars;
};

ETPtr etConstant(long long value);
ETPtr etUnknown(DefKey origin);
ETPtr etBinary(BinOp op, ETPtr lhs, ETPtr rhs);
ETPtr etBounds(DefKey iter, ETPtr minEt, ETPtr maxEt, bool inclusiveMax);

std::string etText(const ET &et);

struct HostBinding {
  DefKey def;
  ETPtr et;
};
using HostEnv = std::map<std::string, HostBinding>;

class AnalysisError : public std::runtime_error {
public:
  AnalysisError(SourceLoc loc, const std::string &message)
      : std::runtime_error(loc.file + ":" + std::to_string(loc.line) + ":" +
                           std::to_string(loc.column) + ": " + message),
        loc(std::move(loc)) {}
  SourceLoc loc;
};

// Recursive ET construction for a host expression under the current
// symbolic state. Throws AnalysisError for constructs outside the dialect.
ETPtr createEt(const Expr &expr, const HostEnv &env);

struct LaunchFacts {
  const Stmt *launchStmt = nullptr;
  const FunctionDecl *hostFunction = nullptr;
  std::string kernel;
  std::array<ETPtr, 3> gridDimETs;
  std::array<ETPtr, 3> blockDimETs;
  std::vector<ETPtr> argETs; // one per kernel parameter
  // Indices into HostFacts::asserts of the asserts encountered before this
  // launch on its path.
  std::vector<size_t> activeAsserts;
};

struct HostFacts {
  std::vector<ETPtr> asserts;
  std::vector<LaunchFacts> launches;
  std::set<DefKey> allocVars;
};

HostFacts analyzeHost(const Program &program);

// Names assigned anywhere in the statement list (including nested bodies).
// Loop-iterator declarations count as assignments of the iterator.
std::set<std::string> assignedNames(const StmtList &stmts);

// Evaluates an ET under concrete values for its unknown leaves. Returns
// nothing for Bounds roots; those are checked as ranges by the caller.
std::optional<long long> evalEt(const ET &et,
                                const std::map<DefKey, long long> &values);

std::string dumpHostFacts(const HostFacts &facts);

} // namespace hgrd
