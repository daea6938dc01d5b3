// Finite-domain integer constraint solver: complete depth-first search with
// interval propagation over bounded variable domains.
#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgrd {

using VarId = int;

struct Interval {
  long long lo = 0;
  long long hi = 0;

  bool empty() const { return lo > hi; }
  bool singleton() const { return lo == hi; }
  long long width() const { return hi - lo + 1; }
  bool contains(long long v) const { return lo <= v && v <= hi; }
};

struct SymExpr;
using SymExprPtr = std::shared_ptr<const SymExpr>;

// Integer terms over solver variables. Division and modulo are by positive
// constants only and use C truncation semantics.
struct SymExpr {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Mod };
  Kind kind = Kind::Const;
  long long value = 0; // Const value, or the divisor for Div/Mod
  VarId var = -1;
  SymExprPtr lhs, rhs;
};

SymExprPtr seConst(long long value);
SymExprPtr seVar(VarId var);
SymExprPtr seAdd(SymExprPtr a, SymExprPtr b);
SymExprPtr seSub(SymExprPtr a, SymExprPtr b);
SymExprPtr seMul(SymExprPtr a, SymExprPtr b);
SymExprPtr seDiv(SymExprPtr a, long long divisor);
SymExprPtr seMod(SymExprPtr a, long long divisor);

bool symExprEqual(const SymExpr &a, const SymExpr &b);

enum class Rel { Eq, Ne, Lt, Le, Gt, Ge };

struct Constraint {
  SymExprPtr lhs;
  Rel rel = Rel::Eq;
  SymExprPtr rhs;
  std::string tag; // short origin label, used by --dump-constraints
};

inline Constraint makeConstraint(SymExprPtr lhs, Rel rel, SymExprPtr rhs,
                                 std::string tag = {}) {
  return Constraint{std::move(lhs), rel, std::move(rhs), std::move(tag)};
}

struct VarDecl {
  std::string name;
  Interval domain;
};

struct SolverBudget {
  long long maxNodes = 200000;
  long long maxMillis = 10000;
};

enum class SolveStatus { Sat, Unsat, Unknown };

using Model = std::map<VarId, long long>;

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  Model model; // total assignment when Sat
  long long nodes = 0;
};

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Complete within the given domains: Sat iff a satisfying assignment exists;
// Unknown only on budget exhaustion. Throws SolverError on malformed input
// (unknown variable, empty domain).
SolveResult solve(const std::vector<Constraint> &constraints,
                  const std::vector<VarDecl> &vars,
                  const SolverBudget &budget = {});

long long evalSymExpr(const SymExpr &expr, const Model &model);
bool satisfies(const Constraint &constraint, const Model &model);

// Certificate check: true iff direct evaluation satisfies every constraint.
bool verifyModel(const std::vector<Constraint> &constraints,
                 const Model &model);

std::string symExprText(const SymExpr &expr, const std::vector<VarDecl> &vars);
std::string dumpConstraints(const std::vector<Constraint> &constraints,
                            const std::vector<VarDecl> &vars);

} // namespace hgrd
