// Shared test oracles: exhaustive constraint enumeration, random structured
// kernels, and deletion-reachability dominance. Test-only code, independent
// of the implementation paths it checks.
#pragma once

#include "hgrd/cfg.hpp"
#include "hgrd/solver.hpp"

#include <functional>
#include <random>
#include <sstream>
#include <string>

namespace hgrd::testsupport {

// Exhaustive enumeration over the variable domains.
inline bool bruteForceSat(const std::vector<Constraint> &cs,
                          const std::vector<VarDecl> &vars,
                          Model *witness = nullptr) {
  Model model;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == vars.size()) {
      if (!verifyModel(cs, model))
        return false;
      if (witness)
        *witness = model;
      return true;
    }
    for (long long v = vars[i].domain.lo; v <= vars[i].domain.hi; ++v) {
      model[static_cast<VarId>(i)] = v;
      if (go(i + 1))
        return true;
    }
    return false;
  };
  return go(0);
}

struct RandomSystem {
  std::vector<VarDecl> vars;
  std::vector<Constraint> constraints;
};

inline RandomSystem makeRandomSystem(std::mt19937 &rng) {
  RandomSystem sys;
  std::uniform_int_distribution<int> varCount(1, 4);
  std::uniform_int_distribution<int> consCount(1, 6);
  std::uniform_int_distribution<long long> bound(-16, 15);
  int nv = varCount(rng);
  for (int i = 0; i < nv; ++i) {
    long long a = bound(rng), b = bound(rng);
    if (a > b)
      std::swap(a, b);
    if (b - a > 31)
      b = a + 31;
    sys.vars.push_back(VarDecl{"v" + std::to_string(i), {a, b}});
  }
  std::uniform_int_distribution<int> kind(0, 6);
  std::uniform_int_distribution<int> pick(0, nv - 1);
  std::uniform_int_distribution<long long> small(-8, 8);
  std::uniform_int_distribution<long long> divisor(1, 5);
  std::function<SymExprPtr(int)> expr = [&](int depth) -> SymExprPtr {
    int k = depth <= 0 ? (kind(rng) % 2) : kind(rng);
    switch (k) {
    case 0:
      return seConst(small(rng));
    case 1:
      return seVar(pick(rng));
    case 2:
      return seAdd(expr(depth - 1), expr(depth - 1));
    case 3:
      return seSub(expr(depth - 1), expr(depth - 1));
    case 4:
      return seMul(expr(depth - 1), expr(depth - 1));
    case 5:
      return seDiv(expr(depth - 1), divisor(rng));
    default:
      return seMod(expr(depth - 1), divisor(rng));
    }
  };
  std::uniform_int_distribution<int> relPick(0, 5);
  int nc = consCount(rng);
  for (int i = 0; i < nc; ++i) {
    Rel rel = static_cast<Rel>(relPick(rng));
    sys.constraints.push_back(makeConstraint(expr(2), rel, expr(2)));
  }
  return sys;
}

// Random structured kernel source; the branch budget keeps the CFG at or
// below twelve blocks.
inline std::string randomKernelSource(std::mt19937 &rng, int maxDepth) {
  std::ostringstream body;
  int stmts = 0;
  int controlBudget = 3;
  std::function<void(int, int)> gen = [&](int depth, int indent) {
    std::uniform_int_distribution<int> count(1, 3);
    int n = count(rng);
    for (int i = 0; i < n && stmts < 9; ++i) {
      std::string pad(indent * 2, ' ');
      std::uniform_int_distribution<int> kind(0, 5);
      int k = depth >= maxDepth || controlBudget == 0 ? 0 : kind(rng);
      ++stmts;
      if (k <= 2) {
        body << pad << "A[" << stmts << "] = " << stmts << ";\n";
      } else if (k == 3) {
        --controlBudget;
        body << pad << "if (n > " << stmts << ") {\n";
        gen(depth + 1, indent + 1);
        body << pad << "}\n";
      } else if (k == 4) {
        --controlBudget;
        body << pad << "if (n > " << stmts << ") {\n";
        gen(depth + 1, indent + 1);
        body << pad << "} else {\n";
        gen(depth + 1, indent + 1);
        body << pad << "}\n";
      } else {
        --controlBudget;
        body << pad << "for (int i" << stmts << " = 0; i" << stmts << " < 3; i"
             << stmts << " = i" << stmts << " + 1) {\n";
        gen(depth + 1, indent + 1);
        body << pad << "}\n";
      }
    }
  };
  gen(0, 1);
  return "__global__ void k(float *A, int n) {\n" + body.str() + "}\n" +
         "void main() { float *A; cudaMalloc(&A, 64); k<<<1,1>>>(A, 3); }\n";
}

// a dominates b iff removing a disconnects b from the entry; the dual holds
// for post-dominance with the exit.
inline bool reachAvoiding(const CFG &cfg, int from, int to, int removed,
                          bool backward) {
  if (from == removed)
    return from == to;
  std::vector<bool> seen(cfg.blocks.size(), false);
  std::function<bool(int)> dfs = [&](int b) -> bool {
    if (b == to)
      return true;
    seen[b] = true;
    const auto &next = backward ? cfg.blocks[b].preds : cfg.blocks[b].succs;
    for (int s : next)
      if (s != removed && !seen[s] && dfs(s))
        return true;
    return false;
  };
  return dfs(from);
}

inline bool oracleDominates(const CFG &cfg, int a, int b) {
  if (a == b)
    return true;
  return !reachAvoiding(cfg, cfg.entry, b, a, false);
}

inline bool oraclePostdominates(const CFG &cfg, int a, int b) {
  if (a == b)
    return true;
  return !reachAvoiding(cfg, cfg.exitBlock, b, a, true);
}

} // namespace hgrd::testsupport
