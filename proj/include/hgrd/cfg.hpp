// Per-kernel control-flow graph over straight-line blocks, plus dominator
// and post-dominator relations at statement granularity.
#pragma once

#include "hgrd/ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace hgrd {

// Position of a statement inside a CFG: (block id, index within block).
struct StmtRef {
  int block = -1;
  int index = -1;

  bool valid() const { return block >= 0; }
};

inline bool operator==(const StmtRef &a, const StmtRef &b) {
  return a.block == b.block && a.index == b.index;
}

struct BasicBlock {
  int id = 0;
  // Leaf statements in order. If and For statements appear as the last
  // entry of their block and stand for the condition evaluation.
  std::vector<const Stmt *> stmts;
  std::vector<int> succs;
  std::vector<int> preds;
};

struct CFG {
  std::vector<BasicBlock> blocks;
  int entry = 0;
  int exitBlock = 0; // unique synthetic exit
  // Leaf statements of the kernel in program order, with their positions.
  std::vector<std::pair<const Stmt *, StmtRef>> linear;
  std::map<const Stmt *, StmtRef> position;

  StmtRef positionOf(const Stmt *stmt) const;
};

CFG buildCfg(const KernelDecl &kernel);

struct DomInfo {
  // dom[b] / pdom[b]: bitsets over block ids.
  std::vector<std::vector<bool>> dom;
  std::vector<std::vector<bool>> pdom;
  std::vector<int> idom;  // -1 for entry
  std::vector<int> ipdom; // -1 for exit

  bool blockDominates(int a, int b) const { return dom[b][a]; }
  bool blockPostDominates(int a, int b) const { return pdom[b][a]; }
};

DomInfo computeDominance(const CFG &cfg);

// Statement-granularity dominance: block dominance plus intra-block index
// comparison. Both are reflexive.
bool dominates(const CFG &cfg, const DomInfo &dom, StmtRef a, StmtRef b);
bool postdominates(const CFG &cfg, const DomInfo &dom, StmtRef a, StmtRef b);

std::string dumpDot(const CFG &cfg, const std::string &kernelName);

} // namespace hgrd
