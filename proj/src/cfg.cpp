#include "hgrd/cfg.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hgrd {

StmtRef CFG::positionOf(const Stmt *stmt) const {
  auto it = position.find(stmt);
  return it == position.end() ? StmtRef{} : it->second;
}

namespace {

class Builder {
public:
  explicit Builder(CFG &cfg) : cfg_(cfg) {}

  int newBlock() {
    int id = static_cast<int>(cfg_.blocks.size());
    cfg_.blocks.push_back(BasicBlock{id, {}, {}, {}});
    return id;
  }

  void edge(int from, int to) {
    cfg_.blocks[from].succs.push_back(to);
    cfg_.blocks[to].preds.push_back(from);
  }

  void append(int block, const Stmt *stmt) {
    StmtRef ref{block, static_cast<int>(cfg_.blocks[block].stmts.size())};
    cfg_.blocks[block].stmts.push_back(stmt);
    cfg_.linear.emplace_back(stmt, ref);
    cfg_.position[stmt] = ref;
  }

  // Builds the sequence into `cur`; returns the block where control ends,
  // or -1 if the sequence always returns.
  int buildSeq(const StmtList &stmts, int cur) {
    for (const auto &stmt : stmts) {
      if (cur < 0)
        break; // unreachable tail; the frontend already diagnosed it
      if (stmt->is<IfStmt>()) {
        const auto &s = stmt->as<IfStmt>();
        append(cur, stmt.get());
        int thenB = newBlock();
        edge(cur, thenB);
        int thenEnd = buildSeq(s.thenBody, thenB);
        if (s.elseBody.empty()) {
          int join = newBlock();
          edge(cur, join);
          if (thenEnd >= 0)
            edge(thenEnd, join);
          cur = join;
        } else {
          int elseB = newBlock();
          edge(cur, elseB);
          int elseEnd = buildSeq(s.elseBody, elseB);
          if (thenEnd < 0 && elseEnd < 0) {
            cur = -1;
          } else {
            int join = newBlock();
            if (thenEnd >= 0)
              edge(thenEnd, join);
            if (elseEnd >= 0)
              edge(elseEnd, join);
            cur = join;
          }
        }
      } else if (stmt->is<ForStmt>()) {
        // preheader (cur) -> header -> {body -> header, exit}
        int header = newBlock();
        edge(cur, header);
        append(header, stmt.get());
        int body = newBlock();
        edge(header, body);
        int bodyEnd = buildSeq(stmt->as<ForStmt>().body, body);
        if (bodyEnd >= 0)
          edge(bodyEnd, header);
        int exitB = newBlock();
        edge(header, exitB);
        cur = exitB;
      } else if (stmt->is<ReturnStmt>()) {
        append(cur, stmt.get());
        returns_.push_back(cur);
        cur = -1;
      } else {
        append(cur, stmt.get());
      }
    }
    return cur;
  }

  std::vector<int> returns_;

private:
  CFG &cfg_;
};

std::vector<int> reversePostOrder(const CFG &cfg, bool backward) {
  std::vector<int> order;
  std::vector<bool> seen(cfg.blocks.size(), false);
  std::function<void(int)> dfs = [&](int b) {
    seen[b] = true;
    const auto &next =
        backward ? cfg.blocks[b].preds : cfg.blocks[b].succs;
    for (int s : next)
      if (!seen[s])
        dfs(s);
    order.push_back(b);
  };
  dfs(backward ? cfg.exitBlock : cfg.entry);
  std::reverse(order.begin(), order.end());
  return order;
}

// Iterative all-dominators dataflow: dom[b] = {b} ∪ ∩ dom[p] over preds.
std::vector<std::vector<bool>> allDominators(const CFG &cfg, bool backward) {
  size_t n = cfg.blocks.size();
  int root = backward ? cfg.exitBlock : cfg.entry;
  std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
  dom[root].assign(n, false);
  dom[root][root] = true;
  std::vector<int> order = reversePostOrder(cfg, backward);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b : order) {
      if (b == root)
        continue;
      const auto &preds = backward ? cfg.blocks[b].succs : cfg.blocks[b].preds;
      std::vector<bool> next(n, !preds.empty());
      for (int p : preds)
        for (size_t i = 0; i < n; ++i)
          next[i] = next[i] && dom[p][i];
      next[b] = true;
      if (next != dom[b]) {
        dom[b] = std::move(next);
        changed = true;
      }
    }
  }
  return dom;
}

std::vector<int> immediateFrom(const std::vector<std::vector<bool>> &dom,
                               int root) {
  size_t n = dom.size();
  std::vector<int> idom(n, -1);
  for (size_t b = 0; b < n; ++b) {
    if (static_cast<int>(b) == root)
      continue;
    // idom(b): the strict dominator dominated by every other strict dominator.
    for (size_t c = 0; c < n; ++c) {
      if (c == b || !dom[b][c])
        continue;
      bool immediate = true;
      for (size_t d = 0; d < n; ++d) {
        if (d == b || d == c || !dom[b][d])
          continue;
        if (!dom[c][d]) { // some other strict dominator d not above c
          immediate = false;
          break;
        }
      }
      if (immediate) {
        idom[b] = static_cast<int>(c);
        break;
      }
    }
  }
  return idom;
}

} // namespace

CFG buildCfg(const KernelDecl &kernel) {
  CFG cfg;
  Builder builder(cfg);
  int entry = builder.newBlock();
  cfg.entry = entry;
  int end = builder.buildSeq(kernel.body, entry);
  int exitB = builder.newBlock();
  cfg.exitBlock = exitB;
  if (end >= 0)
    builder.edge(end, exitB);
  for (int r : builder.returns_)
    builder.edge(r, exitB);
  return cfg;
}

DomInfo computeDominance(const CFG &cfg) {
  DomInfo info;
  info.dom = allDominators(cfg, /*backward=*/false);
  info.pdom = allDominators(cfg, /*backward=*/true);
  info.idom = immediateFrom(info.dom, cfg.entry);
  info.ipdom = immediateFrom(info.pdom, cfg.exitBlock);
  return info;
}

bool dominates(const CFG &cfg, const DomInfo &dom, StmtRef a, StmtRef b) {
  (void)cfg;
  if (a.block == b.block)
    return a.index <= b.index;
  return dom.blockDominates(a.block, b.block);
}

bool postdominates(const CFG &cfg, const DomInfo &dom, StmtRef a, StmtRef b) {
  (void)cfg;
  if (a.block == b.block)
    return a.index >= b.index;
  return dom.blockPostDominates(a.block, b.block);
}

std::string dumpDot(const CFG &cfg, const std::string &kernelName) {
  std::ostringstream os;
  os << "digraph \"" << kernelName << "\" {\n";
  os << "  node [shape=box];\n";
  for (const auto &block : cfg.blocks) {
    os << "  b" << block.id << " [label=\"b" << block.id;
    if (block.id == cfg.entry)
      os << " (entry)";
    if (block.id == cfg.exitBlock)
      os << " (exit)";
    for (const Stmt *stmt : block.stmts) {
      os << "\\n";
      if (stmt->is<IfStmt>())
        os << "if " << prettyPrint(*stmt->as<IfStmt>().cond);
      else if (stmt->is<ForStmt>())
        os << "for " << stmt->as<ForStmt>().iter;
      else
        os << "line " << stmt->loc.line;
    }
    os << "\"];\n";
  }
  for (const auto &block : cfg.blocks)
    for (int s : block.succs)
      os << "  b" << block.id << " -> b" << s << ";\n";
  os << "}\n";
  return os.str();
}

} // namespace hgrd
