#include "hgrd/access.hpp"

#include <functional>
#include <set>

namespace hgrd {

const char *raceKindName(RaceKind k) {
  switch (k) {
  case RaceKind::InterBlock:
    return "INTER-BLOCK";
  case RaceKind::IntraBlock:
    return "INTRA-BLOCK";
  case RaceKind::IntraWarp:
    return "INTRA-WARP";
  }
  return "?";
}

size_t KindSet::size() const {
  size_t n = 0;
  for (int i = 0; i < 3; ++i)
    if (bits & (1u << i))
      ++n;
  return n;
}

std::vector<RaceKind> KindSet::list() const {
  std::vector<RaceKind> kinds;
  for (RaceKind k :
       {RaceKind::InterBlock, RaceKind::IntraBlock, RaceKind::IntraWarp})
    if (has(k))
      kinds.push_back(k);
  return kinds;
}

namespace {

bool isArrayParam(const KernelDecl &kernel, const std::string &name) {
  for (const auto &p : kernel.params)
    if (p.name == name)
      return isArrayType(p.type);
  return false;
}

struct Collector {
  const KernelDecl &kernel;
  const CFG &cfg;
  std::vector<Access> out;

  void loadsIn(const Expr &expr, const Stmt *stmt) {
    if (expr.is<BinaryExpr>()) {
      loadsIn(*expr.as<BinaryExpr>().lhs, stmt);
      loadsIn(*expr.as<BinaryExpr>().rhs, stmt);
      return;
    }
    if (expr.is<ArrayLoad>()) {
      const auto &l = expr.as<ArrayLoad>();
      loadsIn(*l.index, stmt); // index loads are evaluated first
      if (isArrayParam(kernel, l.array)) {
        Access a;
        a.id = static_cast<int>(out.size());
        a.kind = AccessKind::Load;
        a.array = l.array;
        a.indexExpr = l.index.get();
        a.scope = Scope::None;
        a.loc = expr.loc;
        a.stmt = stmt;
        a.pos = cfg.positionOf(stmt);
        out.push_back(a);
      }
    }
  }

  void visit(const Stmt *stmt) {
    if (stmt->is<ArrayStoreStmt>()) {
      const auto &s = stmt->as<ArrayStoreStmt>();
      loadsIn(*s.index, stmt);
      loadsIn(*s.value, stmt);
      if (isArrayParam(kernel, s.array)) {
        Access a;
        a.id = static_cast<int>(out.size());
        a.kind = AccessKind::Store;
        a.array = s.array;
        a.indexExpr = s.index.get();
        a.scope = Scope::None;
        a.loc = stmt->loc;
        a.stmt = stmt;
        a.pos = cfg.positionOf(stmt);
        out.push_back(a);
      }
      return;
    }
    if (stmt->is<AtomicStmt>()) {
      const auto &s = stmt->as<AtomicStmt>();
      loadsIn(*s.index, stmt);
      if (s.compare)
        loadsIn(*s.compare, stmt);
      loadsIn(*s.value, stmt);
      if (isArrayParam(kernel, s.array)) {
        Access a;
        a.id = static_cast<int>(out.size());
        a.kind = s.op == AtomicKind::Cas    ? AccessKind::AtomicCas
                 : s.op == AtomicKind::Exch ? AccessKind::AtomicExch
                                            : AccessKind::AtomicAdd;
        a.array = s.array;
        a.indexExpr = s.index.get();
        a.scope = s.scope;
        a.loc = stmt->loc;
        a.stmt = stmt;
        a.pos = cfg.positionOf(stmt);
        out.push_back(a);
      }
      return;
    }
    if (stmt->is<AssignStmt>()) {
      if (stmt->as<AssignStmt>().value)
        loadsIn(*stmt->as<AssignStmt>().value, stmt);
      return;
    }
    if (stmt->is<IfStmt>()) {
      loadsIn(*stmt->as<IfStmt>().cond, stmt);
      return;
    }
    if (stmt->is<ForStmt>()) {
      const auto &s = stmt->as<ForStmt>();
      loadsIn(*s.init, stmt);
      loadsIn(*s.bound, stmt);
      return;
    }
    if (stmt->is<ReturnStmt>()) {
      if (stmt->as<ReturnStmt>().value)
        loadsIn(*stmt->as<ReturnStmt>().value, stmt);
      return;
    }
  }
};

} // namespace

std::vector<Access> collectAccesses(const KernelDecl &kernel, const CFG &cfg) {
  Collector collector{kernel, cfg, {}};
  // cfg.linear holds leaf statements (and If/For condition markers) in
  // program order.
  for (const auto &[stmt, ref] : cfg.linear)
    collector.visit(stmt);
  return collector.out;
}

std::vector<AccessPair>
generateAccessPairs(const std::vector<Access> &accesses) {
  std::vector<AccessPair> pairs;
  for (size_t i = 0; i < accesses.size(); ++i) {
    for (size_t j = i; j < accesses.size(); ++j) {
      const Access &a = accesses[i];
      const Access &b = accesses[j];
      if (a.array != b.array)
        continue;
      if (a.kind == AccessKind::Load && b.kind == AccessKind::Load)
        continue; // trivially race-free
      if (isAtomicAccess(a.kind) && isAtomicAccess(b.kind) &&
          a.scope == Scope::Device && b.scope == Scope::Device)
        continue; // trivially race-free at device scope
      AccessPair pair;
      pair.first = &a;
      pair.second = &b;
      pairs.push_back(pair);
    }
  }
  return pairs;
}

KindSet preliminaryCheck(const AccessPair &pair, const CFG &cfg,
                         const DomInfo &dom) {
  KindSet kinds = KindSet::all();

  if (isAtomicAccess(pair.first->kind) && isAtomicAccess(pair.second->kind)) {
    if (pair.first->scope == Scope::Device &&
        pair.second->scope == Scope::Device)
      return KindSet::none();
    // Both atomics are at least block scoped, so same-block conflicts are
    // ordered; only the inter-threadblock check remains.
    kinds.remove(RaceKind::IntraBlock);
    kinds.remove(RaceKind::IntraWarp);
  }

  // A barrier separates the pair when it post-dominates the first access and
  // dominates the second. For a self-pair no single statement can do both.
  for (const auto &[stmt, ref] : cfg.linear) {
    if (!stmt->is<BarrierStmt>())
      continue;
    if (!postdominates(cfg, dom, ref, pair.first->pos) ||
        !dominates(cfg, dom, ref, pair.second->pos))
      continue;
    if (stmt->as<BarrierStmt>().kind == BarrierKind::SyncThreads) {
      kinds.remove(RaceKind::IntraBlock);
      kinds.remove(RaceKind::IntraWarp);
    } else {
      kinds.remove(RaceKind::IntraWarp);
    }
  }
  return kinds;
}

} // namespace hgrd
