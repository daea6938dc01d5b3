#include "hgrd/sync.hpp"

#include <cassert>
#include <functional>
#include <map>
#include <sstream>

namespace hgrd {

const char *racyReasonName(RacyReason r) {
  switch (r) {
  case RacyReason::None:
    return "unsynchronized";
  case RacyReason::NoSync:
    return "no-sync";
  case RacyReason::AddressMismatchPossible:
    return "lock-address-mismatch";
  case RacyReason::InsufficientScope:
    return "insufficient-scope";
  }
  return "?";
}

namespace {

bool scopeAtLeast(Scope s, Scope required) {
  return static_cast<int>(s) >= static_cast<int>(required);
}

Scope narrower(Scope a, Scope b) {
  return static_cast<int>(a) <= static_cast<int>(b) ? a : b;
}

const Access *accessForStmt(const std::vector<Access> &accesses,
                            const Stmt *stmt) {
  for (const auto &a : accesses)
    if (a.stmt == stmt && isAtomicAccess(a.kind))
      return &a;
  return nullptr;
}

int linearIndexOf(const CFG &cfg, const Stmt *stmt) {
  for (size_t i = 0; i < cfg.linear.size(); ++i)
    if (cfg.linear[i].first == stmt)
      return static_cast<int>(i);
  return -1;
}

// Canonical text for an atomic's lock index with straight-line locals
// inlined; two sync operations match when their canonical forms agree.
class CanonicalIndex {
public:
  explicit CanonicalIndex(const KernelDecl &kernel) {
    walkBody(kernel.body);
  }

  std::string forStmt(const Stmt *stmt) const {
    auto it = byStmt_.find(stmt);
    return it == byStmt_.end() ? std::string("?") : it->second;
  }

private:
  std::string convert(const Expr &expr) {
    if (expr.is<IntLit>())
      return std::to_string(expr.as<IntLit>().value);
    if (expr.is<VarRef>()) {
      const auto &name = expr.as<VarRef>().name;
      auto it = locals_.find(name);
      if (it != locals_.end())
        return it->second;
      return name; // parameter or unresolved local
    }
    if (expr.is<BuiltinRef>()) {
      const auto &b = expr.as<BuiltinRef>();
      std::ostringstream os;
      os << static_cast<int>(b.builtin) << "." << static_cast<int>(b.axis);
      return "bi" + os.str();
    }
    if (expr.is<ArrayLoad>()) {
      const auto &l = expr.as<ArrayLoad>();
      return "mem(" + l.array + "," + convert(*l.index) + ")@" +
             std::to_string(expr.nodeId);
    }
    const auto &b = expr.as<BinaryExpr>();
    return std::string("(") + convert(*b.lhs) + binOpSpelling(b.op) +
           convert(*b.rhs) + ")";
  }

  void walkBody(const StmtList &stmts) {
    for (const auto &stmt : stmts)
      walkStmt(*stmt);
  }

  void walkStmt(const Stmt &stmt) {
    if (stmt.is<AtomicStmt>()) {
      byStmt_[&stmt] = stmt.as<AtomicStmt>().array + "[" +
                       convert(*stmt.as<AtomicStmt>().index) + "]";
      return;
    }
    if (stmt.is<AssignStmt>()) {
      const auto &a = stmt.as<AssignStmt>();
      if (a.value)
        locals_[a.name] = convert(*a.value);
      else
        locals_[a.name] = a.name + "@" + std::to_string(stmt.nodeId);
      return;
    }
    if (stmt.is<IfStmt>()) {
      const auto &s = stmt.as<IfStmt>();
      auto saved = locals_;
      walkBody(s.thenBody);
      auto thenLocals = std::move(locals_);
      locals_ = saved;
      walkBody(s.elseBody);
      for (const auto &[name, value] : thenLocals) {
        auto it = locals_.find(name);
        if (it == locals_.end() || it->second != value)
          locals_[name] = name + "@join" + std::to_string(stmt.nodeId);
      }
      return;
    }
    if (stmt.is<ForStmt>()) {
      const auto &s = stmt.as<ForStmt>();
      locals_[s.iter] = s.iter + "@loop" + std::to_string(stmt.nodeId);
      for (const auto &name : assignedNames(s.body))
        if (name != s.iter)
          locals_[name] = name + "@loop" + std::to_string(stmt.nodeId);
      walkBody(s.body);
      for (const auto &name : assignedNames(s.body))
        locals_[name] = name + "@after" + std::to_string(stmt.nodeId);
      return;
    }
  }

  std::map<std::string, std::string> locals_;
  std::map<const Stmt *, std::string> byStmt_;
};

} // namespace

std::optional<SyncAccess> getAcquire(const Access &access, Scope required,
                                     const CFG &cfg, const DomInfo &dom,
                                     const std::vector<Access> &accesses) {
  int start = linearIndexOf(cfg, access.stmt);
  if (start < 0)
    return std::nullopt;
  const Stmt *fence = nullptr;
  Scope fenceScope = Scope::Device;
  for (int i = start - 1; i >= 0; --i) {
    const auto &[stmt, ref] = cfg.linear[i];
    if (!dominates(cfg, dom, ref, access.pos))
      continue;
    if (!fence && stmt->is<FenceStmt>() &&
        scopeAtLeast(stmt->as<FenceStmt>().scope, required)) {
      fence = stmt;
      fenceScope = stmt->as<FenceStmt>().scope;
      continue;
    }
    if (fence && stmt->is<AtomicStmt>() &&
        stmt->as<AtomicStmt>().op == AtomicKind::Cas &&
        scopeAtLeast(stmt->as<AtomicStmt>().scope, required)) {
      SyncAccess sync;
      sync.role = SyncRole::Acquire;
      sync.atomic = accessForStmt(accesses, stmt);
      sync.fence = fence;
      sync.scope = narrower(stmt->as<AtomicStmt>().scope, fenceScope);
      sync.lockIndexExpr = stmt->as<AtomicStmt>().index.get();
      if (sync.atomic)
        return sync;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<SyncAccess> getRelease(const Access &access, Scope required,
                                     const CFG &cfg, const DomInfo &dom,
                                     const std::vector<Access> &accesses) {
  int start = linearIndexOf(cfg, access.stmt);
  if (start < 0)
    return std::nullopt;
  const Stmt *fence = nullptr;
  Scope fenceScope = Scope::Device;
  for (size_t i = start + 1; i < cfg.linear.size(); ++i) {
    const auto &[stmt, ref] = cfg.linear[i];
    if (!postdominates(cfg, dom, ref, access.pos))
      continue;
    if (!fence && stmt->is<FenceStmt>() &&
        scopeAtLeast(stmt->as<FenceStmt>().scope, required)) {
      fence = stmt;
      fenceScope = stmt->as<FenceStmt>().scope;
      continue;
    }
    if (fence && stmt->is<AtomicStmt>() &&
        stmt->as<AtomicStmt>().op == AtomicKind::Exch &&
        scopeAtLeast(stmt->as<AtomicStmt>().scope, required)) {
      SyncAccess sync;
      sync.role = SyncRole::Release;
      sync.atomic = accessForStmt(accesses, stmt);
      sync.fence = fence;
      sync.scope = narrower(stmt->as<AtomicStmt>().scope, fenceScope);
      sync.lockIndexExpr = stmt->as<AtomicStmt>().index.get();
      if (sync.atomic)
        return sync;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<SyncAccess> syn(const Access &access, Scope required,
                              const KernelDecl &kernel, const CFG &cfg,
                              const DomInfo &dom,
                              const std::vector<Access> &accesses) {
  auto acquire = getAcquire(access, required, cfg, dom, accesses);
  auto release = getRelease(access, required, cfg, dom, accesses);
  assert(!acquire || scopeAtLeast(acquire->scope, required));
  assert(!release || scopeAtLeast(release->scope, required));
  if (acquire && release) {
    CanonicalIndex canon(kernel);
    if (canon.forStmt(acquire->atomic->stmt) ==
        canon.forStmt(release->atomic->stmt))
      return acquire; // lock: acquire and release on the same address
  }
  if (isWriteAccess(access.kind) && release)
    return release; // producer side
  if (!isWriteAccess(access.kind) && acquire)
    return acquire; // consumer side
  return std::nullopt;
}

GuardVerdict checkGuarded(const AccessPair &pair, RaceKind kind,
                          SolverContext &ctx,
                          const std::vector<Constraint> &system,
                          const Model &baseModel, const GuardQuery &query) {
  Scope required =
      kind == RaceKind::InterBlock ? Scope::Device : Scope::Block;
  auto s1 = syn(*pair.first, required, query.kernel, query.cfg, query.dom,
                query.accesses);
  auto s2 = syn(*pair.second, required, query.kernel, query.cfg, query.dom,
                query.accesses);
  GuardVerdict verdict;
  if (!s1 || !s2) {
    verdict.status = GuardStatus::Racy;
    verdict.witness = baseModel;
    verdict.reason = RacyReason::NoSync;
    if (required == Scope::Device) {
      // A guard that exists at block scope failed only the scope test.
      bool blockGuard1 =
          s1 || syn(*pair.first, Scope::Block, query.kernel, query.cfg,
                    query.dom, query.accesses)
                    .has_value();
      bool blockGuard2 =
          s2 || syn(*pair.second, Scope::Block, query.kernel, query.cfg,
                    query.dom, query.accesses)
                    .has_value();
      if (blockGuard1 && blockGuard2)
        verdict.reason = RacyReason::InsufficientScope;
    }
    return verdict;
  }
  if (s1->atomic->array != s2->atomic->array) {
    // Different lock arrays never alias.
    verdict.status = GuardStatus::Racy;
    verdict.reason = RacyReason::AddressMismatchPossible;
    verdict.witness = baseModel;
    return verdict;
  }
  auto [lock1, path1] = symbolicAddress(*s1->atomic, 1, ctx, query.kernel);
  auto [lock2, path2] = symbolicAddress(*s2->atomic, 2, ctx, query.kernel);
  std::vector<Constraint> extended = system;
  extended.push_back(
      makeConstraint(std::move(lock1), Rel::Ne, std::move(lock2),
                     "sync-addr-mismatch"));
  SolveResult res = solve(extended, ctx.vars, ctx.opts.budget);
  verdict.solverUsed = true;
  if (res.status == SolveStatus::Unknown) {
    verdict.status = GuardStatus::Undecided;
    return verdict;
  }
  if (res.status == SolveStatus::Sat) {
    verdict.status = GuardStatus::Racy;
    verdict.reason = RacyReason::AddressMismatchPossible;
    verdict.witness = res.model;
    return verdict;
  }
  verdict.status = GuardStatus::Guarded;
  return verdict;
}

} // namespace hgrd
