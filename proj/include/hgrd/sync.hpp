// Scoped acquire-release reasoning for conflicting access pairs: lock and
// producer-consumer recognition plus the solver-backed address-match check.
#pragma once

#include "hgrd/access.hpp"
#include "hgrd/constraints.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hgrd {

enum class SyncRole { Acquire, Release };

struct SyncAccess {
  SyncRole role = SyncRole::Acquire;
  const Access *atomic = nullptr; // the CAS (acquire) or Exch (release)
  const Stmt *fence = nullptr;
  Scope scope = Scope::Device; // narrower of the atomic's and fence's scopes
  const Expr *lockIndexExpr = nullptr;
};

// Back-trace: a fence then an atomicCAS before it, both with scope at least
// `required` and both dominating the access.
std::optional<SyncAccess> getAcquire(const Access &access, Scope required,
                                     const CFG &cfg, const DomInfo &dom,
                                     const std::vector<Access> &accesses);

// Forward-trace dual: a fence then an atomicExch, both post-dominating.
std::optional<SyncAccess> getRelease(const Access &access, Scope required,
                                     const CFG &cfg, const DomInfo &dom,
                                     const std::vector<Access> &accesses);

// Lock case first (matching acquire and release), then producer-consumer.
std::optional<SyncAccess> syn(const Access &access, Scope required,
                              const KernelDecl &kernel, const CFG &cfg,
                              const DomInfo &dom,
                              const std::vector<Access> &accesses);

enum class GuardStatus { Guarded, Racy, Undecided };
enum class RacyReason { None, NoSync, AddressMismatchPossible,
                        InsufficientScope };

struct GuardVerdict {
  GuardStatus status = GuardStatus::Racy;
  RacyReason reason = RacyReason::None;
  Model witness;        // satisfying model when Racy
  bool solverUsed = false;
};

const char *racyReasonName(RacyReason r);

struct GuardQuery {
  const KernelDecl &kernel;
  const CFG &cfg;
  const DomInfo &dom;
  const std::vector<Access> &accesses;
};

// Pre: the pair's kind constraints were satisfiable with model `baseModel`
// under `system`. Decides whether acquire-release synchronization prevents
// the race.
GuardVerdict checkGuarded(const AccessPair &pair, RaceKind kind,
                          SolverContext &ctx,
                          const std::vector<Constraint> &system,
                          const Model &baseModel, const GuardQuery &query);

} // namespace hgrd
