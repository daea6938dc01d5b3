// Global-memory access enumeration, access-pair generation, and the
// preliminary checks that decide which race kinds remain possible.
#pragma once

#include "hgrd/ast.hpp"
#include "hgrd/cfg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hgrd {

enum class RaceKind { InterBlock = 0, IntraBlock = 1, IntraWarp = 2 };

const char *raceKindName(RaceKind k);

// Small set over the three race kinds.
struct KindSet {
  uint8_t bits = 0;

  static KindSet all() { return KindSet{0b111}; }
  static KindSet none() { return KindSet{0}; }
  bool has(RaceKind k) const { return bits & (1u << static_cast<int>(k)); }
  void add(RaceKind k) { bits |= (1u << static_cast<int>(k)); }
  void remove(RaceKind k) { bits &= ~(1u << static_cast<int>(k)); }
  bool empty() const { return bits == 0; }
  size_t size() const;
  bool isSubsetOf(KindSet other) const { return (bits & ~other.bits) == 0; }
  std::vector<RaceKind> list() const;
};

inline bool operator==(KindSet a, KindSet b) { return a.bits == b.bits; }

enum class AccessKind { Load, Store, AtomicCas, AtomicExch, AtomicAdd };

inline bool isAtomicAccess(AccessKind k) {
  return k == AccessKind::AtomicCas || k == AccessKind::AtomicExch ||
         k == AccessKind::AtomicAdd;
}
inline bool isWriteAccess(AccessKind k) { return k != AccessKind::Load; }

// One static global-memory instruction on an array parameter.
struct Access {
  int id = 0;
  AccessKind kind = AccessKind::Load;
  std::string array;
  const Expr *indexExpr = nullptr;
  Scope scope = Scope::None; // None for plain loads/stores
  SourceLoc loc;
  StmtRef pos;                // position of the enclosing statement in the CFG
  const Stmt *stmt = nullptr; // enclosing statement
};

// Two accesses on the same array; second does not precede first in program
// order. A self-pair (first == second) models two threads executing the
// same static instruction.
struct AccessPair {
  const Access *first = nullptr;
  const Access *second = nullptr;
  KindSet candidateKinds = KindSet::all();

  bool isSelfPair() const { return first->id == second->id; }
};

// Every static ArrayLoad / ArrayStore / atomic on an array parameter, in
// program order. Accesses to local scalars are not memory accesses.
std::vector<Access> collectAccesses(const KernelDecl &kernel, const CFG &cfg);

// All unordered same-array pairs, including self-pairs. Load/load pairs and
// pairs of device-scoped atomics can never race and are not generated.
std::vector<AccessPair> generateAccessPairs(const std::vector<Access> &accesses);

// Barrier-separation and scoped-atomic checks; returns the remaining kinds.
KindSet preliminaryCheck(const AccessPair &pair, const CFG &cfg,
                         const DomInfo &dom);

} // namespace hgrd
