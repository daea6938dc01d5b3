// Concrete interpreter for MiniCU programs over small grids and inputs.
// Detects manifested conflicts through happens-before built from barrier
// phases and matched acquire/release pairs; independent of the static path.
#pragma once

#include "hgrd/access.hpp"
#include "hgrd/ast.hpp"
#include "hgrd/host_facts.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace hgrd {

struct ExecConfig {
  std::array<long long, 3> gridCap{2, 2, 1};  // per-axis launch bounds
  std::array<long long, 3> blockCap{4, 1, 1};
  long long warpSize = 32;
  std::vector<long long> inputs; // consumed by __input() in order
  long long maxThreads = 64;     // per-launch total thread cap
  long long maxArrayElems = 1 << 20;
  long long maxSteps = 1 << 20; // interpreter step budget
};

struct ObservedRace {
  SourceLoc locA, locB; // locA <= locB
  RaceKind kind = RaceKind::InterBlock;
  std::string array;
  long long address = 0;
};

bool operator<(const ObservedRace &a, const ObservedRace &b);

// Per-launch record used to validate launch expression trees against the
// values the interpreter actually computed.
struct LaunchRecord {
  const Stmt *launchStmt = nullptr;
  std::array<long long, 3> grid{1, 1, 1};
  std::array<long long, 3> block{1, 1, 1};
  std::vector<long long> scalarArgs; // -1 placeholder for array arguments
  std::vector<bool> isScalar;
  std::map<DefKey, long long> defValues;
};

struct OracleResult {
  std::vector<ObservedRace> races; // deduped by (locA, locB, kind)
  std::vector<std::string> traps;
  int launchesRun = 0;
  int launchesSkipped = 0; // exceeded caps or non-positive dimensions
  bool assertStopped = false;
  bool indirectIndexing = false; // verdict carries a conservative note
  std::vector<LaunchRecord> launchRecords;
};

OracleResult runConcrete(const Program &program, const ExecConfig &config);

struct SweepCaps {
  std::array<long long, 3> gridCap{2, 2, 1};
  std::array<long long, 3> blockCap{4, 1, 1};
  std::vector<long long> inputSet{0, 1, 2, 3, 127};
  std::vector<long long> warpSizes{2, 4};
  long long maxThreads = 64;
  size_t maxConfigs = 100000;
};

struct SweepRace {
  SourceLoc locA, locB;
  RaceKind kind = RaceKind::InterBlock;
  long long warpSize = 0;
};

// Union of runConcrete over the enumerated configuration lattice.
std::vector<SweepRace> enumerateVerdict(const Program &program,
                                        const SweepCaps &caps);

// Number of __input() occurrences in host code.
int countInputs(const Program &program);

} // namespace hgrd
