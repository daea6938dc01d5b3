// Full-pipeline driver: per launch site, preliminary checks, constraint
// generation, solving, and guard analysis, aggregated into a race report.
#pragma once

#include "hgrd/ast.hpp"
#include "hgrd/constraints.hpp"
#include "hgrd/parser.hpp"
#include "hgrd/sync.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hgrd {

struct AnalyzeOptions : AnalyzerOptions {
  bool dumpCfg = false;
  bool dumpPairs = false;
  bool dumpHostFacts = false;
  bool dumpConstraintSystems = false;
  std::ostream *dumpStream = nullptr;
};

enum class RaceStatus { Race, Undecided };

struct RaceEntry {
  RaceKind kind = RaceKind::InterBlock;
  SourceLoc locA, locB; // locA <= locB
  std::string array;
  RaceStatus status = RaceStatus::Race;
  std::string reason; // unsynchronized / no-sync / lock-address-mismatch /
                      // insufficient-scope / solver-budget
  std::map<std::string, long long> witness;
};

struct ReportStats {
  long long pairsExamined = 0;
  long long pairsFiltered = 0; // dropped by preliminary checks
  long long solverCalls = 0;
  long long undecided = 0;
  long long wallMillis = 0;
};

struct RaceReport {
  std::string program;
  std::vector<RaceEntry> races; // sorted by (locA, locB, kind)
  ReportStats stats;
  bool hadErrors = false;
  std::vector<Diagnostic> diagnostics;

  // Distinct (locA, locB, array) pairs with at least one race entry; the
  // count used for summary tables.
  size_t distinctRacyPairs() const;
  bool hasUndecided() const;
};

RaceReport analyzeProgram(const Program &program, const AnalyzeOptions &opts);
RaceReport analyzeFile(const std::string &path, const AnalyzeOptions &opts);

enum class ReportFormat { Text, Json };

std::string render(const RaceReport &report, ReportFormat format);

// 0 = no races, 1 = races or undecided results, 2 = analysis error.
int reportExitCode(const RaceReport &report);

} // namespace hgrd
