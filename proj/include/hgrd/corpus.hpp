// Corpus runner: loads per-program manifests, runs the analyzer with and
// without host analysis, cross-checks the concrete oracle, and prints a
// summary table.
#pragma once

#include "hgrd/oracle.hpp"
#include "hgrd/report.hpp"

#include <string>
#include <vector>

namespace hgrd {

struct ExpectedRace {
  RaceKind kind = RaceKind::InterBlock;
  int lineA = 0;
  int lineB = 0;
};

struct CorpusEntry {
  std::string name;
  std::string sourcePath; // resolved against the manifest directory
  std::string provenance; // figure-derived | table-derived
  int racesWithHost = 0;  // distinct racy pairs expected with host analysis
  std::vector<ExpectedRace> entriesWithHost; // exact (kind, lineA, lineB) set
  int racesWithoutHost = 0;
  std::vector<ExpectedRace> requiredWithout; // must appear without host facts
  enum class OracleMode { Racy, Clean, Skip } oracle = OracleMode::Skip;
  SweepCaps caps;
};

CorpusEntry parseManifest(const std::string &path);
std::vector<CorpusEntry> loadCorpus(const std::string &directory);

struct CorpusOutcome {
  std::string name;
  bool pass = true;
  int withHost = 0;    // distinct racy pairs observed
  int withoutHost = 0;
  int falseNegatives = 0;
  int falsePositives = 0;
  std::vector<std::string> failures;
};

struct CorpusRunResult {
  std::vector<CorpusOutcome> rows;
  bool allPass = true;

  std::string summaryTable() const;
};

CorpusRunResult runCorpus(const std::string &directory,
                          const AnalyzeOptions &base, bool withOracle = true);

} // namespace hgrd
