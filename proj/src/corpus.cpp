#include "hgrd/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace hgrd {

namespace {

RaceKind parseKind(const std::string &word) {
  if (word == "INTER-BLOCK")
    return RaceKind::InterBlock;
  if (word == "INTRA-BLOCK")
    return RaceKind::IntraBlock;
  if (word == "INTRA-WARP")
    return RaceKind::IntraWarp;
  throw std::runtime_error("manifest: unknown race kind '" + word + "'");
}

std::vector<long long> parseNumbers(const std::string &text) {
  std::vector<long long> out;
  std::istringstream is(text);
  long long v;
  while (is >> v)
    out.push_back(v);
  return out;
}

std::string trim(const std::string &s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

} // namespace

CorpusEntry parseManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open manifest " + path);
  CorpusEntry entry;
  std::string dir = std::filesystem::path(path).parent_path().string();
  std::string line;
  while (std::getline(in, line)) {
    std::string text = trim(line);
    if (text.empty() || text[0] == '#')
      continue;
    size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("manifest: expected 'key = value': " + text);
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key == "name") {
      entry.name = value;
    } else if (key == "source") {
      entry.sourcePath = dir.empty() ? value : dir + "/" + value;
    } else if (key == "provenance") {
      entry.provenance = value;
    } else if (key == "races_with_host") {
      entry.racesWithHost = std::stoi(value);
    } else if (key == "races_without_host") {
      entry.racesWithoutHost = std::stoi(value);
    } else if (key == "race" || key == "require_without") {
      std::istringstream is(value);
      std::string kindWord;
      ExpectedRace r;
      is >> kindWord >> r.lineA >> r.lineB;
      if (!is)
        throw std::runtime_error("manifest: bad race line: " + value);
      r.kind = parseKind(kindWord);
      if (key == "race")
        entry.entriesWithHost.push_back(r);
      else
        entry.requiredWithout.push_back(r);
    } else if (key == "oracle") {
      entry.oracle = value == "racy"    ? CorpusEntry::OracleMode::Racy
                     : value == "clean" ? CorpusEntry::OracleMode::Clean
                                        : CorpusEntry::OracleMode::Skip;
    } else if (key == "oracle_grid_cap") {
      auto v = parseNumbers(value);
      for (size_t i = 0; i < 3 && i < v.size(); ++i)
        entry.caps.gridCap[i] = v[i];
    } else if (key == "oracle_block_cap") {
      auto v = parseNumbers(value);
      for (size_t i = 0; i < 3 && i < v.size(); ++i)
        entry.caps.blockCap[i] = v[i];
    } else if (key == "oracle_inputs") {
      entry.caps.inputSet = parseNumbers(value);
    } else if (key == "oracle_warp_sizes") {
      entry.caps.warpSizes = parseNumbers(value);
    } else if (key == "oracle_max_threads") {
      entry.caps.maxThreads = std::stoll(value);
    } else {
      throw std::runtime_error("manifest: unknown key '" + key + "'");
    }
  }
  if (entry.name.empty() || entry.sourcePath.empty())
    throw std::runtime_error("manifest missing name/source: " + path);
  return entry;
}

std::vector<CorpusEntry> loadCorpus(const std::string &directory) {
  std::vector<std::string> paths;
  for (const auto &file : std::filesystem::directory_iterator(directory))
    if (file.path().extension() == ".manifest")
      paths.push_back(file.path().string());
  std::sort(paths.begin(), paths.end());
  std::vector<CorpusEntry> entries;
  for (const auto &p : paths)
    entries.push_back(parseManifest(p));
  return entries;
}

namespace {

using PairKey = std::tuple<int, int, int>; // kind, lineA, lineB

std::set<PairKey> entryKeys(const RaceReport &report) {
  std::set<PairKey> keys;
  for (const auto &r : report.races)
    keys.insert({static_cast<int>(r.kind), r.locA.line, r.locB.line});
  return keys;
}

std::set<PairKey> expectedKeys(const std::vector<ExpectedRace> &expected) {
  std::set<PairKey> keys;
  for (const auto &r : expected)
    keys.insert({static_cast<int>(r.kind), r.lineA, r.lineB});
  return keys;
}

std::string keyText(const PairKey &key) {
  std::ostringstream os;
  os << raceKindName(static_cast<RaceKind>(std::get<0>(key))) << " "
     << std::get<1>(key) << "<->" << std::get<2>(key);
  return os.str();
}

} // namespace

CorpusRunResult runCorpus(const std::string &directory,
                          const AnalyzeOptions &base, bool withOracle) {
  CorpusRunResult result;
  for (const auto &entry : loadCorpus(directory)) {
    CorpusOutcome outcome;
    outcome.name = entry.name;
    auto failed = [&](const std::string &why) {
      outcome.pass = false;
      outcome.failures.push_back(why);
    };

    AnalyzeOptions withHost = base;
    withHost.hostAnalysis = true;
    RaceReport hostReport = analyzeFile(entry.sourcePath, withHost);
    if (hostReport.hadErrors) {
      failed("analysis error with host analysis");
      for (const auto &d : hostReport.diagnostics)
        outcome.failures.push_back("  " + d.str());
      result.rows.push_back(outcome);
      result.allPass = false;
      continue;
    }
    outcome.withHost = static_cast<int>(hostReport.distinctRacyPairs());
    if (hostReport.hasUndecided())
      failed("undecided results with host analysis");
    if (outcome.withHost != entry.racesWithHost)
      failed("with-host pair count " + std::to_string(outcome.withHost) +
             " != expected " + std::to_string(entry.racesWithHost));
    std::set<PairKey> got = entryKeys(hostReport);
    std::set<PairKey> want = expectedKeys(entry.entriesWithHost);
    for (const auto &k : want)
      if (!got.count(k)) {
        ++outcome.falseNegatives;
        failed("missing expected race " + keyText(k));
      }
    for (const auto &k : got)
      if (!want.count(k)) {
        ++outcome.falsePositives;
        failed("unexpected race " + keyText(k));
      }

    AnalyzeOptions noHost = base;
    noHost.hostAnalysis = false;
    RaceReport bareReport = analyzeFile(entry.sourcePath, noHost);
    outcome.withoutHost = static_cast<int>(bareReport.distinctRacyPairs());
    if (outcome.withoutHost != entry.racesWithoutHost)
      failed("without-host pair count " + std::to_string(outcome.withoutHost) +
             " != expected " + std::to_string(entry.racesWithoutHost));
    std::set<PairKey> bare = entryKeys(bareReport);
    for (const auto &k : expectedKeys(entry.requiredWithout))
      if (!bare.count(k))
        failed("without-host run missing required race " + keyText(k));
    // Host facts only remove behaviors: the with-host race set must be a
    // subset of the without-host set.
    for (const auto &k : got)
      if (!bare.count(k))
        failed("host analysis introduced race " + keyText(k));

    if (withOracle && entry.oracle != CorpusEntry::OracleMode::Skip) {
      std::ifstream in(entry.sourcePath);
      std::ostringstream buf;
      buf << in.rdbuf();
      ParseResult parsed = parseTranslationUnit(buf.str(), entry.sourcePath);
      if (!parsed.ok()) {
        failed("oracle: parse failed");
      } else {
        std::vector<SweepRace> sweep =
            enumerateVerdict(*parsed.program, entry.caps);
        if (entry.oracle == CorpusEntry::OracleMode::Clean && !sweep.empty())
          failed("oracle observed a race in a clean-manifest program");
        if (entry.oracle == CorpusEntry::OracleMode::Racy && sweep.empty())
          failed("oracle saw no race in a racy-manifest program");
        // Soundness: every oracle race maps to a static race of the same
        // kind and line pair at the matching warp size.
        std::map<long long, std::set<PairKey>> staticByWs;
        for (const auto &race : sweep) {
          auto it = staticByWs.find(race.warpSize);
          if (it == staticByWs.end()) {
            AnalyzeOptions wsOpts = base;
            wsOpts.hostAnalysis = true;
            wsOpts.warpSize = race.warpSize;
            it = staticByWs
                     .emplace(race.warpSize,
                              entryKeys(analyzeFile(entry.sourcePath, wsOpts)))
                     .first;
          }
          PairKey key{static_cast<int>(race.kind), race.locA.line,
                      race.locB.line};
          if (!it->second.count(key))
            failed("oracle race not statically reported: " + keyText(key) +
                   " at warp size " + std::to_string(race.warpSize));
        }
      }
    }

    if (!outcome.pass)
      result.allPass = false;
    result.rows.push_back(outcome);
  }
  return result;
}

std::string CorpusRunResult::summaryTable() const {
  std::ostringstream os;
  os << std::left << std::setw(28) << "Program" << std::setw(18)
     << "Races [FN:FP]" << std::setw(12) << "No-host" << "Status\n";
  for (const auto &row : rows) {
    std::ostringstream cell;
    cell << row.withHost << " [" << row.falseNegatives << ":"
         << row.falsePositives << "]";
    os << std::left << std::setw(28) << row.name << std::setw(18)
       << cell.str() << std::setw(12) << row.withoutHost
       << (row.pass ? "ok" : "FAIL") << "\n";
    for (const auto &f : row.failures)
      os << "    - " << f << "\n";
  }
  return os.str();
}

} // namespace hgrd
