// Acceptance suite: runs every release gate and prints one line per
// criterion. Exits non-zero if any gate fails.
#include "hgrd/corpus.hpp"
#include "hgrd/oracle.hpp"
#include "hgrd/parser.hpp"
#include "hgrd/report.hpp"

#include "support.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace hgrd;
using namespace hgrd::testsupport;

namespace {

int failures = 0;

struct Gate {
  std::string name;
  std::chrono::steady_clock::time_point start;
  bool ok = true;
  std::vector<std::string> problems;

  explicit Gate(std::string n)
      : name(std::move(n)), start(std::chrono::steady_clock::now()) {}

  void require(bool cond, const std::string &what) {
    if (!cond) {
      ok = false;
      problems.push_back(what);
    }
  }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }

  void finish(double budgetSeconds) {
    double t = seconds();
    if (t > budgetSeconds) {
      ok = false;
      problems.push_back("exceeded time budget of " +
                         std::to_string(budgetSeconds) + " s");
    }
    std::printf("[%s] %s (%.2f s)\n", ok ? "PASS" : "FAIL", name.c_str(), t);
    for (const auto &p : problems)
      std::printf("        - %s\n", p.c_str());
    if (!ok)
      ++failures;
  }
};

std::string corpusDir;

std::string path(const std::string &name) { return corpusDir + "/" + name; }

std::string slurp(const std::string &p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

using PairKey = std::tuple<int, int, int>; // kind, lineA, lineB

std::set<PairKey> entryKeys(const RaceReport &report) {
  std::set<PairKey> keys;
  for (const auto &r : report.races)
    keys.insert({static_cast<int>(r.kind), r.locA.line, r.locB.line});
  return keys;
}

std::string keyText(const PairKey &k) {
  std::ostringstream os;
  os << raceKindName(static_cast<RaceKind>(std::get<0>(k))) << " "
     << std::get<1>(k) << "<->" << std::get<2>(k);
  return os.str();
}

void criterion1() {
  Gate gate("criterion 1: host-fact ablation on the five host-fact classes");
  struct Expect {
    const char *file;
    int lineA, lineB;
  };
  const Expect cases[] = {
      {"copy_upp_low.mcu", 5, 5}, // assert
      {"reduction.mcu", 9, 9},    // grid dimension
      {"tone_mapping.mcu", 4, 4}, // parameter relation
      {"lud.mcu", 5, 5},          // loop bounds
      {"pitch_linear.mcu", 4, 4}, // allocation size
  };
  for (const auto &c : cases) {
    auto programStart = std::chrono::steady_clock::now();
    AnalyzeOptions with;
    RaceReport on = analyzeFile(path(c.file), with);
    gate.require(!on.hadErrors, std::string(c.file) + ": analysis error");
    gate.require(on.races.empty(),
                 std::string(c.file) + ": expected no races with host facts");
    AnalyzeOptions without;
    without.hostAnalysis = false;
    RaceReport off = analyzeFile(path(c.file), without);
    gate.require(!off.races.empty(),
                 std::string(c.file) + ": expected races without host facts");
    bool onPair = false;
    for (const auto &r : off.races)
      onPair = onPair ||
               (r.locA.line == c.lineA && r.locB.line == c.lineB &&
                r.status == RaceStatus::Race);
    gate.require(onPair, std::string(c.file) + ": missing race on lines " +
                             std::to_string(c.lineA) + "/" +
                             std::to_string(c.lineB));
    double t = std::chrono::duration<double>(
                   std::chrono::steady_clock::now() - programStart)
                   .count();
    gate.require(t < 60.0, std::string(c.file) + ": over 60 s");
  }
  gate.finish(310.0);
}

void criterion2() {
  Gate gate("criterion 2: racey-corpus counts match the published column");
  struct Expect {
    const char *file;
    int races;
  };
  const Expect cases[] = {
      {"path_compression.mcu", 2}, {"cond_neighbor.mcu", 2},
      {"push_node.mcu", 2},        {"conel.mcu", 2},
      {"warp_communicate.mcu", 2}, {"tissue.mcu", 4},
      {"conv1d.mcu", 1},
  };
  int total = 0;
  for (const auto &c : cases) {
    AnalyzeOptions opts;
    RaceReport report = analyzeFile(path(c.file), opts);
    int pairs = static_cast<int>(report.distinctRacyPairs());
    total += pairs;
    gate.require(pairs == c.races,
                 std::string(c.file) + ": " + std::to_string(pairs) +
                     " racy pairs, expected " + std::to_string(c.races));
    gate.require(!report.hasUndecided(),
                 std::string(c.file) + ": undecided results");
  }
  gate.require(total == 15, "total " + std::to_string(total) + " != 15");
  AnalyzeOptions opts;
  RaceReport warp = analyzeFile(path("warp_communicate.mcu"), opts);
  bool intraWarp = false;
  for (const auto &r : warp.races)
    intraWarp = intraWarp || r.kind == RaceKind::IntraWarp;
  gate.require(intraWarp, "warpCommunicate lacks an intra-warp race");
  gate.finish(120.0);
}

void criterion3() {
  Gate gate("criterion 3: zero false positives and zero false negatives");
  AnalyzeOptions opts;
  CorpusRunResult result = runCorpus(corpusDir, opts, /*withOracle=*/false);
  for (const auto &row : result.rows) {
    gate.require(row.falseNegatives == 0,
                 row.name + ": " + std::to_string(row.falseNegatives) +
                     " false negatives");
    gate.require(row.falsePositives == 0,
                 row.name + ": " + std::to_string(row.falsePositives) +
                     " false positives");
    gate.require(row.pass, row.name + ": manifest mismatch");
    for (const auto &f : row.failures)
      gate.problems.push_back("  " + row.name + ": " + f);
  }
  gate.finish(120.0);
}

void criterion4() {
  Gate gate("criterion 4: oracle soundness sweep");
  SweepCaps caps; // <= 2x2x1 blocks, <= 4x1x1 threads, ws {2,4}, standard inputs
  int oracleRaces = 0;
  for (const auto &entry : loadCorpus(corpusDir)) {
    ParseResult parsed =
        parseTranslationUnit(slurp(entry.sourcePath), entry.sourcePath);
    if (!parsed.ok()) {
      gate.require(false, entry.name + ": parse failed");
      continue;
    }
    std::vector<SweepRace> sweep = enumerateVerdict(*parsed.program, caps);
    std::map<long long, std::set<PairKey>> staticByWs;
    for (const auto &race : sweep) {
      ++oracleRaces;
      auto it = staticByWs.find(race.warpSize);
      if (it == staticByWs.end()) {
        AnalyzeOptions opts;
        opts.warpSize = race.warpSize;
        it = staticByWs
                 .emplace(race.warpSize,
                          entryKeys(analyzeFile(entry.sourcePath, opts)))
                 .first;
      }
      PairKey key{static_cast<int>(race.kind), race.locA.line,
                  race.locB.line};
      gate.require(it->second.count(key) > 0,
                   entry.name + ": oracle race " + keyText(key) +
                       " at warp size " + std::to_string(race.warpSize) +
                       " not statically reported");
    }
  }
  gate.require(oracleRaces > 0, "the sweep observed no races at all");
  gate.finish(300.0);
}

void criterion5() {
  Gate gate("criterion 5: solver status equals exhaustive enumeration");
  std::mt19937 rng(1234);
  for (int seed = 0; seed < 200; ++seed) {
    RandomSystem sys = makeRandomSystem(rng);
    SolveResult r = solve(sys.constraints, sys.vars);
    bool expected = bruteForceSat(sys.constraints, sys.vars);
    gate.require(r.status != SolveStatus::Unknown,
                 "seed " + std::to_string(seed) + ": budget exhausted");
    gate.require((r.status == SolveStatus::Sat) == expected,
                 "seed " + std::to_string(seed) + ": status mismatch");
    if (r.status == SolveStatus::Sat)
      gate.require(verifyModel(sys.constraints, r.model),
                   "seed " + std::to_string(seed) + ": bad model");
  }
  gate.finish(30.0);
}

void criterion6() {
  Gate gate("criterion 6: dominance equals the path-enumeration oracle");
  std::mt19937 rng(20260808);
  for (int seed = 0; seed < 100; ++seed) {
    ParseResult parsed =
        parseTranslationUnit(randomKernelSource(rng, 3), "random.mcu");
    if (!parsed.ok()) {
      gate.require(false, "seed " + std::to_string(seed) + ": parse failed");
      continue;
    }
    CFG cfg = buildCfg(parsed.program->kernels[0]);
    gate.require(cfg.blocks.size() <= 12,
                 "seed " + std::to_string(seed) + ": CFG too large");
    DomInfo dom = computeDominance(cfg);
    for (size_t a = 0; a < cfg.blocks.size(); ++a)
      for (size_t b = 0; b < cfg.blocks.size(); ++b) {
        int ia = static_cast<int>(a), ib = static_cast<int>(b);
        gate.require(dom.blockDominates(ia, ib) ==
                         oracleDominates(cfg, ia, ib),
                     "seed " + std::to_string(seed) + ": dominance mismatch");
        gate.require(dom.blockPostDominates(ia, ib) ==
                         oraclePostdominates(cfg, ia, ib),
                     "seed " + std::to_string(seed) +
                         ": post-dominance mismatch");
      }
  }
  gate.finish(10.0);
}

std::string widenScopes(std::string src) {
  auto replaceAll = [&](const std::string &from, const std::string &to) {
    size_t at = 0;
    while ((at = src.find(from, at)) != std::string::npos) {
      src.replace(at, from.size(), to);
      at += to.size();
    }
  };
  replaceAll("atomicCAS_block", "atomicCAS");
  replaceAll("atomicExch_block", "atomicExch");
  replaceAll("atomicAdd_block", "atomicAdd");
  replaceAll("__threadfence_block", "__threadfence");
  return src;
}

void criterion7() {
  Gate gate("criterion 7: monotonicity of host facts and sync scopes");
  for (const auto &f : std::filesystem::directory_iterator(corpusDir)) {
    if (f.path().extension() != ".mcu")
      continue;
    std::string name = f.path().filename().string();
    AnalyzeOptions with;
    RaceReport hostOn = analyzeFile(f.path().string(), with);
    AnalyzeOptions without;
    without.hostAnalysis = false;
    RaceReport hostOff = analyzeFile(f.path().string(), without);
    std::set<PairKey> onKeys = entryKeys(hostOn);
    std::set<PairKey> offKeys = entryKeys(hostOff);
    for (const auto &k : onKeys)
      gate.require(offKeys.count(k) > 0,
                   name + ": host analysis introduced " + keyText(k));

    std::string widened = widenScopes(slurp(f.path().string()));
    ParseResult parsed = parseTranslationUnit(widened, name);
    if (!parsed.ok()) {
      gate.require(false, name + ": widened source does not parse");
      continue;
    }
    RaceReport wide = analyzeProgram(*parsed.program, with);
    for (const auto &k : entryKeys(wide))
      gate.require(onKeys.count(k) > 0,
                   name + ": widening scopes introduced " + keyText(k));
  }
  gate.finish(120.0);
}

void criterion8() {
  Gate gate("criterion 8: byte-identical reports across runs");
  for (const auto &f : std::filesystem::directory_iterator(corpusDir)) {
    if (f.path().extension() != ".mcu")
      continue;
    AnalyzeOptions opts;
    std::string a = render(analyzeFile(f.path().string(), opts),
                           ReportFormat::Json);
    std::string b = render(analyzeFile(f.path().string(), opts),
                           ReportFormat::Json);
    gate.require(a == b,
                 f.path().filename().string() + ": output not reproducible");
  }
  gate.finish(120.0);
}

} // namespace

int main(int argc, char **argv) {
  if (argc < 2) {
    std::cerr << "usage: hgrd_acceptance <corpus-dir>\n";
    return 2;
  }
  corpusDir = argv[1];
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}
