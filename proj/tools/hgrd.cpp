// hgrd: host-guided static race detection for MiniCU programs, with a
// concrete-execution oracle and a corpus runner.
#include "hgrd/corpus.hpp"
#include "hgrd/oracle.hpp"
#include "hgrd/report.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

hgrd::ParseResult parseFileOrExit(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(2);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  hgrd::ParseResult parsed = hgrd::parseTranslationUnit(buf.str(), path);
  if (!parsed.ok()) {
    for (const auto &d : parsed.diagnostics)
      std::cerr << d.str() << "\n";
    std::exit(2);
  }
  return parsed;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"hgrd - host-guided GPU race detector for MiniCU"};
  app.require_subcommand(1);

  // --- analyze -------------------------------------------------------------
  auto *analyze = app.add_subcommand("analyze", "statically detect races");
  std::string analyzeFilePath;
  std::string format = "text";
  hgrd::AnalyzeOptions opts;
  bool noHostAnalysis = false;
  analyze->add_option("file", analyzeFilePath, "MiniCU source file (.mcu)")
      ->required();
  analyze->add_option("--format", format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  analyze->add_flag("--no-host-analysis", noHostAnalysis,
                    "drop host-derived constraints");
  analyze->add_option("--warp-size", opts.warpSize, "threads per warp");
  analyze->add_option("--domain-bound", opts.domainBound,
                      "half-width of unknown input domains");
  analyze->add_option("--max-grid", opts.maxGrid,
                      "default per-axis grid dimension bound");
  analyze->add_option("--max-block", opts.maxBlock,
                      "default per-axis block dimension bound");
  analyze->add_option("--solver-budget", opts.budget.maxNodes,
                      "search node budget per pair and kind");
  analyze->add_flag("--dump-cfg", opts.dumpCfg, "dump kernel CFGs as DOT");
  analyze->add_flag("--dump-pairs", opts.dumpPairs,
                    "dump surviving access pairs");
  analyze->add_flag("--dump-host-facts", opts.dumpHostFacts,
                    "dump harvested host facts");
  analyze->add_flag("--dump-constraints", opts.dumpConstraintSystems,
                    "dump constraint systems");

  // --- oracle --------------------------------------------------------------
  auto *oracle = app.add_subcommand(
      "oracle", "concretely execute over small configurations");
  std::string oracleFilePath;
  long long maxThreads = 64;
  std::vector<long long> warpSizes{2, 4};
  std::vector<long long> inputSet{0, 1, 2, 3, 127};
  std::vector<long long> gridCap{2, 2, 1};
  std::vector<long long> blockCap{4, 1, 1};
  oracle->add_option("file", oracleFilePath, "MiniCU source file (.mcu)")
      ->required();
  oracle->add_option("--max-threads", maxThreads,
                     "total thread cap per launch");
  oracle->add_option("--warp-size", warpSizes, "warp sizes to enumerate");
  oracle->add_option("--input-set", inputSet,
                     "values each __input() ranges over");
  oracle->add_option("--grid-cap", gridCap, "per-axis grid bound (3 values)");
  oracle->add_option("--block-cap", blockCap,
                     "per-axis block bound (3 values)");

  // --- corpus --------------------------------------------------------------
  auto *corpus = app.add_subcommand(
      "corpus", "run the bundled corpus against its manifests");
  std::string corpusDir;
  bool skipOracle = false;
  corpus->add_option("dir", corpusDir, "directory with .mcu + .manifest")
      ->required();
  corpus->add_flag("--no-oracle", skipOracle,
                   "skip the concrete oracle cross-check");

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) {
    opts.hostAnalysis = !noHostAnalysis;
    opts.dumpStream = &std::cerr;
    hgrd::RaceReport report = hgrd::analyzeFile(analyzeFilePath, opts);
    if (report.hadErrors) {
      for (const auto &d : report.diagnostics)
        std::cerr << d.str() << "\n";
      return 2;
    }
    std::cout << hgrd::render(report, format == "json"
                                          ? hgrd::ReportFormat::Json
                                          : hgrd::ReportFormat::Text);
    return hgrd::reportExitCode(report);
  }

  if (oracle->parsed()) {
    hgrd::ParseResult parsed = parseFileOrExit(oracleFilePath);
    hgrd::SweepCaps caps;
    for (size_t i = 0; i < 3 && i < gridCap.size(); ++i)
      caps.gridCap[i] = gridCap[i];
    for (size_t i = 0; i < 3 && i < blockCap.size(); ++i)
      caps.blockCap[i] = blockCap[i];
    caps.inputSet = inputSet;
    caps.warpSizes = warpSizes;
    caps.maxThreads = maxThreads;
    std::vector<hgrd::SweepRace> races =
        hgrd::enumerateVerdict(*parsed.program, caps);
    nlohmann::ordered_json j;
    j["program"] = oracleFilePath;
    j["races"] = nlohmann::ordered_json::array();
    for (const auto &r : races) {
      nlohmann::ordered_json e;
      e["kind"] = hgrd::raceKindName(r.kind);
      e["locA"] = {{"file", r.locA.file}, {"line", r.locA.line}};
      e["locB"] = {{"file", r.locB.file}, {"line", r.locB.line}};
      e["warpSize"] = r.warpSize;
      j["races"].push_back(e);
    }
    std::cout << j.dump(2) << "\n";
    return races.empty() ? 0 : 1;
  }

  hgrd::AnalyzeOptions base;
  hgrd::CorpusRunResult result =
      hgrd::runCorpus(corpusDir, base, !skipOracle);
  std::cout << result.summaryTable();
  return result.allPass ? 0 : 1;
}
