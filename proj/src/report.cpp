#include "hgrd/report.hpp"

#include "hgrd/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hgrd {

size_t RaceReport::distinctRacyPairs() const {
  std::set<std::tuple<std::string, int, int, int, int, std::string>> pairs;
  for (const auto &r : races)
    pairs.insert({r.locA.file, r.locA.line, r.locA.column, r.locB.line,
                  r.locB.column, r.array});
  return pairs.size();
}

bool RaceReport::hasUndecided() const {
  return std::any_of(races.begin(), races.end(), [](const RaceEntry &r) {
    return r.status == RaceStatus::Undecided;
  });
}

namespace {

ETPtr freshUnknownEt(const Stmt *stmt, int aux, const std::string &name) {
  return etUnknown(DefKey{stmt->nodeId, aux, name});
}

// Launch sites never reached from the entry function are analyzed without
// host facts: every dimension and argument is an unknown.
LaunchFacts syntheticFacts(const LaunchSite &site) {
  LaunchFacts lf;
  lf.launchStmt = site.launch;
  lf.hostFunction = site.hostFunction;
  lf.kernel = site.launch->as<LaunchStmt>().kernel;
  for (int d = 0; d < 3; ++d) {
    lf.gridDimETs[d] = freshUnknownEt(site.launch, 20 + d, "grid");
    lf.blockDimETs[d] = freshUnknownEt(site.launch, 23 + d, "block");
  }
  const auto &args = site.launch->as<LaunchStmt>().args;
  for (size_t i = 0; i < args.size(); ++i)
    lf.argETs.push_back(
        freshUnknownEt(site.launch, 26 + static_cast<int>(i), "arg"));
  return lf;
}

std::map<std::string, long long> namedWitness(const Model &model,
                                              const SolverContext &ctx) {
  std::map<std::string, long long> named;
  for (const auto &[var, value] : model)
    named[ctx.vars[var].name] = value;
  return named;
}

struct EntryKey {
  int kind;
  std::string file;
  int lineA, colA, lineB, colB;
  std::string array;

  bool operator<(const EntryKey &other) const {
    return std::tie(file, lineA, colA, lineB, colB, kind, array) <
           std::tie(other.file, other.lineA, other.colA, other.lineB,
                    other.colB, other.kind, other.array);
  }
};

EntryKey keyOf(const RaceEntry &e) {
  return EntryKey{static_cast<int>(e.kind), e.locA.file, e.locA.line,
                  e.locA.column,            e.locB.line, e.locB.column,
                  e.array};
}

} // namespace

RaceReport analyzeProgram(const Program &program, const AnalyzeOptions &opts) {
  auto startedAt = std::chrono::steady_clock::now();
  RaceReport report;
  report.program = program.fileName;

  HostFacts facts;
  try {
    facts = analyzeHost(program);
  } catch (const AnalysisError &e) {
    report.hadErrors = true;
    report.diagnostics.push_back(
        Diagnostic{DiagKind::SyntaxError, e.loc, e.what()});
    return report;
  }

  if (opts.dumpHostFacts && opts.dumpStream)
    *opts.dumpStream << dumpHostFacts(facts);

  // Launch sites reached by the host walk carry their facts; syntactic
  // sites never reached are analyzed with defaults.
  std::vector<LaunchFacts> launches = facts.launches;
  std::set<const Stmt *> reached;
  for (const auto &lf : launches)
    reached.insert(lf.launchStmt);
  for (const auto &site : listLaunchSites(program))
    if (!reached.count(site.launch))
      launches.push_back(syntheticFacts(site));

  std::map<EntryKey, RaceEntry> entries;

  for (const auto &lf : launches) {
    const KernelDecl *kernel = program.findKernel(lf.kernel);
    if (!kernel)
      continue;
    CFG cfg = buildCfg(*kernel);
    DomInfo dom = computeDominance(cfg);
    if (opts.dumpCfg && opts.dumpStream)
      *opts.dumpStream << dumpDot(cfg, kernel->name);
    std::vector<Access> accesses = collectAccesses(*kernel, cfg);
    std::vector<AccessPair> pairs = generateAccessPairs(accesses);
    GuardQuery query{*kernel, cfg, dom, accesses};

    for (auto &pair : pairs) {
      ++report.stats.pairsExamined;
      pair.candidateKinds = preliminaryCheck(pair, cfg, dom);
      if (pair.candidateKinds.empty()) {
        ++report.stats.pairsFiltered;
        continue;
      }
      if (opts.dumpPairs && opts.dumpStream) {
        *opts.dumpStream << "pair " << pair.first->array << " line "
                         << pair.first->loc.line << " <-> line "
                         << pair.second->loc.line << " kinds:";
        for (RaceKind k : pair.candidateKinds.list())
          *opts.dumpStream << " " << raceKindName(k);
        *opts.dumpStream << "\n";
      }
      for (RaceKind kind : pair.candidateKinds.list()) {
        SolverContext ctx = makeContext(*kernel, opts);
        std::vector<Constraint> system = ctx.base;
        std::vector<Constraint> hostCons =
            emitHostConstraints(facts, lf, *kernel, ctx);
        system.insert(system.end(), hostCons.begin(), hostCons.end());
        auto [addr1, path1] = symbolicAddress(*pair.first, 1, ctx, *kernel);
        auto [addr2, path2] = symbolicAddress(*pair.second, 2, ctx, *kernel);
        system.insert(system.end(), path1.begin(), path1.end());
        system.insert(system.end(), path2.begin(), path2.end());
        std::vector<Constraint> identity =
            emitIdentityConstraints(pair, kind, ctx, addr1, addr2);
        system.insert(system.end(), identity.begin(), identity.end());

        if (opts.dumpConstraintSystems && opts.dumpStream) {
          *opts.dumpStream << ";; " << kernel->name << " line "
                           << pair.first->loc.line << " <-> line "
                           << pair.second->loc.line << " "
                           << raceKindName(kind) << "\n"
                           << dumpConstraints(system, ctx.vars);
        }

        ++report.stats.solverCalls;
        SolveResult res = solve(system, ctx.vars, opts.budget);
        if (res.status == SolveStatus::Unsat)
          continue;

        RaceEntry entry;
        entry.kind = kind;
        entry.locA = pair.first->loc;
        entry.locB = pair.second->loc;
        if (entry.locB < entry.locA)
          std::swap(entry.locA, entry.locB);
        entry.array = pair.first->array;

        if (res.status == SolveStatus::Unknown) {
          entry.status = RaceStatus::Undecided;
          entry.reason = "solver-budget";
          entries.emplace(keyOf(entry), entry);
          continue;
        }

        GuardVerdict verdict =
            checkGuarded(pair, kind, ctx, system, res.model, query);
        if (verdict.solverUsed)
          ++report.stats.solverCalls;
        if (verdict.status == GuardStatus::Guarded)
          continue;
        if (verdict.status == GuardStatus::Undecided) {
          entry.status = RaceStatus::Undecided;
          entry.reason = "solver-budget";
          entries.emplace(keyOf(entry), entry);
          continue;
        }
        entry.status = RaceStatus::Race;
        entry.reason = racyReasonName(verdict.reason);
        entry.witness = namedWitness(verdict.witness, ctx);
        entries.emplace(keyOf(entry), entry);
      }
    }
  }

  for (auto &[key, entry] : entries)
    report.races.push_back(std::move(entry));
  for (const auto &r : report.races)
    if (r.status == RaceStatus::Undecided)
      ++report.stats.undecided;
  report.stats.wallMillis =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - startedAt)
          .count();
  return report;
}

RaceReport analyzeFile(const std::string &path, const AnalyzeOptions &opts) {
  std::ifstream in(path);
  RaceReport report;
  report.program = path;
  if (!in) {
    report.hadErrors = true;
    report.diagnostics.push_back(Diagnostic{
        DiagKind::SyntaxError, SourceLoc{path, 1, 1}, "cannot open file"});
    return report;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ParseResult parsed = parseTranslationUnit(buf.str(), path);
  if (!parsed.ok()) {
    report.hadErrors = true;
    report.diagnostics = parsed.diagnostics;
    return report;
  }
  return analyzeProgram(*parsed.program, opts);
}

namespace {

std::string locText(const SourceLoc &loc) {
  return loc.file + ":" + std::to_string(loc.line);
}

} // namespace

std::string render(const RaceReport &report, ReportFormat format) {
  if (format == ReportFormat::Text) {
    std::ostringstream os;
    if (report.hadErrors) {
      for (const auto &d : report.diagnostics)
        os << d.str() << "\n";
      return os.str();
    }
    if (report.races.empty()) {
      os << "no races detected\n";
    } else {
      for (const auto &r : report.races) {
        os << raceKindName(r.kind) << " " << locText(r.locA) << " <-> "
           << locText(r.locB) << " on " << r.array;
        if (r.status == RaceStatus::Undecided) {
          os << " [undecided: " << r.reason << "]";
        } else {
          os << " [" << r.reason;
          for (const auto &[name, value] : r.witness) {
            // Internal helper variables stay out of the report line.
            if (name.find('#') != std::string::npos ||
                name.find('@') != std::string::npos)
              continue;
            os << " " << name << "=" << value;
          }
          os << "]";
        }
        os << "\n";
      }
    }
    os << "stats: pairs=" << report.stats.pairsExamined
       << " filtered=" << report.stats.pairsFiltered
       << " solver-calls=" << report.stats.solverCalls
       << " undecided=" << report.stats.undecided
       << " wall-ms=" << report.stats.wallMillis << "\n";
    return os.str();
  }

  // JSON: stable schema, deterministic key order and race ordering. Wall
  // time is intentionally omitted so identical runs are byte-identical.
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["program"] = report.program;
  j["races"] = nlohmann::ordered_json::array();
  for (const auto &r : report.races) {
    nlohmann::ordered_json e;
    e["kind"] = raceKindName(r.kind);
    e["locA"] = {{"file", r.locA.file},
                 {"line", r.locA.line},
                 {"column", r.locA.column}};
    e["locB"] = {{"file", r.locB.file},
                 {"line", r.locB.line},
                 {"column", r.locB.column}};
    e["array"] = r.array;
    e["status"] = r.status == RaceStatus::Race ? "race" : "undecided";
    e["reason"] = r.reason;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (const auto &[name, value] : r.witness)
      w[name] = value;
    e["witness"] = w;
    j["races"].push_back(e);
  }
  j["stats"] = {{"pairsExamined", report.stats.pairsExamined},
                {"pairsFiltered", report.stats.pairsFiltered},
                {"solverCalls", report.stats.solverCalls},
                {"undecided", report.stats.undecided}};
  return j.dump(2) + "\n";
}

int reportExitCode(const RaceReport &report) {
  if (report.hadErrors)
    return 2;
  return report.races.empty() ? 0 : 1;
}

} // namespace hgrd
