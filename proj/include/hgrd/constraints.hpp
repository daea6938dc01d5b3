// Constraint generation over two access instances: solver context with
// per-instance thread identity variables, symbolic address rewriting, the
// per-race-kind identity constraints, and the five host fact classes.
#pragma once

#include "hgrd/access.hpp"
#include "hgrd/ast.hpp"
#include "hgrd/cfg.hpp"
#include "hgrd/host_facts.hpp"
#include "hgrd/solver.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hgrd {

struct AnalyzerOptions {
  bool hostAnalysis = true;
  long long warpSize = 32;
  long long domainBound = 1024; // unknown inputs range over [-bound, bound-1]
  long long maxGrid = 64;       // default per-axis grid dimension domain
  long long maxBlock = 64;      // default per-axis block dimension domain
  SolverBudget budget;
};

// Per-(pair, kind) solver state. Kernel parameters and launch dimensions are
// shared between the two access instances; thread identity variables are
// per instance.
struct SolverContext {
  AnalyzerOptions opts;
  std::vector<VarDecl> vars;
  std::vector<Constraint> base; // builtin bounds and id/warp definitions
  VarId gridDim[3];
  VarId blockDim[3];
  VarId blockIdx[2][3];
  VarId threadIdx[2][3];
  VarId linearId[2];
  VarId warpId[2];
  std::map<std::string, VarId> params; // int parameters
  std::map<DefKey, VarId> hostVars; // one shared variable per host definition
  int freshCount = 0;

  VarId newVar(const std::string &name, Interval domain);
  VarId hostVar(const DefKey &key);
  Interval defaultDomain() const {
    return Interval{-opts.domainBound, opts.domainBound - 1};
  }
  void widenDomain(VarId var, long long hi);
};

SolverContext makeContext(const KernelDecl &kernel,
                          const AnalyzerOptions &opts);

// Rewrites the access's index expression over instance-specific builtins and
// shared parameters. Guards of dominating Ifs and kernel-loop bounds come
// back as path constraints for that instance.
std::pair<SymExprPtr, std::vector<Constraint>>
symbolicAddress(const Access &access, int instance, SolverContext &ctx,
                const KernelDecl &kernel);

// The per-kind thread identity constraints, including address equality.
std::vector<Constraint> emitIdentityConstraints(const AccessPair &pair,
                                                RaceKind kind,
                                                SolverContext &ctx,
                                                SymExprPtr addr1,
                                                SymExprPtr addr2);

// The five host-fact constraint classes for one launch site. Returns an
// empty list when host analysis is disabled.
std::vector<Constraint> emitHostConstraints(const HostFacts &facts,
                                            const LaunchFacts &launch,
                                            const KernelDecl &kernel,
                                            SolverContext &ctx);

} // namespace hgrd
