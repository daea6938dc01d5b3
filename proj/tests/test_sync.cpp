#include "hgrd/parser.hpp"
#include "hgrd/report.hpp"
#include "hgrd/sync.hpp"

#include <doctest.h>

using namespace hgrd;

namespace {

struct Setup {
  Program program;
  CFG cfg;
  DomInfo dom;
  std::vector<Access> accesses;
};

Setup make(const std::string &kernelBody) {
  std::string src = "__global__ void k(int *data_, lock *locks, int n) {\n" +
                    kernelBody +
                    "}\n"
                    "void main() {\n"
                    "  int *data_; lock *locks;\n"
                    "  cudaMalloc(&data_, 16);\n"
                    "  cudaMalloc(&locks, 16);\n"
                    "  k<<<(2,1,1),(2,1,1)>>>(data_, locks, 4);\n"
                    "}\n";
  ParseResult r = parseTranslationUnit(src, "sync.mcu");
  if (!r.ok())
    for (const auto &d : r.diagnostics)
      MESSAGE(d.str());
  REQUIRE(r.ok());
  Setup s{std::move(*r.program), {}, {}, {}};
  s.cfg = buildCfg(s.program.kernels[0]);
  s.dom = computeDominance(s.cfg);
  s.accesses = collectAccesses(s.program.kernels[0], s.cfg);
  return s;
}

const Access &accessAt(const Setup &s, AccessKind kind,
                       const std::string &array) {
  for (const auto &a : s.accesses)
    if (a.kind == kind && a.array == array)
      return a;
  REQUIRE(false);
  return s.accesses[0];
}

} // namespace

TEST_CASE("cas plus fence before the access forms a device acquire") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  atomicCAS(locks[t], 0, 1);\n"
                 "  __threadfence();\n"
                 "  data_[t] = t;\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto acq = getAcquire(store, Scope::Device, s.cfg, s.dom, s.accesses);
  REQUIRE(acq.has_value());
  CHECK(acq->role == SyncRole::Acquire);
  CHECK(acq->scope == Scope::Device);
  CHECK(acq->atomic->kind == AccessKind::AtomicCas);
}

TEST_CASE("a block-scoped fence cannot form a device acquire") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  atomicCAS(locks[t], 0, 1);\n"
                 "  __threadfence_block();\n"
                 "  data_[t] = t;\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  CHECK(!getAcquire(store, Scope::Device, s.cfg, s.dom, s.accesses));
  // But it does form a block-scoped acquire.
  auto acq = getAcquire(store, Scope::Block, s.cfg, s.dom, s.accesses);
  REQUIRE(acq.has_value());
  CHECK(acq->scope == Scope::Block);
}

TEST_CASE("no atomics before the access means no acquire") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  __threadfence();\n"
                 "  data_[t] = t;\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  CHECK(!getAcquire(store, Scope::Device, s.cfg, s.dom, s.accesses));
}

TEST_CASE("fence then exchange after the access forms a release") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  data_[t] = t;\n"
                 "  __threadfence();\n"
                 "  atomicExch(locks[t], 0);\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto rel = getRelease(store, Scope::Device, s.cfg, s.dom, s.accesses);
  REQUIRE(rel.has_value());
  CHECK(rel->role == SyncRole::Release);
  CHECK(rel->atomic->kind == AccessKind::AtomicExch);
}

TEST_CASE("a release on only one branch does not post-dominate") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  data_[t] = t;\n"
                 "  if (t < n) {\n"
                 "    __threadfence();\n"
                 "    atomicExch(locks[t], 0);\n"
                 "  }\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  CHECK(!getRelease(store, Scope::Device, s.cfg, s.dom, s.accesses));
}

TEST_CASE("block-scoped exchange satisfies a block-scope requirement") {
  Setup s = make("  int t = threadIdx.x;\n"
                 "  data_[t] = t;\n"
                 "  __threadfence_block();\n"
                 "  atomicExch_block(locks[t], 0);\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto rel = getRelease(store, Scope::Block, s.cfg, s.dom, s.accesses);
  REQUIRE(rel.has_value());
  CHECK(rel->scope == Scope::Block);
  CHECK(!getRelease(store, Scope::Device, s.cfg, s.dom, s.accesses));
}

TEST_CASE("syn returns the acquire for a lock-encompassed access") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  atomicCAS(locks[t], 0, 1);\n"
                 "  __threadfence();\n"
                 "  data_[t] = t;\n"
                 "  __threadfence();\n"
                 "  atomicExch(locks[t], 0);\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto guard = syn(store, Scope::Device, s.program.kernels[0], s.cfg, s.dom,
                   s.accesses);
  REQUIRE(guard.has_value());
  CHECK(guard->role == SyncRole::Acquire);
}

TEST_CASE("syn returns the release for a producer store") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  data_[t] = t;\n"
                 "  __threadfence();\n"
                 "  atomicExch(locks[t], 0);\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto guard = syn(store, Scope::Device, s.program.kernels[0], s.cfg, s.dom,
                   s.accesses);
  REQUIRE(guard.has_value());
  CHECK(guard->role == SyncRole::Release);
}

TEST_CASE("syn returns the acquire for a consumer load") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  atomicCAS(locks[t], 1, 2);\n"
                 "  __threadfence();\n"
                 "  int v = data_[t];\n"
                 "  data_[t + 8] = v;\n");
  const Access &load = accessAt(s, AccessKind::Load, "data_");
  auto guard = syn(load, Scope::Device, s.program.kernels[0], s.cfg, s.dom,
                   s.accesses);
  REQUIRE(guard.has_value());
  CHECK(guard->role == SyncRole::Acquire);
}

TEST_CASE("an unguarded store has no synchronization access") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  data_[t] = t;\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  CHECK(!syn(store, Scope::Device, s.program.kernels[0], s.cfg, s.dom,
             s.accesses));
}

TEST_CASE("mismatched acquire and release addresses are not a lock") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  atomicCAS(locks[t], 0, 1);\n"
                 "  __threadfence();\n"
                 "  data_[0] = t;\n"
                 "  __threadfence();\n"
                 "  atomicExch(locks[t + 1], 0);\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto guard = syn(store, Scope::Device, s.program.kernels[0], s.cfg, s.dom,
                   s.accesses);
  // Not a lock; the store is a producer with a release.
  REQUIRE(guard.has_value());
  CHECK(guard->role == SyncRole::Release);
}

TEST_CASE("nested acquires resolve to the nearest dominating pair") {
  Setup s = make("  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
                 "  atomicCAS(locks[t + 4], 0, 1);\n"
                 "  __threadfence();\n"
                 "  atomicCAS(locks[t], 0, 1);\n"
                 "  __threadfence();\n"
                 "  data_[t] = t;\n");
  const Access &store = accessAt(s, AccessKind::Store, "data_");
  auto acq = getAcquire(store, Scope::Device, s.cfg, s.dom, s.accesses);
  REQUIRE(acq.has_value());
  // The nearest fence pairs with the nearest compare-and-swap before it.
  CHECK(prettyPrint(*acq->lockIndexExpr) == "t");
}

// End-to-end guard verdicts ride through analyzeProgram; the corpus covers
// Guarded, AddressMismatchPossible and InsufficientScope. Here we pin the
// verdict reasons on minimal programs.
namespace {

RaceReport analyzeSource(const std::string &src, bool hostAnalysis = true) {
  ParseResult r = parseTranslationUnit(src, "sync2.mcu");
  REQUIRE(r.ok());
  AnalyzeOptions opts;
  opts.hostAnalysis = hostAnalysis;
  return analyzeProgram(*r.program, opts);
}

} // namespace

TEST_CASE("matching locks with forced-equal indices are guarded") {
  RaceReport report = analyzeSource(
      "__global__ void k(int *acc, lock *locks) {\n"
      "  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
      "  int g = t % 2;\n"
      "  atomicCAS(locks[g], 0, 1);\n"
      "  __threadfence();\n"
      "  acc[g] = acc[g] + 1;\n"
      "  __threadfence();\n"
      "  atomicExch(locks[g], 0);\n"
      "}\n"
      "void main() { int *acc; lock *locks; cudaMalloc(&acc, 4);\n"
      "  cudaMalloc(&locks, 4); k<<<(2,1,1),(2,1,1)>>>(acc, locks); }\n");
  CHECK(report.races.empty());
}

TEST_CASE("different lock indices over the same element race") {
  RaceReport report = analyzeSource(
      "__global__ void k(int *acc, lock *locks) {\n"
      "  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
      "  atomicCAS(locks[t], 0, 1);\n"
      "  __threadfence();\n"
      "  acc[0] = acc[0] + 1;\n"
      "  __threadfence();\n"
      "  atomicExch(locks[t], 0);\n"
      "}\n"
      "void main() { int *acc; lock *locks; cudaMalloc(&acc, 4);\n"
      "  cudaMalloc(&locks, 8); k<<<(2,1,1),(2,1,1)>>>(acc, locks); }\n");
  REQUIRE(!report.races.empty());
  for (const auto &r : report.races)
    CHECK(r.reason == "lock-address-mismatch");
}

TEST_CASE("block-scoped guard on an inter-block conflict reports scope") {
  RaceReport report = analyzeSource(
      "__global__ void k(int *acc, lock *locks) {\n"
      "  int t = blockIdx.x * blockDim.x + threadIdx.x;\n"
      "  atomicCAS_block(locks[0], 0, 1);\n"
      "  __threadfence_block();\n"
      "  acc[0] = acc[0] + t;\n"
      "  __threadfence_block();\n"
      "  atomicExch_block(locks[0], 0);\n"
      "}\n"
      "void main() { int *acc; lock *locks; cudaMalloc(&acc, 4);\n"
      "  cudaMalloc(&locks, 4); k<<<(2,1,1),(2,1,1)>>>(acc, locks); }\n");
  bool sawScope = false;
  for (const auto &r : report.races)
    if (r.kind == RaceKind::InterBlock)
      sawScope = sawScope || r.reason == "insufficient-scope";
  CHECK(sawScope);
}

TEST_CASE("widening every scope to device never turns guarded into racy") {
  // The block-lock program is guarded at block scope for its intra-block
  // conflicts; widening scopes must keep every clean verdict clean.
  std::string blockVersion =
      "__global__ void k(int *acc, lock *locks) {\n"
      "  int t = threadIdx.x;\n"
      "  atomicCAS_block(locks[0], 0, 1);\n"
      "  __threadfence_block();\n"
      "  acc[0] = acc[0] + t;\n"
      "  __threadfence_block();\n"
      "  atomicExch_block(locks[0], 0);\n"
      "}\n"
      "void main() { int *acc; lock *locks; cudaMalloc(&acc, 4);\n"
      "  cudaMalloc(&locks, 4); k<<<(1,1,1),(4,1,1)>>>(acc, locks); }\n";
  std::string deviceVersion =
      "__global__ void k(int *acc, lock *locks) {\n"
      "  int t = threadIdx.x;\n"
      "  atomicCAS(locks[0], 0, 1);\n"
      "  __threadfence();\n"
      "  acc[0] = acc[0] + t;\n"
      "  __threadfence();\n"
      "  atomicExch(locks[0], 0);\n"
      "}\n"
      "void main() { int *acc; lock *locks; cudaMalloc(&acc, 4);\n"
      "  cudaMalloc(&locks, 4); k<<<(1,1,1),(4,1,1)>>>(acc, locks); }\n";
  RaceReport before = analyzeSource(blockVersion);
  RaceReport after = analyzeSource(deviceVersion);
  CHECK(before.races.empty());
  CHECK(after.races.empty());
}
