#include "hgrd/access.hpp"
#include "hgrd/parser.hpp"

#include <doctest.h>

using namespace hgrd;

namespace {

struct Built {
  Program program;
  CFG cfg;
  DomInfo dom;
  std::vector<Access> accesses;
  std::vector<AccessPair> pairs;
};

Built build(const std::string &kernelBody, const std::string &params,
            const std::string &args) {
  std::string src = "__global__ void k(" + params + ") {\n" + kernelBody +
                    "}\n"
                    "void main() {\n"
                    "  float *A; int *B; lock *L;\n"
                    "  cudaMalloc(&A, 64);\n"
                    "  cudaMalloc(&B, 64);\n"
                    "  cudaMalloc(&L, 64);\n"
                    "  k<<<(2,1,1),(2,1,1)>>>(" + args + ");\n"
                    "}\n";
  ParseResult r = parseTranslationUnit(src, "prelim.mcu");
  if (!r.ok())
    for (const auto &d : r.diagnostics)
      MESSAGE(d.str());
  REQUIRE(r.ok());
  Built b{std::move(*r.program), {}, {}, {}, {}};
  b.cfg = buildCfg(b.program.kernels[0]);
  b.dom = computeDominance(b.cfg);
  b.accesses = collectAccesses(b.program.kernels[0], b.cfg);
  b.pairs = generateAccessPairs(b.accesses);
  return b;
}

KindSet check(Built &b, size_t pairIndex) {
  REQUIRE(pairIndex < b.pairs.size());
  return preliminaryCheck(b.pairs[pairIndex], b.cfg, b.dom);
}

// The (store, load) pair of a kernel, independent of generation order.
size_t storeLoadPair(const Built &b) {
  for (size_t i = 0; i < b.pairs.size(); ++i)
    if (b.pairs[i].first->kind == AccessKind::Store &&
        b.pairs[i].second->kind == AccessKind::Load)
      return i;
  REQUIRE(false);
  return 0;
}

} // namespace

TEST_CASE("triangle-copy kernel has one load and one store on A") {
  Built b = build("  int i = blockIdx.x * blockDim.x + threadIdx.x;\n"
                  "  int j = blockIdx.y * blockDim.y + threadIdx.y;\n"
                  "  if (j > i && j < 4) {\n"
                  "    A[j * 2 + i] = A[i * 2 + j];\n"
                  "  }\n",
                  "float *A", "A");
  REQUIRE(b.accesses.size() == 2);
  CHECK(b.accesses[0].kind == AccessKind::Load);
  CHECK(b.accesses[1].kind == AccessKind::Store);
  CHECK(b.accesses[0].loc.line == b.accesses[1].loc.line);
  // {L,S}, {S,S}; the {L,L} candidate is dropped.
  CHECK(b.pairs.size() == 2);
}

TEST_CASE("kernel touching only local scalars has no accesses") {
  Built b = build("  int x = threadIdx.x;\n  int y = x + 1;\n", "int n", "3");
  CHECK(b.accesses.empty());
  CHECK(b.pairs.empty());
}

TEST_CASE("single store yields its self-pair") {
  Built b = build("  A[threadIdx.x] = 1;\n", "float *A", "A");
  REQUIRE(b.pairs.size() == 1);
  CHECK(b.pairs[0].isSelfPair());
  CHECK(check(b, 0) == KindSet::all());
}

TEST_CASE("two device-scoped atomic adds generate no pair") {
  Built b = build("  atomicAdd(B[threadIdx.x], 1);\n"
                  "  atomicAdd(B[0], 1);\n",
                  "int *B", "B");
  CHECK(b.accesses.size() == 2);
  CHECK(b.pairs.empty());
}

TEST_CASE("block-scoped atomics keep only the inter-threadblock check") {
  Built b = build("  atomicAdd_block(B[threadIdx.x], 1);\n"
                  "  atomicAdd_block(B[0], 1);\n",
                  "int *B", "B");
  REQUIRE(b.pairs.size() == 3);
  for (size_t i = 0; i < b.pairs.size(); ++i) {
    KindSet kinds = check(b, i);
    CHECK(kinds.has(RaceKind::InterBlock));
    CHECK(!kinds.has(RaceKind::IntraBlock));
    CHECK(!kinds.has(RaceKind::IntraWarp));
  }
}

TEST_CASE("a mixed-scope atomic pair still conflicts across blocks") {
  Built b = build("  atomicAdd_block(B[0], 1);\n"
                  "  atomicAdd(B[0], 1);\n",
                  "int *B", "B");
  REQUIRE(b.pairs.size() >= 1);
  KindSet kinds = check(b, 0);
  CHECK(kinds.has(RaceKind::InterBlock));
}

TEST_CASE("syncthreads between the pair leaves only the inter-block check") {
  Built b = build("  A[threadIdx.x] = 1;\n"
                  "  __syncthreads();\n"
                  "  int v = A[threadIdx.x + 1];\n",
                  "float *A", "A");
  REQUIRE(b.pairs.size() == 2);
  KindSet kinds = check(b, storeLoadPair(b));
  CHECK(kinds.has(RaceKind::InterBlock));
  CHECK(!kinds.has(RaceKind::IntraBlock));
  CHECK(!kinds.has(RaceKind::IntraWarp));
}

TEST_CASE("syncwarp removes only the intra-warp check") {
  Built b = build("  A[threadIdx.x] = 1;\n"
                  "  __syncwarp();\n"
                  "  int v = A[threadIdx.x + 1];\n",
                  "float *A", "A");
  KindSet kinds = check(b, storeLoadPair(b));
  CHECK(kinds.has(RaceKind::InterBlock));
  CHECK(kinds.has(RaceKind::IntraBlock));
  CHECK(!kinds.has(RaceKind::IntraWarp));
}

TEST_CASE("barrier inside one branch does not separate the pair") {
  Built b = build("  A[threadIdx.x] = 1;\n"
                  "  if (n > 0) {\n"
                  "    __syncthreads();\n"
                  "  }\n"
                  "  int v = A[threadIdx.x + 1];\n",
                  "float *A, int n", "A, 3");
  CHECK(check(b, storeLoadPair(b)) == KindSet::all());
}

TEST_CASE("a barrier cannot separate a self-pair") {
  Built b = build("  for (int i = 0; i < 3; i = i + 1) {\n"
                  "    A[threadIdx.x + i] = i;\n"
                  "    __syncthreads();\n"
                  "  }\n",
                  "float *A", "A");
  REQUIRE(b.pairs.size() == 1);
  CHECK(b.pairs[0].isSelfPair());
  CHECK(check(b, 0) == KindSet::all());
}

TEST_CASE("no generated pair consists of two loads") {
  Built b = build("  int a = A[0];\n  int c = A[1];\n  A[2] = a + c;\n",
                  "float *A", "A");
  for (const auto &pair : b.pairs)
    CHECK((isWriteAccess(pair.first->kind) ||
           isWriteAccess(pair.second->kind)));
}

TEST_CASE("removing a barrier never shrinks candidate kinds") {
  std::string withBarrier = "  A[threadIdx.x] = 1;\n"
                            "  __syncthreads();\n"
                            "  __syncwarp();\n"
                            "  int v = A[threadIdx.x + 1];\n"
                            "  A[v] = v;\n";
  // The same program with all barriers deleted.
  std::string without = "  A[threadIdx.x] = 1;\n"
                        "  int v = A[threadIdx.x + 1];\n"
                        "  A[v] = v;\n";
  Built a = build(withBarrier, "float *A", "A");
  Built c = build(without, "float *A", "A");
  REQUIRE(a.pairs.size() == c.pairs.size());
  for (size_t i = 0; i < a.pairs.size(); ++i) {
    KindSet restricted = check(a, i);
    KindSet free = check(c, i);
    CHECK(restricted.isSubsetOf(free));
  }
}
