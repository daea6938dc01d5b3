#include "hgrd/cfg.hpp"
#include "hgrd/parser.hpp"

#include "support.hpp"

#include <doctest.h>

#include <functional>
#include <random>
#include <sstream>

using namespace hgrd;

namespace {

Program parseOk(const std::string &src) {
  ParseResult r = parseTranslationUnit(src, "cfg.mcu");
  REQUIRE(r.ok());
  return std::move(*r.program);
}

} // namespace

TEST_CASE("straight-line kernel builds one block plus the synthetic exit") {
  Program p = parseOk("__global__ void k(float *A) {\n"
                      "  A[0] = 1;\n"
                      "  A[1] = 2;\n"
                      "  A[2] = 3;\n"
                      "}\n"
                      "void main() { float *A; cudaMalloc(&A, 4); "
                      "k<<<1,1>>>(A); }\n");
  CFG cfg = buildCfg(p.kernels[0]);
  CHECK(cfg.blocks.size() == 2);
  CHECK(cfg.blocks[cfg.entry].stmts.size() == 3);
}

TEST_CASE("single if builds the two-armed diamond") {
  Program p = parseOk("__global__ void k(float *A, int n) {\n"
                      "  if (n > 0) {\n"
                      "    A[0] = 1;\n"
                      "  }\n"
                      "}\n"
                      "void main() { float *A; cudaMalloc(&A, 4); "
                      "k<<<1,1>>>(A, 2); }\n");
  CFG cfg = buildCfg(p.kernels[0]);
  // entry (with the condition), then-block, join, synthetic exit
  CHECK(cfg.blocks.size() == 4);
  CHECK(cfg.blocks[cfg.entry].succs.size() == 2);
}

TEST_CASE("for loop builds preheader, header, body and exit with back edge") {
  Program p = parseOk("__global__ void k(float *A) {\n"
                      "  for (int i = 0; i < 4; i = i + 1) {\n"
                      "    A[i] = i;\n"
                      "  }\n"
                      "}\n"
                      "void main() { float *A; cudaMalloc(&A, 4); "
                      "k<<<1,1>>>(A); }\n");
  CFG cfg = buildCfg(p.kernels[0]);
  CHECK(cfg.blocks.size() == 5); // preheader, header, body, loop exit, exit
  bool backEdge = false;
  for (const auto &b : cfg.blocks)
    for (int s : b.succs)
      if (s < b.id)
        backEdge = true;
  CHECK(backEdge);
}

TEST_CASE("entry statements dominate everything; branch does not dominate join") {
  Program p = parseOk("__global__ void k(float *A, int n) {\n"
                      "  A[0] = 1;\n"
                      "  if (n > 0) {\n"
                      "    A[1] = 2;\n"
                      "  }\n"
                      "  A[2] = 3;\n"
                      "}\n"
                      "void main() { float *A; cudaMalloc(&A, 4); "
                      "k<<<1,1>>>(A, 2); }\n");
  CFG cfg = buildCfg(p.kernels[0]);
  DomInfo dom = computeDominance(cfg);
  StmtRef first = cfg.linear[0].second;   // A[0] = 1
  StmtRef inBranch = cfg.linear[2].second; // A[1] = 2
  StmtRef afterJoin = cfg.linear[3].second; // A[2] = 3
  CHECK(dominates(cfg, dom, first, inBranch));
  CHECK(dominates(cfg, dom, first, afterJoin));
  CHECK(!dominates(cfg, dom, inBranch, afterJoin));
  CHECK(postdominates(cfg, dom, afterJoin, first));
  CHECK(!postdominates(cfg, dom, inBranch, first));
  // Reflexivity.
  CHECK(dominates(cfg, dom, inBranch, inBranch));
  CHECK(postdominates(cfg, dom, inBranch, inBranch));
}

TEST_CASE("random structured CFGs agree with the deletion-reachability oracle") {
  std::mt19937 rng(20260808);
  for (int seed = 0; seed < 100; ++seed) {
    Program p = parseOk(testsupport::randomKernelSource(rng, 3));
    CFG cfg = buildCfg(p.kernels[0]);
    REQUIRE(cfg.blocks.size() <= 12);
    DomInfo dom = computeDominance(cfg);
    for (size_t a = 0; a < cfg.blocks.size(); ++a) {
      for (size_t b = 0; b < cfg.blocks.size(); ++b) {
        CHECK(dom.blockDominates(static_cast<int>(a), static_cast<int>(b)) ==
              testsupport::oracleDominates(cfg, static_cast<int>(a), static_cast<int>(b)));
        CHECK(dom.blockPostDominates(static_cast<int>(a),
                                     static_cast<int>(b)) ==
              testsupport::oraclePostdominates(cfg, static_cast<int>(a),
                                  static_cast<int>(b)));
      }
    }
  }
}

TEST_CASE("immediate dominators are strict dominators dominated by all others") {
  std::mt19937 rng(7);
  for (int seed = 0; seed < 20; ++seed) {
    Program p = parseOk(testsupport::randomKernelSource(rng, 2));
    CFG cfg = buildCfg(p.kernels[0]);
    DomInfo dom = computeDominance(cfg);
    CHECK(dom.idom[cfg.entry] == -1);
    CHECK(dom.ipdom[cfg.exitBlock] == -1);
    for (size_t b = 0; b < cfg.blocks.size(); ++b) {
      if (static_cast<int>(b) == cfg.entry)
        continue;
      int id = dom.idom[b];
      REQUIRE(id >= 0);
      CHECK(dom.blockDominates(id, static_cast<int>(b)));
      for (size_t c = 0; c < cfg.blocks.size(); ++c)
        if (c != b && dom.blockDominates(static_cast<int>(c),
                                         static_cast<int>(b)))
          CHECK(dom.blockDominates(static_cast<int>(c), id));
    }
    for (size_t b = 0; b < cfg.blocks.size(); ++b) {
      if (static_cast<int>(b) == cfg.exitBlock)
        continue;
      int ip = dom.ipdom[b];
      REQUIRE(ip >= 0);
      CHECK(dom.blockPostDominates(ip, static_cast<int>(b)));
    }
  }
}
