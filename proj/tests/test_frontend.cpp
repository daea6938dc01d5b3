#include "hgrd/ast.hpp"
#include "hgrd/parser.hpp"

#include <doctest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

using namespace hgrd;

namespace {

const char *kFig1 = R"(
__global__ void copyUppLowKernel(float *A, int rows, int cols) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  int j = blockIdx.y * blockDim.y + threadIdx.y;
  if (j > i && j < rows) {
    A[j * cols + i] = A[i * cols + j];
  }
}

void main() {
  float *A;
  int rows = __input();
  int cols = __input();
  cudaMalloc(&A, rows * cols);
  assert(rows == cols);
  copyUppLowKernel<<<(2, 2, 1), (2, 1, 1)>>>(A, rows, cols);
}
)";

Program parseOk(const std::string &src, const std::string &name = "test.mcu") {
  ParseResult r = parseTranslationUnit(src, name);
  if (!r.ok()) {
    for (const auto &d : r.diagnostics)
      MESSAGE(d.str());
  }
  REQUIRE(r.ok());
  return std::move(*r.program);
}

std::string readFile(const std::string &path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

TEST_CASE("triangle-copy program parses with kernel, assert and launch") {
  Program p = parseOk(kFig1);
  REQUIRE(p.kernels.size() == 1);
  CHECK(p.kernels[0].params.size() == 3);
  CHECK(p.kernels[0].params[0].type == ParamType::FloatArray);
  CHECK(p.kernels[0].params[1].type == ParamType::Int);
  REQUIRE(p.hostFunctions.size() == 1);
  int asserts = 0, launches = 0;
  for (const auto &s : p.hostFunctions[0].body) {
    asserts += s->is<AssertStmt>();
    launches += s->is<LaunchStmt>();
  }
  CHECK(asserts == 1);
  CHECK(launches == 1);
}

TEST_CASE("empty kernel body parses") {
  Program p = parseOk("__global__ void k() {}\n"
                      "void main() { k<<<(1,1,1),(1,1,1)>>>(); }\n");
  CHECK(p.kernels[0].body.empty());
}

TEST_CASE("non-constant divisor is a parse error") {
  ParseResult r = parseTranslationUnit(
      "__global__ void k(int x, int y) { int z = x / y; }\n"
      "void main() { k<<<1,1>>>(1, 2); }\n",
      "bad.mcu");
  REQUIRE(!r.ok());
  CHECK(r.diagnostics[0].kind == DiagKind::NonConstantDivisor);
}

TEST_CASE("unbound identifiers are diagnosed") {
  ParseResult r = parseTranslationUnit(
      "__global__ void k(float *A) { A[0] = w; }\n"
      "void main() { k<<<1,1>>>(A); }\n",
      "bad.mcu");
  REQUIRE(!r.ok());
  bool found = false;
  for (const auto &d : r.diagnostics)
    found = found || d.kind == DiagKind::UnboundIdentifier;
  CHECK(found);
}

TEST_CASE("kernel-side assert is rejected") {
  ParseResult r = parseTranslationUnit(
      "__global__ void k(int n) { assert(n > 0); }\n"
      "void main() { k<<<1,1>>>(3); }\n",
      "bad.mcu");
  CHECK(!r.ok());
}

TEST_CASE("launch of unknown kernel is diagnosed") {
  ParseResult r = parseTranslationUnit(
      "void main() { ghost<<<1,1>>>(); }\n", "bad.mcu");
  REQUIRE(!r.ok());
  CHECK(r.diagnostics[0].kind == DiagKind::UnboundIdentifier);
}

TEST_CASE("scoped intrinsics parse with their scopes") {
  Program p = parseOk(
      "__global__ void k(lock *L) {\n"
      "  atomicCAS(L[0], 0, 1);\n"
      "  atomicCAS_block(L[0], 0, 1);\n"
      "  __threadfence();\n"
      "  __threadfence_block();\n"
      "  atomicExch_block(L[0], 0);\n"
      "  atomicAdd(L[1], 1);\n"
      "}\n"
      "void main() { lock *L; cudaMalloc(&L, 4); k<<<1,1>>>(L); }\n");
  const auto &body = p.kernels[0].body;
  CHECK(body[0]->as<AtomicStmt>().scope == Scope::Device);
  CHECK(body[1]->as<AtomicStmt>().scope == Scope::Block);
  CHECK(body[2]->as<FenceStmt>().scope == Scope::Device);
  CHECK(body[3]->as<FenceStmt>().scope == Scope::Block);
  CHECK(body[4]->as<AtomicStmt>().op == AtomicKind::Exch);
  CHECK(body[5]->as<AtomicStmt>().op == AtomicKind::Add);
}

TEST_CASE("launch sites come back in host program order") {
  Program p = parseOk(
      "__global__ void a(float *x) { x[0] = 1; }\n"
      "__global__ void b(float *x) { x[1] = 2; }\n"
      "void main() {\n"
      "  float *x;\n"
      "  cudaMalloc(&x, 4);\n"
      "  a<<<1,1>>>(x);\n"
      "  b<<<1,1>>>(x);\n"
      "  a<<<1,1>>>(x);\n"
      "}\n");
  auto sites = listLaunchSites(p);
  REQUIRE(sites.size() == 3);
  CHECK(sites[0].kernel->name == "a");
  CHECK(sites[1].kernel->name == "b");
  CHECK(sites[2].kernel->name == "a");
}

TEST_CASE("launch inside a host loop is one syntactic site") {
  Program p = parseOk(
      "__global__ void k(float *x, int o) { x[o] = o; }\n"
      "void main() {\n"
      "  float *x;\n"
      "  int n = __input();\n"
      "  cudaMalloc(&x, 8);\n"
      "  for (int i = 0; i < n; i = i + 1) {\n"
      "    k<<<1,1>>>(x, i);\n"
      "  }\n"
      "}\n");
  CHECK(listLaunchSites(p).size() == 1);
}

TEST_CASE("program with no launches yields no sites") {
  Program p = parseOk("void main() { int x = 1; }\n");
  CHECK(listLaunchSites(p).empty());
}

TEST_CASE("round trip: corpus programs reparse to identical structure") {
  std::string dir = HGRD_CORPUS_DIR;
  int checked = 0;
  for (const auto &f : std::filesystem::directory_iterator(dir)) {
    if (f.path().extension() != ".mcu")
      continue;
    std::string src = readFile(f.path().string());
    Program p = parseOk(src, f.path().filename().string());
    std::string printed = prettyPrint(p);
    Program p2 = parseOk(printed, "printed.mcu");
    CHECK_MESSAGE(structurallyEqual(p, p2), f.path().filename().string());
    // And printing is a fixpoint after one round.
    CHECK(prettyPrint(p2) == printed);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("launch site count equals the count of <<< tokens") {
  std::string dir = HGRD_CORPUS_DIR;
  for (const auto &f : std::filesystem::directory_iterator(dir)) {
    if (f.path().extension() != ".mcu")
      continue;
    std::string src = readFile(f.path().string());
    Program p = parseOk(src, f.path().filename().string());
    size_t tokens = 0;
    for (size_t at = src.find("<<<"); at != std::string::npos;
         at = src.find("<<<", at + 3))
      ++tokens;
    CHECK(listLaunchSites(p).size() == tokens);
  }
}

TEST_CASE("every node location lies inside the source bounds") {
  std::string src = kFig1;
  Program p = parseOk(src);
  int lines = 1;
  for (char c : src)
    lines += c == '\n';
  std::function<void(const Expr &)> checkExpr = [&](const Expr &e) {
    CHECK(e.loc.line >= 1);
    CHECK(e.loc.line <= lines);
    CHECK(e.loc.column >= 1);
    if (e.is<BinaryExpr>()) {
      checkExpr(*e.as<BinaryExpr>().lhs);
      checkExpr(*e.as<BinaryExpr>().rhs);
    } else if (e.is<ArrayLoad>()) {
      checkExpr(*e.as<ArrayLoad>().index);
    }
  };
  std::function<void(const StmtList &)> checkBody = [&](const StmtList &b) {
    for (const auto &s : b) {
      CHECK(s->loc.line >= 1);
      CHECK(s->loc.line <= lines);
      if (s->is<IfStmt>()) {
        checkExpr(*s->as<IfStmt>().cond);
        checkBody(s->as<IfStmt>().thenBody);
        checkBody(s->as<IfStmt>().elseBody);
      } else if (s->is<ForStmt>()) {
        checkBody(s->as<ForStmt>().body);
      } else if (s->is<ArrayStoreStmt>()) {
        checkExpr(*s->as<ArrayStoreStmt>().index);
        checkExpr(*s->as<ArrayStoreStmt>().value);
      }
    }
  };
  for (const auto &k : p.kernels)
    checkBody(k.body);
  for (const auto &f : p.hostFunctions)
    checkBody(f.body);
}
