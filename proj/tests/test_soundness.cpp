// Pipeline-level soundness fuzz: on random kernels, every race the concrete
// oracle observes must be statically reported with the same kind and line
// pair at the matching warp size.
#include "hgrd/oracle.hpp"
#include "hgrd/parser.hpp"
#include "hgrd/report.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace hgrd;

namespace {

// Random kernels mixing direct, offset and block-based indexing with
// optional barriers and one-level guards, launched with concrete dims.
std::string randomProgram(std::mt19937 &rng) {
  std::uniform_int_distribution<int> stmtCount(2, 6);
  std::uniform_int_distribution<int> idxKind(0, 4);
  std::uniform_int_distribution<int> opKind(0, 9);
  std::uniform_int_distribution<int> offset(0, 2);
  std::ostringstream body;
  body << "  int t = blockIdx.x * blockDim.x + threadIdx.x;\n";
  int n = stmtCount(rng);
  int guardDepth = 0;
  for (int i = 0; i < n; ++i) {
    std::string idx;
    switch (idxKind(rng)) {
    case 0:
      idx = "t";
      break;
    case 1:
      idx = "t + " + std::to_string(offset(rng));
      break;
    case 2:
      idx = "threadIdx.x";
      break;
    case 3:
      idx = "blockIdx.x";
      break;
    default:
      idx = std::to_string(offset(rng));
      break;
    }
    int op = opKind(rng);
    std::string pad(2 * (guardDepth + 1), ' ');
    if (op <= 3) {
      body << pad << "A[" << idx << "] = t;\n";
    } else if (op <= 6) {
      body << pad << "x = A[" << idx << "];\n";
    } else if (op == 7) {
      body << pad << "__syncthreads();\n";
    } else if (op == 8) {
      body << pad << "__syncwarp();\n";
    } else if (guardDepth == 0) {
      body << pad << "if (t < " << 2 + offset(rng) << ") {\n";
      ++guardDepth;
    }
  }
  while (guardDepth-- > 0)
    body << "  }\n";
  std::uniform_int_distribution<int> dim(1, 2);
  int gx = dim(rng), bx = dim(rng) * 2;
  std::ostringstream src;
  src << "__global__ void k(float *A) {\n  int x = 0;\n" << body.str()
      << "}\n"
      << "void main() {\n  float *A;\n  cudaMalloc(&A, 16);\n  k<<<(" << gx
      << ",1,1),(" << bx << ",1,1)>>>(A);\n}\n";
  return src.str();
}

} // namespace

TEST_CASE("oracle races on random kernels are always statically reported") {
  std::mt19937 rng(31337);
  int oracleRaces = 0;
  for (int seed = 0; seed < 200; ++seed) {
    std::string src = randomProgram(rng);
    ParseResult parsed = parseTranslationUnit(src, "fuzz.mcu");
    REQUIRE(parsed.ok());
    SweepCaps caps;
    std::vector<SweepRace> sweep = enumerateVerdict(*parsed.program, caps);
    std::map<long long, std::set<std::tuple<int, int, int>>> staticByWs;
    for (const auto &race : sweep) {
      ++oracleRaces;
      auto it = staticByWs.find(race.warpSize);
      if (it == staticByWs.end()) {
        AnalyzeOptions opts;
        opts.warpSize = race.warpSize;
        RaceReport report = analyzeProgram(*parsed.program, opts);
        std::set<std::tuple<int, int, int>> keys;
        for (const auto &r : report.races)
          keys.insert({static_cast<int>(r.kind), r.locA.line, r.locB.line});
        it = staticByWs.emplace(race.warpSize, keys).first;
      }
      CHECK_MESSAGE(
          it->second.count({static_cast<int>(race.kind), race.locA.line,
                            race.locB.line}) > 0,
          "seed " << seed << " warp " << race.warpSize << "\n" << src);
    }
  }
  CHECK(oracleRaces > 500); // the generator must produce real conflicts
}
