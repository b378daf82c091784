// Copyright 2026 The ksk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the ksk executable end to end.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "ksk/io.hpp"
#include "ksk/solvers.hpp"

namespace {

namespace fs = std::filesystem;

const fs::path kWork = KSK_TEST_WORKDIR;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Run(const std::string& args) {
  fs::create_directories(kWork);
  const fs::path out = kWork / "stdout.txt", err = kWork / "stderr.txt";
  const std::string cmd = std::string("cd '") + kWork.string() + "' && '" + KSK_CLI_PATH +
                          "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = Slurp(out);
  r.err = Slurp(err);
  return r;
}

bool Contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

void WriteIdentitySystem(const std::string& prefix, std::size_t n) {
  fs::create_directories(kWork);
  ksk::Vector b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<double>(n - i);
  ksk::SaveMatrix((kWork / (prefix + "_A.kskm")).string(), ksk::DenseMatrix::Identity(n));
  ksk::SaveVector((kWork / (prefix + "_b.kskm")).string(), b);
}

TEST_CASE("gen is deterministic and writes the binary format") {
  Result r1 = Run("gen --m 100 --n 5 --seed 7 --out g1");
  Result r2 = Run("gen --m 100 --n 5 --seed 7 --out g2");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(Contains(r1.out, "seed: 7"));
  for (const char* f : {"A.kskm", "b.kskm", "xstar.kskm"}) {
    const std::string a = Slurp(kWork / "g1" / f);
    CHECK(a == Slurp(kWork / "g2" / f));
    CHECK(a.substr(0, 4) == "KSKM");
  }
  CHECK(Run("solve --a g1/A.kskm --b g1/b.kskm --xstar g1/xstar.kskm --check").code == 0);

  REQUIRE(Run("gen --m 100 --n 5 --seed 7 --out gm --format mm").code == 0);
  CHECK(Slurp(kWork / "gm" / "A.mtx").rfind("%%MatrixMarket", 0) == 0);
}

TEST_CASE("gen errors") {
  CHECK(Run("gen --m 5 --n 5 --seed 1 --out bad").code == 1);
  std::ofstream(kWork / "blocker") << "x";
  const Result r = Run("gen --m 10 --n 2 --seed 1 --out blocker/sub");
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("check detects an inconsistent right-hand side") {
  REQUIRE(Run("gen --m 50 --n 3 --seed 2 --out gc").code == 0);
  ksk::Vector b = ksk::LoadVector((kWork / "gc" / "b.kskm").string());
  b[4] += 1e-9;
  ksk::SaveVector((kWork / "gc" / "b.kskm").string(), b);
  const Result r = Run("solve --a gc/A.kskm --b gc/b.kskm --xstar gc/xstar.kskm --check");
  CHECK(r.code == 1);
  CHECK(Contains(r.out, "mismatched_entries: 1"));
}

TEST_CASE("solve on the identity") {
  WriteIdentitySystem("id", 6);
  const Result r = Run("solve --a id_A.kskm --b id_b.kskm --method mwrk --report id.json");
  REQUIRE(r.code == 0);
  const ksk::SolveReport rep = ksk::SolveReportFromJson(Slurp(kWork / "id.json"));
  CHECK(rep.termination == ksk::Termination::kConverged);
  CHECK(rep.iterations <= 6);

  // x_star = b for the identity, so the trace is relative to it.
  const Result x = Run("solve --a id_A.kskm --b id_b.kskm --xstar id_b.kskm "
                       "--method mwrk --report idx.json");
  REQUIRE(x.code == 0);
  const ksk::SolveReport rx = ksk::SolveReportFromJson(Slurp(kWork / "idx.json"));
  REQUIRE(rx.res_trace.size() == rx.iterations + 1);
  CHECK(rx.res_trace.front().second == 1.0);
  CHECK(rx.res_trace.back().second == 0.0);
}

TEST_CASE("solve flag validation and exit codes") {
  REQUIRE(Run("gen --m 100 --n 5 --seed 3 --out gs").code == 0);
  const std::string sys = "--a gs/A.kskm --b gs/b.kskm --xstar gs/xstar.kskm ";

  Result r = Run("solve " + sys + "--method mwrk --d 10 --report x.json");
  CHECK(r.code == 1);
  CHECK(Contains(r.err, "d applies to csk only"));

  r = Run("solve " + sys + "--method csk --d 100 --report x.json");
  CHECK(r.code == 1);
  CHECK(Contains(r.err, "d < m"));

  r = Run("solve " + sys + "--method mwrk --max-iters 1 --report x.json");
  CHECK(r.code == 2);
  CHECK(Contains(r.out, "MaxIters"));

  r = Run("solve " + sys + "--method csk --report csk.json --epsilon");
  CHECK(r.code == 0);
  CHECK(Contains(Slurp(kWork / "csk.json"), "\"epsilon_exact\""));

  CHECK(Run("solve " + sys + "--method gmres --report x.json").code == 1);
  CHECK(Run("solve " + sys + "--method grk --theta 0.3 --report x.json").code == 1);
  CHECK(Run("solve " + sys + "--method rgrk --theta 0.3 --report x.json").code == 0);
  CHECK(Run("solve --a missing.kskm --b gs/b.kskm --report x.json").code == 1);
  CHECK(Run("solve " + sys + "--method mwrk --report x.json --bogus").code == 1);
}

TEST_CASE("bench outputs") {
  fs::remove_all(kWork / "b1");
  Result r = Run("bench --sizes 300x8 --trials 1 --methods mwrk --seed 4 --out-dir b1");
  REQUIRE(r.code == 0);
  const std::string table = Slurp(kWork / "b1" / "table.csv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 2);
  CHECK(fs::exists(kWork / "b1" / "traces.csv"));
  CHECK(fs::exists(kWork / "b1" / "trials" / "300x8_mwrk_0.json"));

  const std::string args = "bench --sizes 300x8,400x10 --trials 3 --seed 9 --no-timing";
  REQUIRE(Run(args + " --out-dir n1").code == 0);
  REQUIRE(Run(args + " --out-dir n2").code == 0);
  const std::string t1 = Slurp(kWork / "n1" / "table.csv");
  CHECK(t1 == Slurp(kWork / "n2" / "table.csv"));
  CHECK(Contains(t1, ",rk,"));
  CHECK(Contains(t1, ",grk,"));
  CHECK(Contains(t1, ",mwrk,"));
  CHECK(Contains(t1, ",csk,"));
  CHECK(Slurp(kWork / "n1" / "traces_400x10.csv") == Slurp(kWork / "n2" / "traces_400x10.csv"));

  r = Run("bench --sizes 300x8,40x8 --trials 1 --methods mwrk,csk --out-dir b3");
  CHECK(r.code == 3);
  CHECK(Contains(r.err, "40x8 csk"));

  CHECK(Run("bench --sizes 300by8 --out-dir b4").code == 1);
  CHECK(Run("bench --sizes 300x8 --methods foo --out-dir b4").code == 1);
}

TEST_CASE("trace writes median traces only") {
  fs::remove_all(kWork / "tr");
  REQUIRE(Run("trace --m 300 --n 8 --trials 2 --out-dir tr").code == 0);
  const std::string csv = Slurp(kWork / "tr" / "traces.csv");
  CHECK(csv.rfind("method,iteration,median_res,median_cpu_s\n", 0) == 0);
  CHECK_FALSE(fs::exists(kWork / "tr" / "table.csv"));
}

TEST_CASE("embed-check") {
  Result r = Run("embed-check --m 500 --n 5 --d 25 --seeds 6 --seed 1");
  REQUIRE(r.code == 0);
  CHECK(Contains(r.out, "epsilon_median: "));
  CHECK_FALSE(Contains(r.out, "empirical_delta"));

  r = Run("embed-check --m 500 --n 5 --d 25 --seeds 6 --seed 1 --epsilon 50 --delta 0.1");
  CHECK(r.code == 0);
  CHECK(Contains(r.out, "empirical_delta: 0"));
  r = Run("embed-check --m 500 --n 5 --d 25 --seeds 6 --seed 1 --epsilon 1e-6 --delta 0.1");
  CHECK(r.code == 4);
  CHECK(Contains(r.out, "empirical_delta: 1"));

  CHECK(Run("embed-check --m 500 --n 5 --d 0").code == 1);
  r = Run("embed-check --m 500 --n 5 --d 500");
  CHECK(r.code == 1);
  CHECK(Contains(r.err, "d < m"));
}

TEST_CASE("factors") {
  fs::create_directories(kWork);
  ksk::SaveMatrix((kWork / "i2.kskm").string(), ksk::DenseMatrix::Identity(2));
  Result r = Run("factors --a i2.kskm --epsilon 0");
  REQUIRE(r.code == 0);
  CHECK(Contains(r.out, "mwrk_factor: 0\n"));
  CHECK(Contains(r.out, "csk_factor: 0.5\n"));

  ksk::SaveMatrix((kWork / "q.kskm").string(),
                  ksk::DenseMatrix(4, 2, {0.6, 0, 0.8, 0, 0, 1, 0, 0}));
  r = Run("factors --a q.kskm --epsilon 0");
  CHECK(Contains(r.out, "csk_factor: 0.5\n"));

  CHECK(Run("factors --a i2.kskm --epsilon 1").code == 1);

  ksk::SaveMatrix((kWork / "rd.kskm").string(), ksk::DenseMatrix(3, 2, {1, 2, 2, 4, 3, 6}));
  CHECK(Run("factors --a rd.kskm --epsilon 0.1").code == 1);

  REQUIRE(Run("gen --m 400 --n 4 --seed 5 --out gf").code == 0);
  r = Run("factors --a gf/A.kskm --seed 3");
  CHECK(r.code == 0);
  CHECK(Contains(r.out, "epsilon_source: measured (d=16, seed=3)"));
}

TEST_CASE("usage errors") {
  CHECK(Run("").code == 1);
  CHECK(Run("frobnicate").code == 1);
  CHECK(Run("--help").code == 0);
  CHECK(Run("gen --help").code == 0);
}

}  // namespace
