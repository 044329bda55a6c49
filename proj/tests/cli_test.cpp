#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "lobeseg/io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LOBESEG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli pipeline and exit codes") {
  const fs::path dir = lobeseg::testing::scratch_dir("cli");
  const std::string d = dir.string();
  REQUIRE(run("phantom --dims 40,40,40 --out-dir " + d + "/ph") == 0);
  CHECK(fs::exists(dir / "ph" / "prob.mhd"));
  CHECK(fs::exists(dir / "ph" / "gt.raw"));

  const std::string in = " --prob " + d + "/ph/prob.mhd --lung " + d + "/ph/lung.mhd";
  CHECK(run("seeds" + in + " --out " + d + "/seeds.mhd") == 0);
  CHECK(run("segment" + in + " --out " + d + "/labels.mhd --probs-out-prefix " + d + "/Q") == 0);
  CHECK(fs::exists(dir / "Q_RL.mhd"));
  CHECK(run("eval --pred " + d + "/labels.mhd --gt " + d + "/ph/gt.mhd --csv " + d + "/m.csv") == 0);
  CHECK(slurp(dir / "m.csv").rfind("case,lobe,", 0) == 0);
  CHECK(run("hist --scores " + d + "/m.csv --bins 5 --out " + d + "/h.csv") == 0);
  CHECK(run("window --hu " + d + "/missing.mhd --out-prefix " + d + "/P") == 2);

  // Exit codes.
  CHECK(run("") == 1);
  CHECK(run("segment --prob x.mhd") == 1);
  CHECK(run("segment" + in + " --out " + d + "/l.mhd --beta -1") == 1);
  CHECK(run("phantom --dims 16,40,40 --out-dir " + d + "/small") == 1);
  CHECK(run("segment --prob " + d + "/nope.mhd --lung " + d + "/nope.mhd --out " + d + "/l.mhd") == 2);
  CHECK(run("seeds" + in + " --out " + d + "/s.mhd --min-seed-voxels 100000") == 3);
  CHECK(run("segment" + in + " --out " + d + "/l.mhd --max-iter 1") == 4);
}

TEST_CASE("cli windowing") {
  const fs::path dir = lobeseg::testing::scratch_dir("cli_window");
  const std::string d = dir.string();
  lobeseg::HuVolume hu(lobeseg::GridMeta({3, 1, 1}), std::vector<std::int16_t>{-1000, 200, -400});
  lobeseg::io::write_volume(hu, dir / "hu.mhd");
  REQUIRE(run("window --hu " + d + "/hu.mhd --out-prefix " + d + "/P") == 0);
  const auto ch1 = lobeseg::io::read_bytes(dir / "P_ch1.mhd");
  CHECK(ch1[0] == 0);
  CHECK(ch1[1] == 255);
  CHECK(ch1[2] == 128);
  REQUIRE(run("window --hu " + d + "/hu.mhd --out-prefix " + d + "/Q --windows -600:-200,0:1,0:1") == 0);
  CHECK(lobeseg::io::read_bytes(dir / "Q_ch1.mhd")[2] == 128);
  CHECK(run("window --hu " + d + "/hu.mhd --out-prefix " + d + "/R --windows 1:0,0:1,0:1") == 1);
}

TEST_CASE("cli outputs are reproducible") {
  const fs::path dir = lobeseg::testing::scratch_dir("cli_repeat");
  const std::string d = dir.string();
  for (const char* run_id : {"a", "b"}) {
    const std::string r = d + "/" + run_id;
    REQUIRE(run("phantom --gap-frac 0.3 --noise 0.05 --seed 42 --out-dir " + r) == 0);
    const std::string in = " --prob " + r + "/prob.mhd --lung " + r + "/lung.mhd";
    REQUIRE(run("seeds" + in + " --out " + r + "/seeds.mhd") == 0);
    REQUIRE(run("segment" + in + " --out " + r + "/labels.mhd") == 0);
  }
  for (const char* f : {"prob.raw", "gt.raw", "seeds.raw", "labels.raw"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}
