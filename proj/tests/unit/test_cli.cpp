#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "spectradiag/matrix_io.hpp"
#include "spectradiag/spectral.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = SPECTRADIAG_TEST_DATA;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(SPECTRADIAG_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "spectradiag_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kIdentity = "task_id,a,b,c\nt1,1,0,0\nt2,0,1,0\nt3,0,0,1\n";
const std::string kToy = "task_id,a,b,c,d,e,f,g,h,i,j\n"
                         "easy,1,1,1,1,1,1,1,1,1,0\n"
                         "half,1,1,1,1,1,0,0,0,0,0\n"
                         "mid,1,1,1,1,1,1,1,0,0,0\n";

}  // namespace

TEST_CASE("ed wraps the library value") {
  const auto path = write_file("identity.csv", kIdentity);
  const Run r = cli("ed " + path.string() + " --bootstrap 0");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const auto m = spectradiag::load_matrix(path);
  CHECK(j["ed"].get<double>() == doctest::Approx(spectradiag::matrix_ed(m)).epsilon(1e-12));
  CHECK(j["ed"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("centering changes ED but never the input file") {
  const auto path = write_file("toy.csv", kToy);
  const std::string before = slurp(path);
  const Run task = cli("ed " + path.string() + " --bootstrap 20");
  const Run model = cli("ed " + path.string() + " --bootstrap 20 --centering model");
  REQUIRE(task.code == 0);
  REQUIRE(model.code == 0);
  CHECK(nlohmann::json::parse(task.out)["ed"] != nlohmann::json::parse(model.out)["ed"]);
  CHECK(slurp(path) == before);
}

TEST_CASE("same seed gives byte-identical output") {
  const auto path = write_file("toy.csv", kToy);
  const std::string args = "ed " + path.string() + " --bootstrap 50 --seed 9 --null-replicates 10";
  const Run a = cli(args);
  const Run b = cli(args + " --threads 1");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const Run c = cli("synth --k 2 --tasks 30 --models 12 --seed 4");
  CHECK(c.out == cli("synth --k 2 --tasks 30 --models 12 --seed 4 --threads 3").out);
}

TEST_CASE("exit codes") {
  const auto bad = write_file("bad.csv", "task_id,a,b\nt1,1,x\n");
  CHECK(cli("ed " + bad.string()).code == 2);
  CHECK(cli("ed " + (scratch() / "missing.csv").string()).code == 2);
  CHECK(cli("ed").code == 2);
  CHECK(cli("frobnicate").code == 2);
  const auto falling = write_file("falling.csv", "x,ed\n10,6\n20,5\n40,4\n");
  CHECK(cli("saturate --points " + falling.string()).code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("ceiling subcommand") {
  const Run r = cli("ceiling --rho -0.64");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ceiling"].get<double>() == doctest::Approx(0.4243).epsilon(1e-4));
  CHECK(cli("ceiling --rho -1").code == 2);
}

TEST_CASE("greedy k=1 picks the max-variance task") {
  const auto path = write_file("toy.csv", kToy);
  const Run r = cli("select " + path.string() + " --method ed_greedy --k 1");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["selected"] == nlohmann::json::array({"half"}));
}

TEST_CASE("synthetic matrix feeds the ED command") {
  const fs::path out = scratch() / "synth.csv";
  REQUIRE(cli("synth --k 5 --tasks 300 --models 80 --scale 2.5 --seed 1 --out " + out.string()).code == 0);
  const Run r = cli("ed " + out.string() + " --bootstrap 20");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["ed"].get<double>() > 3.0);
}

TEST_CASE("workflow command") {
  const Run r = cli("workflow --suite " + (kData / "toy_suite.csv").string() + " --candidates " +
                    (kData / "toy_candidates.csv").string());
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["step1_redundancy"]["flags"]["redundant"].size() == 1);
  CHECK(j["step3_trend"]["status"] == "skipped");
}

TEST_CASE("other wrappers run") {
  const auto toy = write_file("toy.csv", kToy);
  const fs::path synth = scratch() / "synth_small.csv";
  REQUIRE(cli("synth --k 3 --tasks 60 --models 30 --seed 2 --out " + synth.string()).code == 0);
  const std::string suite = (kData / "toy_suite.csv").string();
  const fs::path csv = scratch() / "plot.csv";
  CHECK(cli("corr " + suite + " --method spearman --cluster-groups 3").code == 0);
  CHECK(cli("corr " + synth.string() + " --method tetrachoric").code == 0);
  CHECK(cli("compress " + synth.string() + " --trials 4 --csv " + csv.string()).code == 0);
  CHECK(slurp(csv).rfind("fraction", 0) == 0);
  CHECK(cli("saturate " + synth.string() + " --counts 5,10,20,30 --trials 4").code == 0);
  CHECK(cli("trend " + (kData / "toy_series.csv").string()).code == 0);
  CHECK(cli("trend --suite " + suite + " --window 10 --step 5 --sort").code == 0);
  CHECK(cli("suite " + suite + " --samples 200 --subset-size 3").code == 0);
  CHECK(cli("select " + synth.string() + " --method k_medoids --k 5 --prospective 5,10").code == 0);
  CHECK(cli("synth --iid gaussian --tasks 5 --models 4").code == 0);
  CHECK(cli("synth --rank-recovery --ks 1,2 --seeds 2 --tasks 40 --models 20").code == 0);
  CHECK(cli("select " + toy.string() + " --method best").code == 2);
}
