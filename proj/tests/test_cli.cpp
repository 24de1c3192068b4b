#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kTool = RMTLSD_PATH;

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("rmtlsd_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args, const fs::path& dir,
        const std::string& log = "log.txt") {
  const std::string cmd =
      kTool + " " + args + " >" + (dir / log).string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return (status >= 0) ? ((status >> 8) & 0xff) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

std::string mp_config(int p, int n) {
  std::ostringstream ss;
  ss << R"({"model": {"family": "iid_covariance", "sigma_eigs": [{"value": 1, "count": )"
     << p << R"(}]}, "dims": {"p": )" << p << R"(, "n": )" << n
     << R"(}, "zgrid": {"x_min": 0.0, "x_max": 5.0, "count": 200, "eta": 0.01}, "seeds": [1]})";
  return ss.str();
}

int count_lines(const std::string& s) {
  int lines = 0;
  for (char c : s) lines += (c == '\n');
  return lines;
}

}  // namespace

TEST_CASE("list-models catalogs the seven families") {
  const auto dir = fresh_dir("list");
  CHECK(run("list-models", dir) == 0);
  const std::string text = slurp(dir / "log.txt");
  CHECK(count_lines(text) == 7);
  CHECK(text.find("iid_covariance") != std::string::npos);
  CHECK(text.find("finite_mixture") != std::string::npos);

  CHECK(run("list-models --json", dir, "json.txt") == 0);
  const std::string j = slurp(dir / "json.txt");
  CHECK(j.find("\"family\"") != std::string::npos);
  CHECK(j.find("diffusion_rcv") != std::string::npos);
}

TEST_CASE("unknown subcommand exits with code 1") {
  const auto dir = fresh_dir("unknown");
  CHECK(run("frobnicate", dir) == 1);
}

TEST_CASE("malformed JSON exits with code 2") {
  const auto dir = fresh_dir("badjson");
  put(dir / "cfg.json", "{ not json");
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " +
                dir.string(),
            dir) == 2);
  CHECK(slurp(dir / "log.txt").find("config") != std::string::npos);
}

TEST_CASE("unknown config key exits with code 2 and names the key") {
  const auto dir = fresh_dir("badkey");
  put(dir / "cfg.json",
      R"({"model": {"family": "iid_covariance", "sigma_eigs": [1]}, "dims": {"p": 1, "n": 2}, "bogus_knob": 3})");
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " +
                dir.string(),
            dir) == 2);
  CHECK(slurp(dir / "log.txt").find("bogus_knob") != std::string::npos);
}

TEST_CASE("model invariant violation exits with code 3") {
  const auto dir = fresh_dir("invariant");
  // sigma_eigs has 2 entries but p = 5
  put(dir / "cfg.json",
      R"({"model": {"family": "iid_covariance", "sigma_eigs": [1, 2]}, "dims": {"p": 5, "n": 10}})");
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
                dir.string(),
            dir) == 3);
}

TEST_CASE("simulate writes p eigenvalues and reruns are byte-identical") {
  const auto dir = fresh_dir("sim");
  put(dir / "cfg.json", mp_config(25, 50));
  const auto out1 = dir / "a", out2 = dir / "b";
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
                out1.string(),
            dir) == 0);
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
                out2.string(),
            dir) == 0);
  const std::string a = slurp(out1 / "esd_seed1.csv");
  CHECK(count_lines(a) == 25 + 3);  // two comment lines + column header
  CHECK(a.substr(0, 2) == "# ");
  CHECK(a == slurp(out2 / "esd_seed1.csv"));
}

TEST_CASE("solve and compare outputs are deterministic") {
  const auto dir = fresh_dir("solve");
  put(dir / "cfg.json", mp_config(50, 100));
  const auto out1 = dir / "a", out2 = dir / "b";
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " +
                out1.string(),
            dir) == 0);
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " +
                out2.string(),
            dir) == 0);
  CHECK(slurp(out1 / "density.csv") == slurp(out2 / "density.csv"));
  CHECK(slurp(out1 / "density.json") == slurp(out2 / "density.json"));

  CHECK(run("compare --config " + (dir / "cfg.json").string() + " --out " +
                out1.string(),
            dir) == 0);
  CHECK(run("compare --config " + (dir / "cfg.json").string() + " --out " +
                out2.string(),
            dir) == 0);
  CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
  CHECK(slurp(out1 / "overlay_seed1.csv") == slurp(out2 / "overlay_seed1.csv"));
  const std::string report = slurp(out1 / "report.json");
  CHECK(report.find("median_ks") != std::string::npos);
  CHECK(report.find("config_hash") != std::string::npos);
}

TEST_CASE("tall matrices report the zero atom") {
  const auto dir = fresh_dir("atom");
  put(dir / "cfg.json", mp_config(40, 20));  // c = 2, atom = 1 - 1/c = 0.5
  CHECK(run("solve --config " + (dir / "cfg.json").string() + " --out " +
                dir.string(),
            dir) == 0);
  const std::string side = slurp(dir / "density.json");
  const auto pos = side.find("\"atom_at_zero\":");
  REQUIRE(pos != std::string::npos);
  const double atom = std::strtod(side.c_str() + pos + 16, nullptr);
  CHECK(atom == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("degenerate sizes still work") {
  const auto dir = fresh_dir("tiny");
  put(dir / "cfg.json", mp_config(1, 1));
  CHECK(run("simulate --config " + (dir / "cfg.json").string() + " --out " +
                dir.string(),
            dir) == 0);
  CHECK(count_lines(slurp(dir / "esd_seed1.csv")) == 1 + 3);

  put(dir / "two.json",
      R"({"model": {"family": "iid_covariance", "sigma_eigs": [1, 1]}, "dims": {"p": 2, "n": 4}, "zgrid": {"x_min": 0.0, "x_max": 4.0, "count": 2, "eta": 0.5}})");
  CHECK(run("simulate --config " + (dir / "two.json").string() + " --out " +
                dir.string(),
            dir) == 0);
}
