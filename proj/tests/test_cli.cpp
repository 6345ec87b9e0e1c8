#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(DUALDIV_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string model(const char* name) {
  return std::string("--model ") + DUALDIV_MODEL_DIR + "/" + name;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

// Value of "key": in a flat JSON object, as the literal text.
std::string json_field(const std::string& json, const std::string& key) {
  const auto at = json.find("\"" + key + "\": ");
  REQUIRE(at != std::string::npos);
  const auto start = at + key.size() + 4;
  const auto end = json.find_first_of(",}", start);
  return json.substr(start, end - start);
}

}  // namespace

TEST_CASE("solve: CSV and JSON carry the same digits") {
  const auto json = run("solve " + model("case1_sigma1.toml") + " --beta 4");
  const auto csv = run("solve " + model("case1_sigma1.toml") + " --beta 4 --format csv");
  REQUIRE(json.code == 0);
  REQUIRE(csv.code == 0);
  const auto lines = split(csv.out, '\n');
  REQUIRE(lines.size() == 2u);
  const auto head = split(lines[0], ',');
  const auto row = split(lines[1], ',');
  REQUIRE(head.size() == row.size());
  for (std::size_t i = 0; i < head.size(); ++i) {
    CAPTURE(head[i]);
    CHECK(json_field(json.out, head[i]) == row[i]);
  }
  CHECK(std::stod(json_field(json.out, "c1")) > 0.0);
  CHECK(json_field(json.out, "corner") == "false");
}

TEST_CASE("printed numbers round-trip to the same text") {
  const auto csv = run("value " + model("case1_sigma0.toml") +
                       " --beta 4 --x-grid 0:20:0.5 --format csv");
  REQUIRE(csv.code == 0);
  const auto lines = split(csv.out, '\n');
  CHECK(lines.size() == 42u);
  char buf[64];
  for (std::size_t i = 1; i < lines.size(); ++i)
    for (const auto& cell : split(lines[i], ',')) {
      std::snprintf(buf, sizeof buf, "%.12g", std::stod(cell));
      CHECK(std::stod(buf) == std::stod(cell));
      CHECK(cell.size() <= 19u);
    }
}

TEST_CASE("value defaults to the optimal policy on 400 points") {
  const auto csv = run("value " + model("case2_sigma0.toml") + " --beta 4 --format csv");
  REQUIRE(csv.code == 0);
  CHECK(split(csv.out, '\n').size() == 401u);
}

TEST_CASE("output file option") {
  const std::string path = std::string(DUALDIV_TMP_DIR) + "/cli_out.json";
  std::remove(path.c_str());
  const auto r = run("solve " + model("expjump.toml") + " --beta 4 --out " + path);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[16] = {};
  CHECK(std::fread(buf, 1, 1, f) == 1u);
  CHECK(buf[0] == '{');
  std::fclose(f);
}

TEST_CASE("simulate is reproducible from the seed") {
  const std::string args = "simulate " + model("expjump.toml") +
                           " --beta 4 --policy 0,4.85 --x 2 --paths 2000 --seed 17";
  const auto a = run(args);
  const auto b = run(args + " --threads 3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json_field(a.out, "seed") == "17");
  CHECK(json_field(a.out, "paths") == "2000");
}

TEST_CASE("sweep-beta ends with the benchmark row") {
  const auto csv = run("sweep-beta " + model("case1_sigma1.toml") + " --betas 5,1 --format csv");
  REQUIRE(csv.code == 0);
  const auto lines = split(csv.out, '\n');
  REQUIRE(lines.size() == 4u);
  CHECK(lines[0] == "beta,c1,c2");
  const auto last = split(lines[3], ',');
  CHECK(last[0] == "0");
  CHECK(last[1] == last[2]);
}

TEST_CASE("surface dump") {
  const auto r = run("solve " + model("expjump.toml") +
                     " --beta 4 --dump-surface 8 --format csv");
  REQUIRE(r.code == 0);
  const auto lines = split(r.out, '\n');
  CHECK(lines[0] == "c1,c2,objective");
  CHECK(lines.size() == 29u);  // header plus c1 < c2 cells
}

TEST_CASE("check passes on shipped models") {
  CHECK(run("check " + model("expjump.toml")).code == 0);
  CHECK(run("check " + model("case1_sigma1.toml") + " --format csv").code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("solve " + model("expjump.toml")).code == 2);  // missing --beta
  CHECK(run("solve " + model("expjump.toml") + " --beta -1").code == 2);
  CHECK(run("solve --model /nonexistent.toml --beta 1").code == 2);
  CHECK(run("solve " + model("expjump.toml") + " --beta 1 --q 0").code == 2);
  CHECK(run("value " + model("expjump.toml") + " --beta 1 --policy 3,2 --x 1").code == 2);
  CHECK(run("simulate " + model("expjump.toml") +
            " --beta 1 --policy 0,3 --x 1 --paths 0 --seed 1").code == 2);
  CHECK(run("sweep-beta " + model("expjump.toml") + " --betas 1,2").code == 2);
}
