#include <catch_amalgamated.hpp>

#include <sstream>

#include "json.hpp"
#include "repdays/cli.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using repdays::cli::run_cli;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "repdays");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) { return testing::fresh_dir(fs::path(REPDAYS_SCRATCH) / name); }

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testing::slurp(e.path());
  return files;
}

void require_ok(const Outcome& o) {
  INFO(o.err);
  REQUIRE(o.code == 0);
}

}  // namespace

TEST_CASE("staged pipeline writes every artifact") {
  const auto dir = scratch("staged").string();
  require_ok(run({"synth", "--out", dir, "--days", "90", "--seed", "3"}));
  require_ok(run({"ingest", "--out", dir}));
  require_ok(run({"distances", "--out", dir, "--threads", "2"}));
  require_ok(run({"cluster", "--out", dir, "--k", "6"}));
  require_ok(run({"metrics", "--out", dir}));
  require_ok(run({"report", "--out", dir}));
  for (const char* f : {"data.csv", "labels.json", "dataset.json", "exclusions.json", "row_errors.json",
                        "distances.csv", "model.json", "validation.json", "validation.csv", "report.json",
                        "report.csv", "report.svg"})
    CHECK(fs::is_regular_file(fs::path(dir) / f));

  auto model = nlohmann::json::parse(testing::slurp(fs::path(dir) / "model.json"));
  CHECK(model["method"] == "ahc-average");
  CHECK(model["K"] == 6);

  require_ok(run({"cluster", "--out", dir, "--method", "kmeans", "--k", "4", "--seed", "5"}));
  model = nlohmann::json::parse(testing::slurp(fs::path(dir) / "model.json"));
  CHECK(model["method"] == "kmeans");

  require_ok(run({"cluster", "--out", dir, "--method", "ahc", "--linkage", "complete", "--k", "3"}));
  model = nlohmann::json::parse(testing::slurp(fs::path(dir) / "model.json"));
  CHECK(model["method"] == "ahc-complete");
}

TEST_CASE("missing upstream artifact exits 2 and names the file") {
  const auto dir = scratch("missing").string();
  auto o = run({"distances", "--out", dir});
  CHECK(o.code == 2);
  CHECK_THAT(o.err, ContainsSubstring("dataset.json"));
  auto j = nlohmann::json::parse(o.err);
  CHECK(j["error"]["code"] == 2);

  require_ok(run({"synth", "--out", dir, "--days", "30"}));
  require_ok(run({"ingest", "--out", dir}));
  o = run({"cluster", "--out", dir, "--k", "3"});
  CHECK(o.code == 2);
  CHECK_THAT(o.err, ContainsSubstring("distances.csv"));
  // kmeans does not need the distance matrix
  require_ok(run({"cluster", "--out", dir, "--k", "3", "--method", "kmeans"}));

  o = run({"ingest", "--out", dir, "--input", dir + "/nope.csv"});
  CHECK(o.code == 2);
  CHECK_THAT(o.err, ContainsSubstring("nope.csv"));
}

TEST_CASE("invalid configuration exits 1") {
  const auto dir = scratch("invalid").string();
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"synth", "--out", dir, "--bogus"}).code == 1);
  CHECK(run({"synth", "--out", dir, "--days", "ten"}).code == 1);
  CHECK(run({"synth", "--out", dir, "--start", "2021-02-30"}).code == 1);
  CHECK(run({"synth", "--out", dir, "--outlier-probability", "1.5"}).code == 1);

  require_ok(run({"synth", "--out", dir, "--days", "30"}));
  require_ok(run({"ingest", "--out", dir}));
  require_ok(run({"distances", "--out", dir}));
  CHECK(run({"cluster", "--out", dir, "--method", "ward"}).code == 1);
  CHECK(run({"cluster", "--out", dir, "--k", "31"}).code == 1);
  CHECK(run({"sweep", "--out", dir, "--k-range", "5..2"}).code == 1);
  CHECK(run({"sweep", "--out", dir, "--k-range", "2..30"}).code == 1);
  CHECK(run({"sweep", "--out", dir, "--k-range", "x"}).code == 1);
  require_ok(run({"cluster", "--out", dir, "--k", "3"}));
  CHECK(run({"report", "--out", dir, "--representative", "mean"}).code == 1);
  CHECK(run({"distances", "--out", dir, "--weights", "1,2,3"}).code == 1);
}

TEST_CASE("bad data exits 3") {
  const auto dir = scratch("baddata");
  testing::spit(dir / "empty.csv", "");
  auto o = run({"ingest", "--out", dir.string(), "--input", (dir / "empty.csv").string()});
  CHECK(o.code == 3);
  CHECK_THAT(o.err, ContainsSubstring("header"));

  testing::spit(dir / "flat.csv", "timestamp,x\n");
  std::string body = "timestamp,x\n";
  for (int h = 0; h < 24; ++h) body += "2021-01-01T" + std::string(h < 10 ? "0" : "") + std::to_string(h) + ":00,5\n";
  testing::spit(dir / "flat.csv", body);
  o = run({"ingest", "--out", dir.string(), "--input", (dir / "flat.csv").string()});
  CHECK(o.code == 3);
  CHECK_THAT(o.err, ContainsSubstring("constant"));
}

TEST_CASE("config file supplies flag values") {
  const auto dir = scratch("config");
  testing::spit(dir / "run.ini", "days = 45\nseed = 12\nwind = true\n");
  require_ok(run({"synth", "--config", (dir / "run.ini").string(), "--out", dir.string()}));
  auto labels = nlohmann::json::parse(testing::slurp(dir / "labels.json"));
  CHECK(testing::slurp(dir / "data.csv").rfind("timestamp,load,solar,wind\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : testing::slurp(dir / "data.csv")) lines += c == '\n';
  CHECK(lines == 1 + 45 * 24);
  CHECK(labels["seed"] == 12);

  // flags beat the file; a section named after the command applies to it only
  testing::spit(dir / "sections.ini", "days = 45\n[synth]\nseed = 13\n[cluster]\nk = 9\n");
  require_ok(run({"synth", "--config", (dir / "sections.ini").string(), "--out", dir.string(), "--days", "20"}));
  labels = nlohmann::json::parse(testing::slurp(dir / "labels.json"));
  CHECK(labels["seed"] == 13);
  CHECK(labels["n_days"] == 20);

  testing::spit(dir / "typo.ini", "dayz = 45\n");
  CHECK(run({"synth", "--config", (dir / "typo.ini").string(), "--out", dir.string()}).code == 1);
  CHECK(run({"synth", "--config", (dir / "absent.ini").string(), "--out", dir.string()}).code == 1);
}

TEST_CASE("two runs with the same seed give byte-identical trees") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    require_ok(run({"synth", "--out", dir.string(), "--days", "80", "--seed", "21"}));
    require_ok(run({"run", "--out", dir.string(), "--k", "5", "--method", "kmeans", "--seed", "21"}));
  }
  CHECK(tree(a) == tree(b));
}

TEST_CASE("chained commands equal the single run command") {
  const auto chained = scratch("chained"), single = scratch("single");
  for (const auto& dir : {chained, single})
    require_ok(run({"synth", "--out", dir.string(), "--days", "70", "--seed", "8"}));
  const std::vector<std::string> flags{"--out", chained.string(), "--k", "7", "--window", "3"};
  for (const char* cmd : {"ingest", "distances", "cluster", "metrics", "report"}) {
    auto args = flags;
    args.insert(args.begin(), cmd);
    require_ok(run(args));
  }
  require_ok(run({"run", "--out", single.string(), "--k", "7", "--window", "3"}));
  CHECK(tree(chained) == tree(single));
}

TEST_CASE("sweep writes one row per method and K") {
  const auto dir = scratch("sweep");
  require_ok(run({"synth", "--out", dir.string(), "--days", "100", "--seed", "2"}));
  require_ok(run({"ingest", "--out", dir.string()}));
  require_ok(run({"distances", "--out", dir.string()}));
  require_ok(run({"sweep", "--out", dir.string(), "--restarts", "2"}));
  std::istringstream csv(testing::slurp(dir / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "method,k,ok,ss,cs,ch,db,silhouette,min_cluster_size,error");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 57);

  require_ok(run({"sweep", "--out", dir.string(), "--method", "ahc-average,kmeans", "--k-range", "3..6"}));
  auto j = nlohmann::json::parse(testing::slurp(dir / "sweep.json"));
  CHECK(j["rows"].size() == 8);
}

TEST_CASE("help exits 0") {
  auto o = run({"--help"});
  CHECK(o.code == 0);
  CHECK_THAT(o.out, ContainsSubstring("sweep"));
  o = run({"cluster", "--help"});
  CHECK(o.code == 0);
  CHECK_THAT(o.out, ContainsSubstring("--k-range"));
}

TEST_CASE("k range parsing") {
  CHECK(repdays::cli::parse_k_range("2..20") == std::pair<std::size_t, std::size_t>{2, 20});
  CHECK_THROWS(repdays::cli::parse_k_range("2-20"));
  CHECK_THROWS(repdays::cli::parse_k_range("..3"));
}
