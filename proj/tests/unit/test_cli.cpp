#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "derivroots/errors.hpp"
#include "derivroots/serialization.hpp"
#include "svg.hpp"

using namespace derivroots;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("derivroots-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

fs::path only_subdir(const fs::path& dir) {
  std::vector<fs::path> subs;
  for (const auto& e : fs::directory_iterator(dir)) subs.push_back(e.path());
  REQUIRE(subs.size() == 1);
  return subs[0];
}

}  // namespace

TEST_CASE("scatter with a single point has one marker") {
  const std::string svg = cli::render_scatter({{1, 0, 0, 0.0, 1}});
  CHECK(count(svg, "class=\"marker\"") == 1);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "class=\"legend-entry\"") == 1);
  CHECK_THROWS_AS(cli::render_scatter({}), ValidationError);
}

TEST_CASE("scatter output is deterministic with one legend entry per layer") {
  std::vector<ScatterPoint> pts;
  for (int i = 0; i < 30; ++i) {
    pts.push_back({110, 0, static_cast<std::size_t>(i % 3 == 2 ? 5 : i % 3), std::polar(1.0, 0.2 * i), 1});
  }
  const std::string a = cli::render_scatter(pts);
  CHECK(a == cli::render_scatter(pts));
  CHECK(count(a, "class=\"marker\"") == 30);
  CHECK(count(a, "class=\"legend-entry\"") == 3);
  CHECK(a.find("fill=\"black\"") != std::string::npos);
  CHECK(a.find("fill=\"blue\"") != std::string::npos);
  CHECK(a.find("fill=\"red\"") != std::string::npos);
  cli::ScatterStyle style = cli::style_from_json(Json::parse(R"({"title": "panel", "width": 300, "height": 300})"));
  CHECK(style.width == 300);
  CHECK(cli::render_scatter(pts, style).find("panel") != std::string::npos);
}

TEST_CASE("locate_field finds nested keys") {
  const std::string src = "{\n  \"measure\": {\n    \"type\": \"mixture\",\n    \"components\": [\n"
                          "      {\"weight\": 0.5},\n      {\"weight\": 0.4}\n    ]\n  },\n  \"trials\": 3\n}\n";
  CHECK(cli::locate_field(src, "trials") == 9);
  CHECK(cli::locate_field(src, "measure.components.weight") == 5);
  CHECK(cli::locate_field(src, "measure.type") == 3);
  CHECK(cli::locate_field(src, "missing") == 0);
}

TEST_CASE("unique run directories") {
  const fs::path base = scratch("unique");
  const fs::path a = cli::make_unique_directory(base, "run");
  const fs::path b = cli::make_unique_directory(base, "run");
  CHECK(a.filename() == "run");
  CHECK(b.filename() == "run-2");
}

TEST_CASE("validate rejects a mixture whose weights sum to 0.9") {
  const fs::path dir = scratch("validate");
  write(dir / "bad.json", R"({
  "experiment": "convergence",
  "measure": {"type": "mixture", "components": [
    {"weight": 0.5, "measure": {"type": "uniform_circle", "center": [0, 0], "radius": 1}},
    {"weight": 0.4, "measure": {"type": "uniform_disk", "center": [3, 0], "radius": 0.1}}
  ]},
  "n_grid": [50], "k_rule": {"kind": "fixed", "c": 2}, "trials": 1, "seed": 1
})");
  const Result r = invoke({"validate", "--config", (dir / "bad.json").string()});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("components") != std::string::npos);
  CHECK(r.err.find("weight") != std::string::npos);
  CHECK(r.err.find("bad.json:4") != std::string::npos);

  write(dir / "broken.json", "{\n  \"n_grid\": [50,\n}\n");
  const Result b = invoke({"validate", "--config", (dir / "broken.json").string()});
  CHECK(b.code == cli::kExitConfig);
  CHECK(b.err.find("invalid JSON") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(invoke({}).code == cli::kExitConfig);
  CHECK(invoke({"convergence"}).code == cli::kExitConfig);
  CHECK(invoke({"frobnicate"}).code == cli::kExitConfig);
  CHECK(invoke({"convergence", "--config", "/nonexistent/x.json"}).code == cli::kExitConfig);
  CHECK(invoke({"counterexample", "--q", "1.5"}).code == cli::kExitConfig);
}

TEST_CASE("counterexample prints JSON") {
  const fs::path dir = scratch("counter");
  const Result r = invoke({"counterexample", "--q", "0.3333333333", "--k", "8", "--trials", "20000", "--seed", "7",
                           "--out", dir.string()});
  REQUIRE(r.code == cli::kExitOk);
  const Json j = Json::parse(r.out);
  CHECK(j.contains("p_exact"));
  CHECK(j.contains("p_hat"));
  CHECK(j["m"] == 26);
  const fs::path run = only_subdir(dir);
  CHECK(run.filename().string().rfind("counterexample-", 0) == 0);
  CHECK(run.filename().string().find("-s7") != std::string::npos);
  CHECK(fs::exists(run / "manifest.json"));
  CHECK(fs::exists(run / "report.json"));
}

TEST_CASE("convergence run writes its artifacts and replays a trial") {
  const fs::path dir = scratch("convergence");
  write(dir / "cfg.json", R"({
  "experiment": "convergence",
  "measure": {"type": "uniform_circle", "center": [0, 0], "radius": 1},
  "n_grid": [30], "k_rule": {"kind": "fixed", "c": 2}, "trials": 3, "seed": 11, "mobius_maps": 2
})");
  const Result r = invoke({"convergence", "--config", (dir / "cfg.json").string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == cli::kExitOk);
  const fs::path run = only_subdir(dir / "out");
  const Json report = Json::parse(slurp(run / "report.json"));
  CHECK(report["config"]["seed"] == 11);
  CHECK(report["manifest"]["experiment"] == "convergence");
  const auto records = records_from_csv(slurp(run / "records.csv"));
  REQUIRE(records.size() == 3);

  const Result replay = invoke({"convergence", "--config", (dir / "cfg.json").string(), "--out",
                                (dir / "replay").string(), "--replay", std::to_string(records[1].seed), "--n", "30"});
  REQUIRE(replay.code == cli::kExitOk);
  const auto again = records_from_csv(slurp(only_subdir(dir / "replay") / "records.csv"));
  REQUIRE(again.size() == 1);
  CHECK(again[0].metrics == records[1].metrics);
}

TEST_CASE("runtime failures exit 1 with a replay hint") {
  const fs::path dir = scratch("failure");
  write(dir / "cfg.json", R"({
  "measure": {"type": "uniform_circle", "center": [0, 0], "radius": 1},
  "n_grid": [20], "k_rule": {"kind": "fixed", "c": 2}, "trials": 1, "seed": 3, "reference_size": 6000
})");
  const Result r = invoke({"convergence", "--config", (dir / "cfg.json").string(), "--out", (dir / "out").string()});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("replay with: --replay ") != std::string::npos);
  CHECK(r.err.find("--n 20") != std::string::npos);
}

TEST_CASE("perturbation writes a byte-stable figure") {
  const fs::path dir = scratch("perturbation");
  write(dir / "fig.json", R"({
  "experiment": "perturbation",
  "mu": {"type": "uniform_circle", "center": [0, 0], "radius": 1},
  "nu": {"type": "uniform_disk", "center": [3, 0], "radius": 0.1},
  "alpha": {"c": 0.2, "exponent": 0},
  "deterministic_split": true,
  "k_rule": {"kind": "fixed", "c": 3},
  "n_grid": [20], "trials": 2, "seed": 1
})");
  std::string first;
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("out" + std::to_string(i));
    REQUIRE(invoke({"perturbation", "--config", (dir / "fig.json").string(), "--out", out.string()}).code ==
            cli::kExitOk);
    const fs::path run = only_subdir(out);
    const std::string svg = slurp(run / "scatter_n20.svg");
    CHECK(count(svg, "class=\"legend-entry\"") == 3);
    CHECK(count(svg, "class=\"marker\"") > 0);
    CHECK(fs::exists(run / "scatter.csv"));
    if (i == 0) first = svg;
    else CHECK(svg == first);
  }
}
