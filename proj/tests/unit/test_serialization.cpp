#include <cmath>
#include <limits>

#include "doctest.h"
#include "derivroots/errors.hpp"
#include "derivroots/serialization.hpp"

using namespace derivroots;
using namespace std::complex_literals;

namespace {

std::string field_of(const Json& j) {
  try {
    measure_from_json(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("doubles print with round-trip precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("measure json round trip") {
  const MeasureSpec spec = make_mixture({
      {0.5, make_discrete({0.0, {1.0, -2.0}}, {0.25, 0.75})},
      {0.25, make_cantor(0.0, {1.0, 1.0}, 0.3)},
      {0.25, make_mixture({{0.5, make_circle(1i, 2.0)}, {0.5, make_disk(-1.0, 0.5)}})},
  });
  const Json j = to_json(spec);
  CHECK(j["type"] == "mixture");
  const MeasureSpec back = measure_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(complex_from_json(Json(2.5), "x") == Complex(2.5));
}

TEST_CASE("measure json errors name the field") {
  CHECK(field_of(Json::parse(R"({"type": "uniform_disk", "center": [0, 0], "radius": -1})")) == "measure.radius");
  CHECK(field_of(Json::parse(R"({"type": "uniform_disk", "center": [0, 0], "radius": 1, "extra": 2})")) ==
        "measure.extra");
  CHECK(field_of(Json::parse(R"({"type": "blob"})")) == "measure.type");
  CHECK(field_of(Json::parse(R"({"type": "mixture", "components": [
      {"weight": 0.5, "measure": {"type": "uniform_circle", "center": 0, "radius": 1}},
      {"weight": 0.4, "measure": {"type": "uniform_circle", "center": 0, "radius": 1}}]})")) ==
        "measure.components.weight");
  CHECK(field_of(Json::parse(R"({"type": "mixture", "components": [
      {"weight": 0.5, "measure": {"type": "uniform_circle", "center": 0, "radius": 1}},
      {"weight": 0.5, "measure": {"type": "uniform_circle", "center": "x", "radius": 1}}]})")) ==
        "measure.components[1].measure.center");
}

TEST_CASE("experiment config round trip") {
  ExperimentConfig cfg;
  cfg.measure = make_circle(0.0, 1.0);
  cfg.n_grid = {100, 400};
  cfg.k_rule = {KRuleKind::n_over_log_squared, 1.0};
  cfg.trials = 20;
  cfg.seed = 123456789012345ULL;
  cfg.epsilon = 0.5;
  cfg.eval_point = {2.0, 0.5};
  cfg.k_values = {1, 3};
  const Json j = to_json(cfg);
  const ExperimentConfig back = experiment_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.seed == cfg.seed);
  CHECK(back.eval_point == cfg.eval_point);

  Json bad = j;
  bad["trails"] = 3;
  CHECK_THROWS_AS(experiment_config_from_json(bad), ValidationError);
  CHECK_NOTHROW(experiment_config_from_json(bad, {"trails"}));
  bad = j;
  bad["k_rule"]["kind"] = "cubic";
  CHECK_THROWS_AS(experiment_config_from_json(bad), ValidationError);
}

TEST_CASE("perturbation and frostman configs round trip") {
  PerturbationConfig p;
  p.mu = make_circle(0.0, 1.0);
  p.nu = make_disk(3.0, 0.1);
  p.alpha = {1.0 / 11.0, 0.0};
  p.k_rule = {KRuleKind::fixed, 5};
  p.n_grid = {110};
  p.trials = 10;
  p.deterministic_split = true;
  const Json pj = to_json(p);
  CHECK(to_json(perturbation_config_from_json(pj)) == pj);

  FrostmanConfig f;
  f.measure = make_cantor(0.0, 1.0, 1.0 / 3.0);
  f.r_grid = {0.1, 0.01};
  f.probes = {0.0};
  const Json fj = to_json(f);
  CHECK(to_json(frostman_config_from_json(fj)) == fj);
}

TEST_CASE("csv round trips") {
  const RootSet roots{{{0.1, -0.2}, {1.0 / 3.0, 0.0}}, {1, 4}};
  const RootSet back = rootset_from_csv(rootset_csv(roots));
  CHECK(back.points == roots.points);
  CHECK(back.multiplicities == roots.multiplicities);
  CHECK(rootset_csv(roots).rfind("re,im,multiplicity\n", 0) == 0);

  const std::vector<ScatterPoint> pts{{110, 0, 0, {0.5, 0.25}, 1}, {110, 3, 5, {-1.0 / 7.0, 2.0}, 2}};
  const auto sp = scatter_from_csv(scatter_csv(pts));
  REQUIRE(sp.size() == 2);
  CHECK(sp[1].z == pts[1].z);
  CHECK(sp[1].order == 5);
  CHECK(sp[1].multiplicity == 2);

  TrialReport r;
  r.records.push_back({10, 0, 18446744073709551615ULL, 2, {{"a", 0.1}, {"b", -INFINITY}}, 0.25});
  const auto recs = records_from_csv(records_csv(r));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].seed == 18446744073709551615ULL);
  CHECK(recs[0].metrics[0].second == 0.1);
  CHECK(std::isinf(recs[0].metrics[1].second));
}

TEST_CASE("audit record layout") {
  JensenAudit a;
  a.lhs = 0.5;
  a.rhs = 1.0;
  a.slack = 0.5;
  const Json j = audit_record(a, MobiusMap{{1.0, 2.0}, 3.0, 4.0, 5.0}, 50, 3, 7);
  CHECK(j["u"].size() == 8);
  CHECK(j["u"][1] == 2.0);
  CHECK(j["n"] == 50);
  CHECK(j["slack"] == 0.5);
}

TEST_CASE("report json uses null for non-finite values") {
  TrialReport r;
  r.experiment = "x";
  r.summary.push_back({"n=1", {{"v", INFINITY}}});
  const Json j = to_json(r);
  CHECK(j.dump().find("null") != std::string::npos);
}
