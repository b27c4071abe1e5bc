#include <cmath>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#include "edumine/artifact.hpp"
#include "edumine/pipeline.hpp"
#include "edumine/random.hpp"

using namespace edumine;
using testing::Builder;
using testing::TempDir;

namespace {

Dataset mixed_data(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n), y(n);
  std::vector<std::string> g(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform() < 0.05 ? NAN : rng.normal() * 10 + 50;
    const auto k = rng.below(4);
    g[i] = rng.uniform() < 0.05 ? "" : std::string(1, static_cast<char>('a' + k));
    b[i] = rng.uniform() < 0.5 ? "yes" : "no";
    y[i] = 40 + (std::isnan(x[i]) ? 0.0 : 0.3 * x[i]) + 3.0 * static_cast<double>(k) + (b[i] == "yes" ? 5 : 0) +
           rng.normal();
  }
  return Builder(n)
      .interval("x", x)
      .categorical("g", g)
      .categorical("b", b, Level::binary)
      .interval("y", y, Role::target)
      .build();
}

}  // namespace

TEST_CASE("artifacts round-trip with identical predictions") {
  const auto d = mixed_data(300, 5);
  PipelineConfig cfg;
  cfg.neural.max_epochs = 60;
  const auto trained = train_candidates(d, "y", cfg);
  TempDir dir("artifact");
  for (const auto& a : trained.artifacts) {
    INFO(to_string(a.kind));
    const auto path = dir / (std::string(to_string(a.kind)) + ".json");
    save_artifact(path, a);
    const auto back = load_artifact(path);
    CHECK(back.kind == a.kind);
    CHECK(back.target == "y");
    CHECK(back.seed == a.seed);
    CHECK(back.schema_fingerprint() == a.schema_fingerprint());
    CHECK(back.validation_ase == a.validation_ase);
    CHECK(back.inputs() == a.inputs());
    const auto p1 = predict(a, d), p2 = predict(back, d);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
    // saving again gives the same document
    CHECK(to_json(back).dump() == to_json(a).dump());
  }
}

TEST_CASE("tampered or malformed artifacts are rejected") {
  const auto d = mixed_data(120, 6);
  PipelineConfig cfg;
  cfg.neural.max_epochs = 5;
  const auto trained = train_candidates(d, "y", cfg);
  for (const auto& a : trained.artifacts) {
    auto doc = to_json(a);
    doc["schema_fingerprint"] = "0000000000000000";
    CHECK_THROWS_AS(artifact_from_json(doc), DataError);
  }
  CHECK_THROWS_AS(artifact_from_json(nlohmann::json::object()), DataError);
  CHECK_THROWS_AS(parse_model_kind("forest"), DataError);

  TempDir dir("artifact_bad");
  CHECK_THROWS_AS(load_artifact(dir / "absent.json"), IoError);
  {
    std::ofstream(dir / "junk.json") << "not json";
  }
  CHECK_THROWS_AS(load_artifact(dir / "junk.json"), DataError);
}

TEST_CASE("scoring data must carry the model inputs") {
  const auto d = mixed_data(120, 7);
  PipelineConfig cfg;
  cfg.neural.max_epochs = 5;
  const auto trained = train_candidates(d, "y", cfg);
  const auto lacking = Builder(2).interval("x", {1, 2}).build();
  for (const auto& a : trained.artifacts) {
    if (a.inputs().size() < 2) continue;
    try {
      predict(a, lacking);
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find('g') != std::string::npos);
    }
  }
}
