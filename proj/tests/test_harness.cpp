#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "doctest.h"
#include "rocket/harness.hpp"

using namespace rocket;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.scenario.graph = GraphSpec::grid(4, 0.2);
    cfg.scenario.radius = RadiusLaw::chi();
    cfg.n = 60;
    cfg.replications = 6;
    cfg.alpha = 0.05;
    cfg.seed = 4242;
    cfg.estimators = {Estimator::Rocket, Estimator::Pearson};
    cfg.edges = {EdgeTarget{5, 6}, EdgeTarget{0, 15}};
    return cfg;
}

std::string records_csv(const CoverageReport& report) {
    std::ostringstream os;
    write_coverage_records_csv(report, os);
    return os.str();
}

} // namespace

TEST_CASE("config text round trip") {
    ExperimentConfig cfg = small_config();
    cfg.lambda = 0.31;
    cfg.scenario.marginals = true;
    cfg.scenario.contamination =
        ContaminationSpec{ContaminationSpec::Mechanism::Element, 0.05, 0};
    cfg.power_rhos = {0.0, 0.25, 0.5};
    const std::string text = serialize_config(cfg);
    const ExperimentConfig parsed = parse_config_text(text);
    CHECK(serialize_config(parsed) == text);
    CHECK(parsed.edges.size() == 2);
    CHECK(parsed.edges[0].a == 5);
    CHECK(parsed.estimators == cfg.estimators);
    CHECK(parsed.power_rhos == cfg.power_rhos);
    CHECK(*parsed.lambda == 0.31);
}

TEST_CASE("config parsing details") {
    const char* text = R"(
# comment
[scenario]
graph = grid
side = 10
weight = 0.24
radius = abs_t
radius_dof = 5

[run]
n = 400
replications = 3
seed = 7
estimators = rocket,npn
edges = (2,2)-(2,3); 1-100
)";
    const auto cfg = parse_config_text(text);
    CHECK(cfg.scenario.graph.side == 10);
    CHECK(cfg.scenario.radius.kind == RadiusLaw::Kind::AbsT);
    CHECK(cfg.edges[0].a == 11); // node (2,2) of a 10-grid
    CHECK(cfg.edges[0].b == 12);
    CHECK(cfg.edges[1].a == 0);
    CHECK(cfg.edges[1].b == 99);

    CHECK_THROWS_AS(parse_config_text("[run]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[run]\nedges = 1-200\n"), ConfigError); // out of range
    CHECK_THROWS_AS(parse_config_text("[run]\nalpha = 1.5\n"), ConfigError);
}

TEST_CASE("coverage run is reproducible and thread-count invariant") {
    ExperimentConfig cfg = small_config();
    cfg.threads = 1;
    const auto r1 = run_coverage(cfg);
    cfg.threads = 4;
    const auto r4 = run_coverage(cfg);
    const auto r1b = run_coverage(cfg);

    CHECK(records_csv(r1) == records_csv(r4));
    CHECK(records_csv(r4) == records_csv(r1b));

    std::ostringstream s1, s4;
    write_coverage_summary_csv(r1, s1);
    write_coverage_summary_csv(r4, s4);
    CHECK(s1.str() == s4.str());
}

TEST_CASE("coverage accounting") {
    const auto report = run_coverage(small_config());
    REQUIRE(report.records.size() == 6 * 2 * 2);
    REQUIRE(report.aggregates.size() == 4);

    for (const auto& agg : report.aggregates) {
        double width_sum = 0.0;
        int covered = 0, included = 0;
        for (const auto& rec : report.records) {
            if (rec.estimator != agg.estimator || rec.a != agg.a || rec.b != agg.b) continue;
            if (!rec.numeric) continue;
            ++included;
            width_sum += rec.width;
            covered += rec.covered ? 1 : 0;
        }
        REQUIRE(included == agg.included);
        CHECK(agg.mean_width == doctest::Approx(width_sum / included).epsilon(1e-12));
        CHECK(agg.coverage_pct == doctest::Approx(100.0 * covered / included).epsilon(1e-12));
    }

    // every record carries its replication seed
    for (const auto& rec : report.records) CHECK(rec.seed == derive_seed(4242, rec.replication));
}

TEST_CASE("qq run bookkeeping") {
    ExperimentConfig cfg = small_config();
    cfg.edges = {EdgeTarget{5, 6}};
    cfg.replications = 8;
    const auto report = run_qq(cfg);
    REQUIRE(report.z_sorted.size() == 2);
    // row count = replications x estimators when nothing is excluded
    std::size_t rows = 0;
    for (const auto& z : report.z_sorted) rows += z.size();
    CHECK(rows == 8 * 2);
    for (const auto& z : report.z_sorted) CHECK(std::is_sorted(z.begin(), z.end()));

    ExperimentConfig bad = cfg;
    bad.edges = {EdgeTarget{5, 6}, EdgeTarget{0, 15}};
    CHECK_THROWS_AS(run_qq(bad), ConfigError);
}

TEST_CASE("power run on the pair design") {
    ExperimentConfig cfg;
    cfg.scenario.graph = GraphSpec::pair(6, 0.0);
    cfg.n = 150;
    cfg.replications = 40;
    cfg.seed = 99;
    cfg.estimators = {Estimator::Rocket};
    cfg.power_rhos = {0.0, 0.6};
    const auto report = run_power(cfg);
    REQUIRE(report.cells.size() == 2);
    CHECK(report.cells[0].rho == 0.0);
    CHECK(report.cells[1].rho == 0.6);
    // strong signal rejects more often than the null
    CHECK(report.cells[1].power > report.cells[0].power);
    CHECK(report.cells[1].power > 0.8);
    CHECK(report.cells[0].power < 0.3);
}

TEST_CASE("subsample protocol bookkeeping at minimal size") {
    ExperimentConfig cfg;
    cfg.scenario.graph = GraphSpec::grid_rect(2, 3, 0.2);
    cfg.seed = 31;
    cfg.estimators = {Estimator::Rocket};
    cfg.subsample_count = 2;
    cfg.subsample_size = 40;
    const auto report = run_subsample_synthetic(cfg);
    CHECK(report.rows.size() == 15); // C(6,2) pairs
    for (const auto& row : report.rows) CHECK(row.used == 2);
    CHECK(std::isfinite(report.mean_sample_var[0]));

    ExperimentConfig starved = cfg;
    starved.subsample_count = 50;
    const auto model = build_precision(starved.scenario.graph);
    const auto x = sample_elliptical(100, model.sigma, RadiusLaw::chi(), 1);
    CHECK_THROWS_AS(run_subsample(x, starved), InsufficientRows);
}

TEST_CASE("graph estimation") {
    SUBCASE("independent data yields few edges and all pairs") {
        const CorrelationMatrix eye(Matrix::Identity(12, 12));
        const auto x = sample_elliptical(400, eye, RadiusLaw::chi(), 606);
        LassoConfig cfg;
        cfg.lambda = default_lambda(400, 12);
        const auto report = estimate_graph(x, 0.001, cfg);
        CHECK(report.pairs.size() == 66); // C(12,2)
        CHECK(report.edges.size() <= 3);
    }
    SUBCASE("chain signal is detected") {
        const auto model = build_precision(GraphSpec::chain(10, 0.5));
        const auto x = sample_elliptical(1200, model.sigma, RadiusLaw::abs_t(5), 607);
        LassoConfig cfg;
        cfg.lambda = default_lambda(1200, 10);
        const auto report = estimate_graph(x, 0.001, cfg);
        int found = 0;
        for (const auto& e : report.edges)
            if (e.b == e.a + 1) ++found;
        CHECK(found >= 7); // of the 9 true chain edges
    }
}

TEST_CASE("json reports carry the format version and config echo") {
    const auto report = run_coverage(small_config());
    const auto parsed = nlohmann::json::parse(coverage_report_json(report, "simulate coverage"));
    CHECK(parsed["format_version"] == 1);
    CHECK(parsed["command"] == "simulate coverage");
    const auto echoed = parse_config_text(parsed["config"]["text"].get<std::string>());
    CHECK(serialize_config(echoed) == serialize_config(report.config));
    CHECK(parsed["aggregates"].size() == 4);
}
