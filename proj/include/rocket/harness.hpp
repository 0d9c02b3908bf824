#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rocket/edge_inference.hpp"
#include "rocket/synthetic_data.hpp"

namespace rocket {

enum class Estimator { Rocket, Pearson, Npn, PseudoScore };

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& name);

struct Scenario {
    GraphSpec graph = GraphSpec::grid(10, 0.24);
    RadiusLaw radius = RadiusLaw::chi();
    bool marginals = false; // apply the standard five-transform cycle
    std::optional<ContaminationSpec> contamination;
};

struct EdgeTarget {
    Index a = 0;
    Index b = 0;
};

struct ExperimentConfig {
    Scenario scenario;
    Index n = 400;
    int replications = 500;
    double alpha = 0.05;
    std::optional<double> lambda; // unset = default_lambda(n, p)
    std::uint64_t seed = 0;
    std::size_t threads = 0; // 0 = ROCKET_THREADS env or hardware
    std::vector<Estimator> estimators{Estimator::Rocket};
    std::vector<EdgeTarget> edges;

    std::vector<double> power_rhos;  // power study grid
    int subsample_count = 25;        // L
    Index subsample_size = 50;       // n_sub
    double graph_threshold = 0.001;  // p-value cutoff for edge selection

    LassoConfig lasso_config(Index p) const;
};

// Config file format: '[section]' headers, 'key = value' lines, '#'
// comments. Grammar documented in the README; serialize_config emits text
// that parses back to an identical config.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// ---- coverage ----

struct CoverageRecord {
    Estimator estimator = Estimator::Rocket;
    Index a = 0;
    Index b = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    double truth = 0.0;
    double omega_hat = 0.0;
    double s_hat = 0.0;
    double z = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool covered = false;
    double width = 0.0;
    unsigned warnings = 0;
    bool numeric = true;  // false: excluded from aggregates
    std::string error;    // exception text when the estimator failed
};

struct CoverageAggregate {
    Estimator estimator = Estimator::Rocket;
    Index a = 0;
    Index b = 0;
    double truth = 0.0;
    int included = 0;
    int excluded = 0;
    double coverage_pct = 0.0;
    double mean_width = 0.0;
};

struct CoverageReport {
    ExperimentConfig config;
    std::vector<CoverageRecord> records; // ordered by (replication, estimator, edge)
    std::vector<CoverageAggregate> aggregates;
    double runtime_seconds = 0.0;
};

CoverageReport run_coverage(const ExperimentConfig& cfg);

// ---- studentized error sample (Q-Q data) ----

struct QQStats {
    Estimator estimator = Estimator::Rocket;
    int count = 0;
    double mean = 0.0;
    double variance = 0.0;  // divisor count-1
    double ks_distance = 0.0;
};

struct QQReport {
    ExperimentConfig config;
    // per estimator, the sorted studentized errors sqrt(n)(est-truth)/s
    // next to matched standard normal quantiles Phi^{-1}((i - 0.5)/count).
    std::vector<Estimator> estimators;
    std::vector<std::vector<double>> z_sorted;
    std::vector<std::vector<double>> normal_quantiles;
    std::vector<QQStats> stats;
    CoverageReport base;
};

// Requires exactly one target edge, so the output has replications x
// estimators rows.
QQReport run_qq(const ExperimentConfig& cfg);

// ---- power ----

struct PowerCell {
    Estimator estimator = Estimator::Rocket;
    double rho = 0.0;
    int included = 0;
    int excluded = 0;
    int rejections = 0;
    double power = 0.0;
};

struct PowerReport {
    ExperimentConfig config;
    std::vector<PowerCell> cells; // ordered by (rho, estimator)
    double runtime_seconds = 0.0;
};

// Pair design: tests H0: omega_12 = 0 for each rho in config.power_rhos.
PowerReport run_power(const ExperimentConfig& cfg);

// ---- disjoint-subsample variance protocol ----

struct SubsampleRow {
    Estimator estimator = Estimator::Rocket;
    Index a = 0;
    Index b = 0;
    double sample_var = 0.0;
    double band_prop = 0.0; // fraction with |z - mean| <= 1.6449 sqrt(1 - 1/L)
    int used = 0;
};

struct SubsampleReport {
    ExperimentConfig config;
    std::vector<SubsampleRow> rows;
    // cross-pair means per estimator, aligned with config.estimators
    std::vector<double> mean_sample_var;
    std::vector<double> mean_band_prop;
    double runtime_seconds = 0.0;
};

// Splits L * n_sub rows (seeded random disjoint sets) out of `x` and runs
// every estimator on every node pair in every subsample.
SubsampleReport run_subsample(const DataMatrix& x, const ExperimentConfig& cfg);
// Same, on data generated from cfg.scenario.
SubsampleReport run_subsample_synthetic(const ExperimentConfig& cfg);

// ---- whole-graph estimation ----

struct PairInference {
    Index a = 0;
    Index b = 0;
    double omega_hat = 0.0;
    double s_hat = 0.0;
    double z = 0.0;
    double p_value = 0.0;
    unsigned warnings = 0;
    bool ok = true;
    std::string error;
};

struct GraphReport {
    double threshold = 0.0;
    std::vector<PairInference> pairs; // all C(p,2), ordered (a, b) ascending
    std::vector<EdgeTarget> edges;    // pairs passing p < threshold
    std::size_t lasso_reuse_count = 0;
    double runtime_seconds = 0.0;
};

GraphReport estimate_graph(const DataMatrix& x, double threshold, const LassoConfig& cfg,
                           double alpha = 0.05, std::size_t threads = 0);

// ---- output writers ----

void write_coverage_records_csv(const CoverageReport& report, std::ostream& os);
void write_coverage_summary_csv(const CoverageReport& report, std::ostream& os);
void write_qq_csv(const QQReport& report, std::ostream& os);
void write_power_csv(const PowerReport& report, std::ostream& os);
void write_subsample_csv(const SubsampleReport& report, std::ostream& os);
void write_graph_pairs_csv(const GraphReport& report, std::ostream& os);

std::string coverage_report_json(const CoverageReport& report, const std::string& command);
std::string qq_report_json(const QQReport& report, const std::string& command);
std::string power_report_json(const PowerReport& report, const std::string& command);
std::string subsample_report_json(const SubsampleReport& report, const std::string& command);
std::string graph_report_json(const GraphReport& report, const std::string& command);

} // namespace rocket
