#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>

#include "rocket/csv.hpp"
#include "rocket/harness.hpp"

namespace rocket {

namespace {

using json = nlohmann::json;
using csv::format_double;

std::string fmt_index(Index v) { return std::to_string(v + 1); } // 1-based in outputs

json config_json(const ExperimentConfig& cfg) {
    return json{{"text", serialize_config(cfg)}};
}

json json_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

} // namespace

void write_coverage_records_csv(const CoverageReport& report, std::ostream& os) {
    csv::write_row(os, {"estimator", "a", "b", "replication", "seed", "truth", "omega_hat", "s_hat",
                        "z", "ci_lo", "ci_hi", "covered", "width", "warnings", "numeric", "error"});
    for (const auto& r : report.records) {
        csv::write_row(os, {to_string(r.estimator), fmt_index(r.a), fmt_index(r.b),
                            std::to_string(r.replication), std::to_string(r.seed),
                            format_double(r.truth), format_double(r.omega_hat),
                            format_double(r.s_hat), format_double(r.z), format_double(r.ci_lo),
                            format_double(r.ci_hi), r.covered ? "1" : "0", format_double(r.width),
                            std::to_string(r.warnings), r.numeric ? "1" : "0", r.error});
    }
}

void write_coverage_summary_csv(const CoverageReport& report, std::ostream& os) {
    csv::write_row(os, {"estimator", "a", "b", "truth", "included", "excluded", "coverage_pct",
                        "mean_width"});
    for (const auto& a : report.aggregates) {
        csv::write_row(os, {to_string(a.estimator), fmt_index(a.a), fmt_index(a.b),
                            format_double(a.truth), std::to_string(a.included),
                            std::to_string(a.excluded), format_double(a.coverage_pct),
                            format_double(a.mean_width)});
    }
}

void write_qq_csv(const QQReport& report, std::ostream& os) {
    csv::write_row(os, {"estimator", "idx", "z_error", "normal_quantile"});
    for (std::size_t ei = 0; ei < report.estimators.size(); ++ei) {
        for (std::size_t i = 0; i < report.z_sorted[ei].size(); ++i) {
            csv::write_row(os, {to_string(report.estimators[ei]), std::to_string(i + 1),
                                format_double(report.z_sorted[ei][i]),
                                format_double(report.normal_quantiles[ei][i])});
        }
    }
}

void write_power_csv(const PowerReport& report, std::ostream& os) {
    csv::write_row(os, {"estimator", "rho", "included", "excluded", "rejections", "power"});
    for (const auto& c : report.cells) {
        csv::write_row(os, {to_string(c.estimator), format_double(c.rho), std::to_string(c.included),
                            std::to_string(c.excluded), std::to_string(c.rejections),
                            format_double(c.power)});
    }
}

void write_subsample_csv(const SubsampleReport& report, std::ostream& os) {
    csv::write_row(os, {"estimator", "a", "b", "used", "sample_var", "band_prop"});
    for (const auto& r : report.rows) {
        csv::write_row(os, {to_string(r.estimator), fmt_index(r.a), fmt_index(r.b),
                            std::to_string(r.used), format_double(r.sample_var),
                            format_double(r.band_prop)});
    }
}

void write_graph_pairs_csv(const GraphReport& report, std::ostream& os) {
    csv::write_row(os, {"a", "b", "omega_hat", "s_hat", "z", "p_value", "warnings", "ok", "error"});
    for (const auto& pr : report.pairs) {
        csv::write_row(os, {fmt_index(pr.a), fmt_index(pr.b), format_double(pr.omega_hat),
                            format_double(pr.s_hat), format_double(pr.z), format_double(pr.p_value),
                            std::to_string(pr.warnings), pr.ok ? "1" : "0", pr.error});
    }
}

std::string coverage_report_json(const CoverageReport& report, const std::string& command) {
    json aggregates = json::array();
    for (const auto& a : report.aggregates) {
        aggregates.push_back(json{{"estimator", to_string(a.estimator)},
                                  {"a", a.a + 1},
                                  {"b", a.b + 1},
                                  {"truth", a.truth},
                                  {"included", a.included},
                                  {"excluded", a.excluded},
                                  {"coverage_pct", a.coverage_pct},
                                  {"mean_width", a.mean_width}});
    }
    json out{{"format_version", 1},
             {"command", command},
             {"config", config_json(report.config)},
             {"aggregates", aggregates},
             {"runtime_seconds", report.runtime_seconds}};
    return out.dump(2);
}

std::string qq_report_json(const QQReport& report, const std::string& command) {
    json stats = json::array();
    for (const auto& s : report.stats) {
        stats.push_back(json{{"estimator", to_string(s.estimator)},
                             {"count", s.count},
                             {"mean", s.mean},
                             {"variance", s.variance},
                             {"ks_distance", s.ks_distance}});
    }
    json out{{"format_version", 1},
             {"command", command},
             {"config", config_json(report.config)},
             {"stats", stats},
             {"runtime_seconds", report.base.runtime_seconds}};
    return out.dump(2);
}

std::string power_report_json(const PowerReport& report, const std::string& command) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back(json{{"estimator", to_string(c.estimator)},
                             {"rho", c.rho},
                             {"included", c.included},
                             {"excluded", c.excluded},
                             {"rejections", c.rejections},
                             {"power", c.power}});
    }
    json out{{"format_version", 1},
             {"command", command},
             {"config", config_json(report.config)},
             {"cells", cells},
             {"runtime_seconds", report.runtime_seconds}};
    return out.dump(2);
}

std::string subsample_report_json(const SubsampleReport& report, const std::string& command) {
    json means = json::array();
    for (std::size_t ei = 0; ei < report.config.estimators.size(); ++ei) {
        means.push_back(json{{"estimator", to_string(report.config.estimators[ei])},
                             {"mean_sample_var", json_or_null(report.mean_sample_var[ei])},
                             {"mean_band_prop", json_or_null(report.mean_band_prop[ei])}});
    }
    json out{{"format_version", 1},
             {"command", command},
             {"config", config_json(report.config)},
             {"estimator_means", means},
             {"pair_count", report.rows.size() / report.config.estimators.size()},
             {"runtime_seconds", report.runtime_seconds}};
    return out.dump(2);
}

std::string graph_report_json(const GraphReport& report, const std::string& command) {
    json edges = json::array();
    for (const auto& e : report.edges) edges.push_back(json::array({e.a + 1, e.b + 1}));
    json out{{"format_version", 1},
             {"command", command},
             {"threshold", report.threshold},
             {"pair_count", report.pairs.size()},
             {"edge_count", report.edges.size()},
             {"edges", edges},
             {"lasso_reuse_count", report.lasso_reuse_count},
             {"runtime_seconds", report.runtime_seconds}};
    return out.dump(2);
}

} // namespace rocket
