// rocket: rank-based edge inference for latent precision matrices.
//
// Subcommands: simulate coverage|qq|power|subsample, estimate edge|graph,
// sample, tail. See README.md for the config grammar and output schemas.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rocket/baselines.hpp"
#include "rocket/csv.hpp"
#include "rocket/harness.hpp"
#include "rocket/normal.hpp"

namespace {

using namespace rocket;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonOptions {
    std::string config_path;
    std::string data_path; // subsample: run on this CSV instead of synthetic data
    std::string out_prefix = "rocket_out";
    std::optional<std::uint64_t> seed;
    std::optional<long> n;
    std::optional<long> replications;
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<long> threads;
    std::optional<std::string> estimators;
    std::optional<std::string> edges;
    bool full_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool seed_required) {
    cmd->add_option("--config", opt.config_path, "experiment config file");
    cmd->add_option("--out", opt.out_prefix, "output file prefix");
    auto* seed = cmd->add_option("--seed", opt.seed, "base seed for replication streams");
    if (seed_required) seed->required();
    cmd->add_option("--n", opt.n, "sample size per replication");
    cmd->add_option("--replications", opt.replications, "Monte Carlo replications");
    cmd->add_option("--alpha", opt.alpha, "two-sided level (default 0.05)");
    cmd->add_option("--lambda", opt.lambda, "penalty override (default 2.1 sqrt(ln p / n))");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = ROCKET_THREADS or hardware)");
    cmd->add_option("--estimators", opt.estimators,
                    "comma list from rocket,pearson,npn,pseudo_score");
    cmd->add_option("--edges", opt.edges, "semicolon list of target edges, e.g. '12-13;(2,2)-(2,3)'");
    cmd->add_flag("--full", opt.full_scale,
                  "paper-scale settings (p=900/1000, 1000 replications; hours of runtime)");
}

ExperimentConfig build_config(const CommonOptions& opt) {
    ExperimentConfig cfg;
    if (!opt.config_path.empty()) cfg = parse_config_file(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.n) cfg.n = *opt.n;
    if (opt.replications) cfg.replications = static_cast<int>(*opt.replications);
    if (opt.alpha) cfg.alpha = *opt.alpha;
    if (opt.lambda) cfg.lambda = *opt.lambda;
    if (opt.threads) cfg.threads = static_cast<std::size_t>(*opt.threads);
    if (opt.estimators) {
        cfg.estimators.clear();
        std::string patch = "[run]\nestimators = " + *opt.estimators + "\n";
        cfg.estimators = parse_config_text(patch).estimators;
    }
    if (opt.edges) {
        // reuse the config parser for edge syntax, against this scenario
        ExperimentConfig probe = cfg;
        std::string text = serialize_config(probe);
        text += "\n[run]\nedges = " + *opt.edges + "\n";
        cfg.edges = parse_config_text(text).edges;
    }
    if (opt.full_scale) {
        switch (cfg.scenario.graph.kind) {
            case GraphSpec::Kind::Grid:
            case GraphSpec::Kind::GridRect:
                cfg.scenario.graph = GraphSpec::grid(30, cfg.scenario.graph.weight);
                break;
            case GraphSpec::Kind::Chain:
                cfg.scenario.graph = GraphSpec::chain(1000, cfg.scenario.graph.weight);
                break;
            case GraphSpec::Kind::Pair:
                cfg.scenario.graph = GraphSpec::pair(1000, cfg.scenario.graph.weight);
                break;
        }
        cfg.replications = 1000;
    }
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << content;
}

template <typename WriteFn>
void write_csv_file(const std::string& path, WriteFn&& fn) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open " + path + " for writing");
    fn(os);
}

int run_simulate(const std::string& mode, const CommonOptions& opt) {
    ExperimentConfig cfg = build_config(opt);
    if (mode == "coverage") {
        const CoverageReport report = run_coverage(cfg);
        write_csv_file(opt.out_prefix + "_records.csv",
                       [&](std::ostream& os) { write_coverage_records_csv(report, os); });
        write_csv_file(opt.out_prefix + "_summary.csv",
                       [&](std::ostream& os) { write_coverage_summary_csv(report, os); });
        write_file(opt.out_prefix + "_report.json", coverage_report_json(report, "simulate coverage"));
        for (const auto& a : report.aggregates) {
            std::cout << to_string(a.estimator) << " edge " << (a.a + 1) << "-" << (a.b + 1)
                      << ": coverage " << a.coverage_pct << "% mean width " << a.mean_width
                      << " (included " << a.included << ", excluded " << a.excluded << ")\n";
        }
    } else if (mode == "qq") {
        const QQReport report = run_qq(cfg);
        write_csv_file(opt.out_prefix + "_qq.csv",
                       [&](std::ostream& os) { write_qq_csv(report, os); });
        write_file(opt.out_prefix + "_report.json", qq_report_json(report, "simulate qq"));
        for (const auto& s : report.stats) {
            std::cout << to_string(s.estimator) << ": mean " << s.mean << " variance " << s.variance
                      << " KS " << s.ks_distance << " (" << s.count << " values)\n";
        }
    } else if (mode == "power") {
        const PowerReport report = run_power(cfg);
        write_csv_file(opt.out_prefix + "_power.csv",
                       [&](std::ostream& os) { write_power_csv(report, os); });
        write_file(opt.out_prefix + "_report.json", power_report_json(report, "simulate power"));
        for (const auto& c : report.cells) {
            std::cout << to_string(c.estimator) << " rho " << c.rho << ": power " << c.power << "\n";
        }
    } else { // subsample
        const SubsampleReport report = opt.data_path.empty()
                                           ? run_subsample_synthetic(cfg)
                                           : run_subsample(read_data_csv(opt.data_path), cfg);
        write_csv_file(opt.out_prefix + "_subsample.csv",
                       [&](std::ostream& os) { write_subsample_csv(report, os); });
        write_file(opt.out_prefix + "_report.json",
                   subsample_report_json(report, "simulate subsample"));
        for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
            std::cout << to_string(cfg.estimators[ei]) << ": mean sample variance "
                      << report.mean_sample_var[ei] << ", mean band proportion "
                      << report.mean_band_prop[ei] << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank-based confidence intervals for latent precision-matrix entries"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments on synthetic data");
    simulate->require_subcommand(1);
    CommonOptions sim_opt;
    std::string sim_mode;
    for (const char* mode : {"coverage", "qq", "power", "subsample"}) {
        auto* sub = simulate->add_subcommand(mode);
        add_common(sub, sim_opt, /*seed_required=*/true);
        if (std::string(mode) == "subsample")
            sub->add_option("--data", sim_opt.data_path,
                            "run the protocol on this CSV instead of synthetic data");
        sub->callback([&sim_mode, mode]() { sim_mode = mode; });
    }

    // estimate
    auto* estimate = app.add_subcommand("estimate", "inference on a data CSV");
    estimate->require_subcommand(1);
    std::string est_data, est_out = "rocket_out", est_estimator = "rocket";
    long est_a = 0, est_b = 0, est_threads = 0;
    double est_alpha = 0.05, est_threshold = 0.001;
    std::optional<double> est_lambda;
    auto* est_edge = estimate->add_subcommand("edge", "single node pair");
    est_edge->add_option("--data", est_data, "input CSV (header x1..xp)")->required();
    est_edge->add_option("--a", est_a, "first node (1-based)")->required();
    est_edge->add_option("--b", est_b, "second node (1-based)")->required();
    est_edge->add_option("--estimator", est_estimator, "rocket|pearson|npn|pseudo_score");
    est_edge->add_option("--alpha", est_alpha, "two-sided level");
    est_edge->add_option("--lambda", est_lambda, "penalty override");
    est_edge->add_option("--threads", est_threads, "worker threads");
    auto* est_graph = estimate->add_subcommand("graph", "all pairs + thresholded edge set");
    est_graph->add_option("--data", est_data, "input CSV (header x1..xp)")->required();
    est_graph->add_option("--threshold", est_threshold, "p-value cutoff for drawing an edge");
    est_graph->add_option("--alpha", est_alpha, "CI level for the pair table");
    est_graph->add_option("--lambda", est_lambda, "penalty override");
    est_graph->add_option("--threads", est_threads, "worker threads");
    est_graph->add_option("--out", est_out, "output file prefix");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "generate synthetic data CSV");
    CommonOptions sample_opt;
    std::string sample_out = "sample.csv";
    add_common(sample_cmd, sample_opt, /*seed_required=*/true);
    sample_cmd->add_option("--data-out", sample_out, "output CSV path");

    // tail
    auto* tail_cmd = app.add_subcommand("tail", "empirical tail-dependence curve");
    std::string tail_data, tail_out = "tail.csv", tail_alphas = "0.5,0.6,0.7,0.8,0.9,0.95";
    long tail_a = 1, tail_b = 2;
    tail_cmd->add_option("--data", tail_data, "input CSV")->required();
    tail_cmd->add_option("--a", tail_a, "first node (1-based)");
    tail_cmd->add_option("--b", tail_b, "second node (1-based)");
    tail_cmd->add_option("--alphas", tail_alphas, "comma list of quantile levels");
    tail_cmd->add_option("--out", tail_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim_mode, sim_opt);

        if (estimate->parsed()) {
            const DataMatrix x = read_data_csv(est_data);
            if (est_edge->parsed()) {
                ExperimentConfig cfg;
                cfg.n = x.rows();
                LassoConfig lasso;
                lasso.lambda = est_lambda ? *est_lambda : default_lambda(x.rows(), x.cols());
                const Index a = est_a - 1, b = est_b - 1;
                EdgeInference inf;
                const Estimator est = estimator_from_string(est_estimator);
                if (est == Estimator::Rocket) {
                    inf = rocket_edge(x, a, b, lasso, est_alpha, nullptr,
                                      static_cast<std::size_t>(est_threads));
                } else if (est == Estimator::Pearson) {
                    inf = plugin_edge(pearson_matrix(x), x.rows(), a, b, lasso, est_alpha);
                } else if (est == Estimator::Npn) {
                    inf = plugin_edge(npn_matrix(x), x.rows(), a, b, lasso, est_alpha);
                } else {
                    const RankEstimate rank =
                        rank_estimate(x, static_cast<std::size_t>(est_threads));
                    const Matrix omega_hat = initial_precision_lasso_refit(
                        rank.sigma, lasso, static_cast<std::size_t>(est_threads));
                    inf = pseudo_score_edge(rank.sigma, omega_hat, x.rows(), a, b, est_alpha);
                }
                std::cout << "estimator " << est_estimator << "\n"
                          << "omega_hat " << csv::format_double(inf.omega_ab) << "\n"
                          << "s_hat " << csv::format_double(inf.s_ab) << "\n"
                          << "z " << csv::format_double(inf.z) << "\n"
                          << "ci " << csv::format_double(inf.ci_lo) << " "
                          << csv::format_double(inf.ci_hi) << "\n"
                          << "p_value " << csv::format_double(inf.p_value) << "\n"
                          << "warnings " << inf.warnings << "\n";
                return kExitOk;
            }
            LassoConfig lasso;
            lasso.lambda = est_lambda ? *est_lambda : default_lambda(x.rows(), x.cols());
            const GraphReport report = estimate_graph(x, est_threshold, lasso, est_alpha,
                                                      static_cast<std::size_t>(est_threads));
            write_csv_file(est_out + "_pairs.csv",
                           [&](std::ostream& os) { write_graph_pairs_csv(report, os); });
            write_file(est_out + "_report.json", graph_report_json(report, "estimate graph"));
            std::cout << report.edges.size() << " edges at threshold " << est_threshold << " ("
                      << report.pairs.size() << " pairs, " << report.lasso_reuse_count
                      << " reused regressions)\n";
            return kExitOk;
        }

        if (sample_cmd->parsed()) {
            const ExperimentConfig cfg = build_config(sample_opt);
            const PrecisionModel model = build_precision(cfg.scenario.graph);
            DataMatrix x = sample_elliptical(cfg.n, model.sigma, cfg.scenario.radius, cfg.seed);
            if (cfg.scenario.marginals) x = apply_marginals(x, MarginalSet::five_standard());
            if (cfg.scenario.contamination) {
                ContaminationSpec spec = *cfg.scenario.contamination;
                spec.seed = derive_seed(cfg.seed, 1);
                x = contaminate(x, spec);
            }
            write_data_csv(x, sample_out);
            std::cout << "wrote " << x.rows() << "x" << x.cols() << " to " << sample_out << "\n";
            return kExitOk;
        }

        if (tail_cmd->parsed()) {
            const DataMatrix x = read_data_csv(tail_data);
            std::ofstream os(tail_out, std::ios::binary);
            if (!os) throw DataError("cannot open " + tail_out);
            csv::write_row(os, {"alpha", "tail_dependence"});
            std::string token;
            std::istringstream alphas(tail_alphas);
            while (std::getline(alphas, token, ',')) {
                const double alpha = std::stod(token);
                const double value = empirical_tail_dependence(x, tail_a - 1, tail_b - 1, alpha);
                csv::write_row(os, {csv::format_double(alpha), csv::format_double(value)});
            }
            std::cout << "wrote " << tail_out << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
