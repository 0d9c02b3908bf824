#include "rocket/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "rocket/baselines.hpp"
#include "rocket/normal.hpp"
#include "rocket/parallel.hpp"

namespace rocket {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Per-replication shared artifacts, built lazily so a run only pays for the
// estimators it asked for. Everything inside runs single-threaded; the
// harness parallelizes across replications.
struct ReplicationContext {
    const DataMatrix& x;
    const LassoConfig& lasso;
    std::optional<RankEstimate> rank;
    std::optional<SigmaHat> pearson;
    std::optional<SigmaHat> npn;
    std::optional<Matrix> pseudo_omega;

    ReplicationContext(const DataMatrix& data, const LassoConfig& cfg) : x(data), lasso(cfg) {}

    const RankEstimate& get_rank() {
        if (!rank) rank = rank_estimate(x, 1);
        return *rank;
    }
    const SigmaHat& get_pearson() {
        if (!pearson) pearson = SigmaHat{pearson_matrix(x).mat()};
        return *pearson;
    }
    const SigmaHat& get_npn() {
        if (!npn) npn = SigmaHat{npn_matrix(x).mat()};
        return *npn;
    }
    const Matrix& get_pseudo_omega() {
        if (!pseudo_omega)
            pseudo_omega = initial_precision_lasso_refit(get_rank().sigma, lasso, 1);
        return *pseudo_omega;
    }
};

EdgeInference infer_edge(ReplicationContext& ctx, Estimator est, Index a, Index b, double alpha) {
    switch (est) {
        case Estimator::Rocket:
            return rocket_edge(ctx.x, a, b, ctx.lasso, alpha, &ctx.get_rank(), 1);
        case Estimator::Pearson:
            return plugin_edge(ctx.get_pearson(), ctx.x.rows(), a, b, ctx.lasso, alpha);
        case Estimator::Npn:
            return plugin_edge(ctx.get_npn(), ctx.x.rows(), a, b, ctx.lasso, alpha);
        case Estimator::PseudoScore:
            return pseudo_score_edge(ctx.get_rank().sigma, ctx.get_pseudo_omega(), ctx.x.rows(), a,
                                     b, alpha);
    }
    throw ConfigError("unknown estimator");
}

DataMatrix generate_data(const ExperimentConfig& cfg, const CorrelationMatrix& sigma,
                         std::uint64_t rep_seed) {
    DataMatrix x = sample_elliptical(cfg.n, sigma, cfg.scenario.radius, rep_seed);
    if (cfg.scenario.marginals) x = apply_marginals(x, MarginalSet::five_standard());
    if (cfg.scenario.contamination) {
        ContaminationSpec spec = *cfg.scenario.contamination;
        spec.seed = derive_seed(rep_seed, 1);
        x = contaminate(x, spec);
    }
    return x;
}

} // namespace

CoverageReport run_coverage(const ExperimentConfig& cfg) {
    const auto start = Clock::now();
    if (cfg.edges.empty()) throw ConfigError("coverage run needs at least one target edge");

    const PrecisionModel model = build_precision(cfg.scenario.graph);
    const Index p = cfg.scenario.graph.dim();
    const LassoConfig lasso = cfg.lasso_config(p);

    const std::size_t n_est = cfg.estimators.size();
    const std::size_t n_edges = cfg.edges.size();
    const auto reps = static_cast<std::size_t>(cfg.replications);

    CoverageReport report;
    report.config = cfg;
    report.records.resize(reps * n_est * n_edges);

    parallel_for(reps, resolve_thread_count(cfg.threads), [&](std::size_t rep) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
        const DataMatrix x = generate_data(cfg, model.sigma, rep_seed);
        ReplicationContext ctx(x, lasso);
        for (std::size_t ei = 0; ei < n_est; ++ei) {
            for (std::size_t gi = 0; gi < n_edges; ++gi) {
                const EdgeTarget edge = cfg.edges[gi];
                CoverageRecord& rec = report.records[rep * n_est * n_edges + ei * n_edges + gi];
                rec.estimator = cfg.estimators[ei];
                rec.a = edge.a;
                rec.b = edge.b;
                rec.replication = static_cast<int>(rep);
                rec.seed = rep_seed;
                rec.truth = model.omega(edge.a, edge.b);
                try {
                    const EdgeInference inf = infer_edge(ctx, cfg.estimators[ei], edge.a, edge.b, cfg.alpha);
                    rec.omega_hat = inf.omega_ab;
                    rec.s_hat = inf.s_ab;
                    rec.z = inf.z;
                    rec.ci_lo = inf.ci_lo;
                    rec.ci_hi = inf.ci_hi;
                    rec.warnings = inf.warnings;
                    rec.numeric = inf.numeric();
                    if (rec.numeric) {
                        rec.covered = (inf.ci_lo <= rec.truth && rec.truth <= inf.ci_hi);
                        rec.width = inf.ci_hi - inf.ci_lo;
                    }
                } catch (const Error& err) {
                    rec.numeric = false;
                    rec.error = err.what();
                }
            }
        }
    });

    // aggregates in (estimator, edge) order
    for (std::size_t ei = 0; ei < n_est; ++ei) {
        for (std::size_t gi = 0; gi < n_edges; ++gi) {
            CoverageAggregate agg;
            agg.estimator = cfg.estimators[ei];
            agg.a = cfg.edges[gi].a;
            agg.b = cfg.edges[gi].b;
            agg.truth = model.omega(agg.a, agg.b);
            double width_sum = 0.0;
            int covered = 0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const CoverageRecord& rec = report.records[rep * n_est * n_edges + ei * n_edges + gi];
                if (!rec.numeric) {
                    ++agg.excluded;
                    continue;
                }
                ++agg.included;
                width_sum += rec.width;
                covered += rec.covered ? 1 : 0;
            }
            agg.coverage_pct = agg.included > 0 ? 100.0 * covered / agg.included : 0.0;
            agg.mean_width = agg.included > 0 ? width_sum / agg.included : 0.0;
            report.aggregates.push_back(agg);
        }
    }
    report.runtime_seconds = seconds_since(start);
    return report;
}

QQReport run_qq(const ExperimentConfig& cfg) {
    if (cfg.edges.size() != 1)
        throw ConfigError("qq run requires exactly one target edge");

    QQReport report;
    report.base = run_coverage(cfg);
    report.config = cfg;
    report.estimators = cfg.estimators;

    const auto reps = static_cast<std::size_t>(cfg.replications);
    for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
        std::vector<double> z;
        z.reserve(reps);
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const CoverageRecord& rec = report.base.records[rep * cfg.estimators.size() + ei];
            if (!rec.numeric) continue;
            // studentized error sqrt(n) (omega_hat - truth) / s
            z.push_back(std::sqrt(static_cast<double>(cfg.n)) * (rec.omega_hat - rec.truth) /
                        rec.s_hat);
        }
        std::sort(z.begin(), z.end());

        QQStats stats;
        stats.estimator = cfg.estimators[ei];
        stats.count = static_cast<int>(z.size());
        if (!z.empty()) {
            const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
            double ss = 0.0;
            for (double v : z) ss += (v - mean) * (v - mean);
            stats.mean = mean;
            stats.variance = z.size() > 1 ? ss / static_cast<double>(z.size() - 1) : 0.0;
            double ks = 0.0;
            const auto m = static_cast<double>(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double cdf = stats::norm_cdf(z[i]);
                ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / m - cdf));
                ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / m));
            }
            stats.ks_distance = ks;
        }

        std::vector<double> quantiles(z.size());
        for (std::size_t i = 0; i < z.size(); ++i)
            quantiles[i] = stats::norm_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(z.size()));

        report.z_sorted.push_back(std::move(z));
        report.normal_quantiles.push_back(std::move(quantiles));
        report.stats.push_back(stats);
    }
    return report;
}

PowerReport run_power(const ExperimentConfig& cfg) {
    const auto start = Clock::now();
    if (cfg.power_rhos.empty()) throw ConfigError("power run needs a [power] rho grid");
    if (cfg.scenario.graph.kind != GraphSpec::Kind::Pair)
        throw ConfigError("power run requires the pair graph design");

    PowerReport report;
    report.config = cfg;

    for (double rho : cfg.power_rhos) {
        ExperimentConfig sub = cfg;
        sub.scenario.graph = GraphSpec::pair(cfg.scenario.graph.p, rho);
        sub.edges = {EdgeTarget{0, 1}};
        // decorrelate replication streams across rho values
        sub.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(std::llround(rho * 1e6)) + 0x9e37);
        const CoverageReport cov = run_coverage(sub);

        for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
            PowerCell cell;
            cell.estimator = cfg.estimators[ei];
            cell.rho = rho;
            for (std::size_t rep = 0; rep < static_cast<std::size_t>(cfg.replications); ++rep) {
                const CoverageRecord& rec = cov.records[rep * cfg.estimators.size() + ei];
                if (!rec.numeric) {
                    ++cell.excluded;
                    continue;
                }
                ++cell.included;
                // two-sided z test of H0: omega_12 = 0
                const double pval = stats::two_sided_pvalue(rec.z);
                if (pval < cfg.alpha) ++cell.rejections;
            }
            cell.power = cell.included > 0 ? static_cast<double>(cell.rejections) / cell.included : 0.0;
            report.cells.push_back(cell);
        }
    }
    report.runtime_seconds = seconds_since(start);
    return report;
}

SubsampleReport run_subsample(const DataMatrix& x, const ExperimentConfig& cfg) {
    const auto start = Clock::now();
    const auto L = static_cast<std::size_t>(cfg.subsample_count);
    const Index n_sub = cfg.subsample_size;
    if (L < 2) throw ConfigError("subsample count must be >= 2");
    if (static_cast<Index>(L) * n_sub > x.rows())
        throw InsufficientRows("need " + std::to_string(static_cast<Index>(L) * n_sub) +
                               " rows, have " + std::to_string(x.rows()));
    const Index p = x.cols();
    if (p < 3) throw ConfigError("subsample protocol needs p >= 3");

    // Disjoint index sets: one seeded shuffle, then consecutive blocks.
    std::vector<Index> perm(static_cast<std::size_t>(x.rows()));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng = Rng::stream(cfg.seed, 0x5ab5ab);
    for (std::size_t i = perm.size(); i > 1; --i) {
        const auto j = rng.uniform_below(i);
        std::swap(perm[i - 1], perm[j]);
    }

    std::vector<EdgeTarget> pairs;
    for (Index a = 0; a < p; ++a)
        for (Index b = a + 1; b < p; ++b) pairs.push_back(EdgeTarget{a, b});

    const std::size_t n_est = cfg.estimators.size();
    const LassoConfig lasso = cfg.lasso_config(p);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // z[est][pair][subsample]
    std::vector<std::vector<std::vector<double>>> z(
        n_est, std::vector<std::vector<double>>(pairs.size(), std::vector<double>(L, nan)));

    for (std::size_t ell = 0; ell < L; ++ell) {
        DataMatrix sub(n_sub, p);
        for (Index r = 0; r < n_sub; ++r)
            sub.row(r) = x.row(perm[ell * static_cast<std::size_t>(n_sub) + static_cast<std::size_t>(r)]);

        ReplicationContext ctx(sub, lasso);
        std::optional<NodeRegressions> cache;
        const bool needs_rocket =
            std::find(cfg.estimators.begin(), cfg.estimators.end(), Estimator::Rocket) !=
            cfg.estimators.end();
        if (needs_rocket) {
            ctx.get_rank();
            cache.emplace(ctx.rank->sigma, lasso, cfg.threads);
        }
        for (std::size_t ei = 0; ei < n_est; ++ei) {
            if (cfg.estimators[ei] != Estimator::Rocket) {
                // shared matrices must exist before the parallel pair loop
                if (cfg.estimators[ei] == Estimator::Pearson) ctx.get_pearson();
                if (cfg.estimators[ei] == Estimator::Npn) ctx.get_npn();
                if (cfg.estimators[ei] == Estimator::PseudoScore) ctx.get_pseudo_omega();
            }
        }

        parallel_for(pairs.size(), resolve_thread_count(cfg.threads), [&](std::size_t pi) {
            for (std::size_t ei = 0; ei < n_est; ++ei) {
                try {
                    EdgeInference inf =
                        (cfg.estimators[ei] == Estimator::Rocket)
                            ? rocket_edge_cached(sub, *ctx.rank, *cache, pairs[pi].a, pairs[pi].b,
                                                 lasso, cfg.alpha, 1)
                            : infer_edge(ctx, cfg.estimators[ei], pairs[pi].a, pairs[pi].b, cfg.alpha);
                    if (inf.numeric()) z[ei][pi][ell] = inf.z;
                } catch (const Error&) {
                    // left as NaN; excluded below
                }
            }
        });
    }

    SubsampleReport report;
    report.config = cfg;
    const double band = 1.6449 * std::sqrt(1.0 - 1.0 / static_cast<double>(L));
    for (std::size_t ei = 0; ei < n_est; ++ei) {
        double var_sum = 0.0, band_sum = 0.0;
        std::size_t var_count = 0;
        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
            SubsampleRow row;
            row.estimator = cfg.estimators[ei];
            row.a = pairs[pi].a;
            row.b = pairs[pi].b;
            std::vector<double> zs;
            for (double v : z[ei][pi])
                if (std::isfinite(v)) zs.push_back(v);
            row.used = static_cast<int>(zs.size());
            if (zs.size() >= 2) {
                const double mean = std::accumulate(zs.begin(), zs.end(), 0.0) / static_cast<double>(zs.size());
                double ss = 0.0;
                int in_band = 0;
                for (double v : zs) {
                    ss += (v - mean) * (v - mean);
                    if (std::fabs(v - mean) <= band) ++in_band;
                }
                row.sample_var = ss / static_cast<double>(zs.size() - 1);
                row.band_prop = static_cast<double>(in_band) / static_cast<double>(zs.size());
                var_sum += row.sample_var;
                band_sum += row.band_prop;
                ++var_count;
            } else {
                row.sample_var = nan;
                row.band_prop = nan;
            }
            report.rows.push_back(row);
        }
        report.mean_sample_var.push_back(var_count > 0 ? var_sum / static_cast<double>(var_count) : nan);
        report.mean_band_prop.push_back(var_count > 0 ? band_sum / static_cast<double>(var_count) : nan);
    }
    report.runtime_seconds = seconds_since(start);
    return report;
}

SubsampleReport run_subsample_synthetic(const ExperimentConfig& cfg) {
    const PrecisionModel model = build_precision(cfg.scenario.graph);
    ExperimentConfig gen = cfg;
    gen.n = static_cast<Index>(cfg.subsample_count) * cfg.subsample_size;
    const DataMatrix x = generate_data(gen, model.sigma, derive_seed(cfg.seed, 0xDA7A));
    return run_subsample(x, cfg);
}

GraphReport estimate_graph(const DataMatrix& x, double threshold, const LassoConfig& cfg,
                           double alpha, std::size_t threads) {
    const auto start = Clock::now();
    const Index p = x.cols();
    if (p < 3) throw DataError("graph estimation needs p >= 3");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");

    const RankEstimate rank = rank_estimate(x, threads);
    const NodeRegressions cache(rank.sigma, cfg, threads);

    std::vector<EdgeTarget> pairs;
    for (Index a = 0; a < p; ++a)
        for (Index b = a + 1; b < p; ++b) pairs.push_back(EdgeTarget{a, b});

    GraphReport report;
    report.threshold = threshold;
    report.lasso_reuse_count = cache.reuse_count();
    report.pairs.resize(pairs.size());

    parallel_for(pairs.size(), resolve_thread_count(threads), [&](std::size_t pi) {
        PairInference& out = report.pairs[pi];
        out.a = pairs[pi].a;
        out.b = pairs[pi].b;
        try {
            const EdgeInference inf =
                rocket_edge_cached(x, rank, cache, pairs[pi].a, pairs[pi].b, cfg, alpha, 1);
            out.omega_hat = inf.omega_ab;
            out.s_hat = inf.s_ab;
            out.z = inf.z;
            out.p_value = inf.p_value;
            out.warnings = inf.warnings;
            out.ok = inf.numeric();
        } catch (const Error& err) {
            out.ok = false;
            out.error = err.what();
        }
    });

    for (const auto& pr : report.pairs) {
        if (pr.ok && pr.p_value < threshold) report.edges.push_back(EdgeTarget{pr.a, pr.b});
    }
    report.runtime_seconds = seconds_since(start);
    return report;
}

} // namespace rocket
