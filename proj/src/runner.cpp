#include "poincare/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "poincare/booleangrid.hpp"
#include "poincare/bounds.hpp"
#include "poincare/distance.hpp"
#include "poincare/gamma.hpp"
#include "poincare/rng.hpp"
#include "poincare/sampler.hpp"
#include "poincare/stein.hpp"
#include "poincare/zoo.hpp"

namespace poincare {

namespace {

// File-name fragment for a scale: "%g" with '.' -> 'p' and '+' dropped, so
// s = 2.5 tags files as s2p5 and s = 1e+06 as s1e06.
std::string scale_tag(double s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", s);
    std::string tag;
    for (const char* p = buf; *p; ++p) {
        if (*p == '.')
            tag += 'p';
        else if (*p != '+')
            tag += *p;
    }
    return tag;
}

// Deterministic 64-bit seed for one (block, scale) cell, derived from the
// root seed only, so estimator streams never collide across blocks or scales.
std::uint64_t seed_for(std::uint64_t root, std::uint64_t block, std::uint64_t k) {
    RngStream s = RngStream(root).sub(block, k);
    return s.next_u64();
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path.string() + "' for writing");
    return out;
}

SampleBlock draw_model_samples(const ZooEntry& entry, long n, std::uint64_t seed) {
    SampleBlock block;
    block.m = entry.model->m();
    RngStream root(seed);
    for (long r = 0; r < n; ++r) {
        RngStream rep = root.sub(stream_tag::kSampler, static_cast<std::uint64_t>(r));
        PointConfiguration eta = sample_poisson_process(entry.carrier, entry.marks_ptr(), rep);
        block.push_row(entry.model->centered(eta));
    }
    return block;
}

SampleBlock draw_gaussian_samples(const GaussianTarget& target, long n, std::uint64_t seed) {
    SampleBlock block;
    block.m = target.m();
    RngStream root(seed);
    for (long r = 0; r < n; ++r) {
        RngStream rep = root.sub(stream_tag::kCalibration, static_cast<std::uint64_t>(r));
        block.push_row(sample_gaussian(target, rep));
    }
    return block;
}

void write_samples_file(const std::filesystem::path& path, const SampleBlock& block) {
    std::ofstream out = open_out(path);
    out << block.m << ' ' << block.n << '\n';
    for (long r = 0; r < block.n; ++r) {
        const double* row = block.row(r);
        for (int c = 0; c < block.m; ++c) out << (c ? " " : "") << fmt_g17(row[c]);
        out << '\n';
    }
}

SampleBlock read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open samples file '" + path + "'");
    int m = 0;
    long n = 0;
    if (!(in >> m >> n) || m < 1 || n < 0)
        throw config_error("samples file '" + path + "': malformed 'm n' header");
    if (n == 0) throw config_error("samples file '" + path + "' is empty");
    SampleBlock block;
    block.m = m;
    std::vector<double> row(static_cast<std::size_t>(m));
    for (long r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c)
            if (!(in >> row[static_cast<std::size_t>(c)]))
                throw config_error("samples file '" + path + "': truncated at row " +
                                   std::to_string(r));
        block.push_row(row);
    }
    double extra;
    if (in >> extra)
        throw config_error("samples file '" + path + "': more rows than the header declares");
    return block;
}

void write_witness_file(const std::filesystem::path& path, const DistanceEstimate& est,
                        const GaussianTarget& target, const GaussProbPlan& prob) {
    std::ofstream out = open_out(path);
    out << "witness " << est.witness_text << '\n';
    out << "sigma " << target.m();
    for (int i = 0; i < target.m(); ++i)
        for (int j = 0; j < target.m(); ++j) out << ' ' << fmt_g17(target.sigma()(i, j));
    out << '\n';
    out << "prob_n " << prob.n_draws << '\n';
    out << "prob_seed " << prob.seed << '\n';
    out << "n_samples " << est.n_samples << '\n';
    out << "value " << fmt_g17(est.value) << '\n';
    out << "std_error " << fmt_g17(est.std_error) << '\n';
}

struct WitnessRecord {
    TestFunction witness = TestFunction::halfspaces({{1.0}}, {0.0});
    Matrix sigma = Matrix::identity(1);
    GaussProbPlan prob;
    double value = 0.0;
    bool has_value = false;
};

WitnessRecord read_witness_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open witness file '" + path + "'");
    WitnessRecord rec;
    bool has_witness = false, has_sigma = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "witness") {
            std::string text;
            std::getline(ls, text);
            const std::size_t a = text.find_first_not_of(' ');
            if (a == std::string::npos)
                throw config_error("witness file '" + path + "': empty witness line");
            rec.witness = TestFunction::deserialize(text.substr(a));
            has_witness = true;
        } else if (key == "sigma") {
            int m = 0;
            if (!(ls >> m) || m < 1)
                throw config_error("witness file '" + path + "': malformed sigma dimension");
            Matrix sigma(m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    if (!(ls >> sigma(i, j)))
                        throw config_error("witness file '" + path + "': truncated sigma");
            rec.sigma = sigma;
            has_sigma = true;
        } else if (key == "prob_n") {
            if (!(ls >> rec.prob.n_draws))
                throw config_error("witness file '" + path + "': malformed prob_n");
        } else if (key == "prob_seed") {
            if (!(ls >> rec.prob.seed))
                throw config_error("witness file '" + path + "': malformed prob_seed");
        } else if (key == "value") {
            if (!(ls >> rec.value))
                throw config_error("witness file '" + path + "': malformed value");
            rec.has_value = true;
        } else if (key == "n_samples" || key == "std_error") {
            // informational only
        } else {
            throw config_error("witness file '" + path + "': unknown line '" + key + "'");
        }
    }
    if (!has_witness || !has_sigma || !rec.has_value)
        throw config_error("witness file '" + path + "': needs witness, sigma and value lines");
    return rec;
}

// One evaluated inequality for the exit-code gate: pass iff lhs <= rhs + 3 se.
SteinCheckRow make_check(const std::string& name, double lhs, double rhs, double se) {
    SteinCheckRow row;
    row.check = name;
    row.lhs = lhs;
    row.rhs = rhs;
    row.se = se;
    row.margin = rhs - lhs;
    row.pass = lhs <= rhs + 3.0 * se;
    return row;
}

// Every k-th row of a block, capped, for checks whose cost is linear in rows.
SampleBlock thin_rows(const SampleBlock& block, long cap) {
    if (block.n <= cap) return block;
    SampleBlock out;
    out.m = block.m;
    const long stride = (block.n + cap - 1) / cap;
    std::vector<double> row(static_cast<std::size_t>(block.m));
    for (long r = 0; r < block.n; r += stride) {
        const double* src = block.row(r);
        row.assign(src, src + block.m);
        out.push_row(row);
    }
    return out;
}

SampleBlock standardize_rows(const SampleBlock& block, const GaussianTarget& target) {
    SampleBlock out;
    out.m = block.m;
    const Matrix& inv_sqrt = target.inv_sqrt();
    std::vector<double> row(static_cast<std::size_t>(block.m));
    for (long r = 0; r < block.n; ++r) {
        const double* src = block.row(r);
        for (int i = 0; i < block.m; ++i) {
            double acc = 0.0;
            for (int j = 0; j < block.m; ++j) acc += inv_sqrt(i, j) * src[j];
            row[static_cast<std::size_t>(i)] = acc;
        }
        out.push_row(row);
    }
    return out;
}

struct DistanceRow {
    std::string metric;
    DistanceEstimate est;
    DistanceEstimate null_est;
    int budget = 0;
    std::string witness_file;
};

void write_distance_csv(std::ostream& os, const std::vector<DistanceRow>& rows) {
    os << "metric,value,std_error,null_value,null_std_error,n_samples,budget,seed,witness_file\n";
    for (const DistanceRow& r : rows) {
        os << r.metric << ',' << fmt_g17(r.est.value) << ',' << fmt_g17(r.est.std_error) << ','
           << fmt_g17(r.null_est.value) << ',' << fmt_g17(r.null_est.std_error) << ','
           << r.est.n_samples << ',' << r.budget << ',' << r.est.seed << ',' << r.witness_file
           << '\n';
    }
}

void describe_gamma(std::ostringstream& os, const char* name, const GammaEstimate& g) {
    os << "  " << name << " = " << fmt_g17(g.plug_in.value) << " (se "
       << fmt_g17(g.plug_in.std_error) << ", debiased " << fmt_g17(g.debiased) << ")"
       << (g.unstable ? " UNSTABLE" : "") << '\n';
}

struct RatePoint {
    double s = 0.0, value = 0.0, se = 0.0;
};

}  // namespace

int run_experiment(const ExperimentConfig& config, const std::string& only, std::ostream* log) {
    ExperimentConfig cfg = config;
    bool simulate_only = false;
    if (only == "simulate") {
        cfg.blocks = BlockPlan{false, false, false, false, false};
        simulate_only = true;
    } else if (only == "gammas") {
        cfg.blocks = BlockPlan{true, false, false, false, false};
    } else if (only == "bounds") {
        cfg.blocks = BlockPlan{true, true, config.blocks.marked, false, false};
    } else if (only == "distances") {
        cfg.blocks = BlockPlan{false, false, false, true, false};
    } else if (only == "stein") {
        cfg.blocks = BlockPlan{false, false, false, false, true};
    } else if (only == "rates") {
        cfg.blocks = BlockPlan{true, true, config.blocks.marked, true, false};
    } else if (!only.empty()) {
        throw config_error("unknown run stage '" + only + "'");
    }
    cfg.validate();

    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);

    std::ostringstream summary;
    summary << "run summary\n";
    summary << "model = " << cfg.model_id << '\n';
    summary << "target = " << cfg.target_source << '\n';
    summary << "root_seed = " << cfg.root_seed << '\n';
    summary << "workers = " << cfg.workers
            << "  # estimators reduce with a fixed tree; output is identical for any count\n";
    summary << "blocks =";
    if (simulate_only) summary << " simulate";
    if (cfg.blocks.gammas) summary << " gammas";
    if (cfg.blocks.bounds) summary << " bounds";
    if (cfg.blocks.marked) summary << " marked";
    if (cfg.blocks.distances) summary << " distances";
    if (cfg.blocks.stein) summary << " stein";
    summary << '\n';
    summary << "scales =";
    for (double s : cfg.scales) summary << ' ' << fmt_g17(s);
    summary << '\n';

    bool instability = false;
    std::vector<SteinCheckRow> checks;
    // (display id, metric) -> per-scale points for the rate fits.
    std::map<std::pair<std::string, std::string>, std::vector<RatePoint>> series;

    for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
        const double s = cfg.scales[k];
        const std::string tag = scale_tag(s);
        const std::string stag = "s" + tag + ": ";
        summary << "\n[scale " << fmt_g17(s) << "]\n";

        ZooEntry entry = make_zoo_model(cfg.model_id, s, cfg.zoo);
        Matrix sigma = entry.sigma;
        bool sigma_estimated = entry.sigma_estimated;
        if (cfg.target_source == "estimated" && !sigma_estimated) {
            CovarianceEstimate cov =
                estimate_covariance(*entry.model, entry.carrier, entry.marks_ptr(),
                                    cfg.zoo.calibration_n, seed_for(cfg.root_seed, 7, k));
            sigma = cov.cov;
            sigma_estimated = true;
        }
        const GaussianTarget target(sigma);
        const int m = entry.model->m();
        summary << "  model descriptor = " << entry.model->descriptor() << '\n';
        summary << "  sigma source = " << (sigma_estimated ? "estimated" : "analytic") << '\n';
        for (int i = 0; i < m; ++i) {
            summary << "  sigma row " << i << " =";
            for (int j = 0; j < m; ++j) summary << ' ' << fmt_g17(sigma(i, j));
            summary << '\n';
        }
        if (!target.positive_definite())
            summary << "  NOTE: covariance is not positive definite; the d2/dHl/dconvex "
                       "displays are skipped at this scale\n";

        const bool need_samples = cfg.blocks.distances || cfg.blocks.stein || simulate_only;
        SampleBlock samples;
        if (need_samples) {
            samples = draw_model_samples(entry, cfg.distance_n, seed_for(cfg.root_seed, 1, k));
            write_samples_file(out_dir / ("samples_s" + tag + ".txt"), samples);
            for (int c = 0; c < m; ++c) {
                std::vector<double> col(static_cast<std::size_t>(samples.n));
                for (long r = 0; r < samples.n; ++r) col[static_cast<std::size_t>(r)] =
                    samples.row(r)[c];
                const double mu = pairwise_sum(col) / static_cast<double>(samples.n);
                for (double& v : col) v = (v - mu) * (v - mu);
                const double var = pairwise_sum(col) / static_cast<double>(samples.n - 1);
                summary << "  component " << c << ": sample mean = " << fmt_g17(mu)
                        << ", sample sd = " << fmt_g17(std::sqrt(var)) << '\n';
            }
        }
        if (simulate_only) {
            if (auto boolmodel = std::dynamic_pointer_cast<const BooleanDiskModel>(entry.model)) {
                RngStream rep(seed_for(cfg.root_seed, 8, k));
                PointConfiguration eta =
                    sample_poisson_process(entry.carrier, entry.marks_ptr(), rep);
                const std::string pgm = (out_dir / ("realization_s" + tag + ".pgm")).string();
                write_boolean_pgm(pgm, boolmodel->disks_of(eta), boolmodel->window(),
                                  boolmodel->pixel());
                summary << "  realization image = realization_s" << tag << ".pgm\n";
            }
            summary << "  samples file = samples_s" << tag << ".txt\n";
        }

        GammaReport gammas;
        if (cfg.blocks.gammas) {
            NestedMcPlan plan = cfg.gamma_plan;
            plan.seed = seed_for(cfg.root_seed, 2, k);
            gammas = full_gamma_report(*entry.model, entry.carrier, entry.marks_ptr(), target,
                                       plan);
            std::ofstream csv = open_out(out_dir / ("gamma_s" + tag + ".csv"));
            write_gamma_csv(csv, gammas);
            describe_gamma(summary, "gamma1", gammas.gamma1);
            describe_gamma(summary, "gamma2", gammas.gamma2);
            describe_gamma(summary, "gamma3", gammas.gamma3);
            describe_gamma(summary, "gamma4", gammas.gamma4);
            describe_gamma(summary, "gamma5", gammas.gamma5);
            summary << "  cov discrepancy = " << fmt_g17(gammas.cov_discrepancy.value) << " (se "
                    << fmt_g17(gammas.cov_discrepancy.std_error) << ")\n";
            instability = instability || gammas.gamma1.unstable || gammas.gamma2.unstable ||
                          gammas.gamma3.unstable || gammas.gamma4.unstable ||
                          gammas.gamma5.unstable;
        }

        std::vector<BoundReport> bounds;
        if (cfg.blocks.bounds) {
            const bool pd = target.positive_definite();
            bounds.push_back(bound_d3(gammas, target, m));
            if (pd) {
                bounds.push_back(bound_d2(gammas, target, m));
                bounds.push_back(bound_dHl(gammas, target, m, cfg.bound_l));
                if (cfg.convex)
                    bounds.push_back(bound_dconvex(gammas, target, m, cfg.convex->rho,
                                                   cfg.convex->lambda_A,
                                                   cfg.convex->tail_integral));
            }
            if (cfg.model_id == "compound_sum_rademacher") {
                // Unit moments of the +1/-1 increment: E|X|^3 = EX^4 = EX^6 = 1
                // and |X| <= 1.
                CompoundMoments mom;
                mom.abs3.assign(static_cast<std::size_t>(m), 1.0);
                mom.mom4.assign(static_cast<std::size_t>(m), 1.0);
                mom.mom6.assign(static_cast<std::size_t>(m), 1.0);
                mom.a = 1.0;
                bounds.push_back(bound_compound(BoundVariant::d3, target, m, s, mom));
                if (pd) {
                    bounds.push_back(bound_compound(BoundVariant::d2, target, m, s, mom));
                    bounds.push_back(
                        bound_compound(BoundVariant::dHl, target, m, s, mom, cfg.bound_l));
                    bounds.push_back(bound_compound(BoundVariant::dconvex, target, m, s, mom));
                }
            }
            if (cfg.model_id == "wiener_ito_unit") {
                // The unit kernel f = s^{-1/2} 1_[0,1] gives the integrals in
                // closed form: s * |f|^k integrates to s^{1-k/2}.
                FirstOrderIngredients ing;
                ing.discrepancy = 0.0;
                ing.int_abs3 = 1.0 / std::sqrt(s);
                ing.int4 = 1.0 / s;
                ing.int6 = 1.0 / (s * s);
                ing.rho = 1.0 / std::sqrt(s);
                ing.lambda_X = s;
                bounds.push_back(bound_first_order(BoundVariant::d3, target, m, ing));
                if (pd) {
                    bounds.push_back(bound_first_order(BoundVariant::d2, target, m, ing));
                    bounds.push_back(
                        bound_first_order(BoundVariant::dHl, target, m, ing, cfg.bound_l));
                    bounds.push_back(bound_first_order(BoundVariant::dconvex, target, m, ing));
                }
            }
            if (cfg.blocks.marked) {
                NestedMcPlan plan = cfg.gamma_plan;
                plan.seed = seed_for(cfg.root_seed, 9, k);
                const BigGammaReport big =
                    estimate_big_gammas(*entry.model, entry.carrier, entry.marks_ptr(),
                                        cfg.marked_c, cfg.marked_p, plan);
                instability = instability || big.gamma1.unstable || big.gamma2.unstable ||
                              big.gamma3.unstable || big.gamma4.unstable;
                bounds.push_back(bound_marked(big, target, m, cfg.bound_l,
                                              gammas.cov_discrepancy, BoundVariant::d3));
                if (pd) {
                    bounds.push_back(bound_marked(big, target, m, cfg.bound_l,
                                                  gammas.cov_discrepancy, BoundVariant::d2));
                    bounds.push_back(bound_marked(big, target, m, cfg.bound_l,
                                                  gammas.cov_discrepancy, BoundVariant::dHl));
                    if (cfg.convex)
                        bounds.push_back(bound_marked(big, target, m, cfg.bound_l,
                                                      gammas.cov_discrepancy,
                                                      BoundVariant::dconvex, *cfg.convex));
                }
            }
            std::ofstream csv = open_out(out_dir / ("bounds_s" + tag + ".csv"));
            write_bound_csv(csv, bounds);
            for (const BoundReport& b : bounds) {
                summary << "  " << b.display_id << " (" << b.metric
                        << ") total = " << fmt_g17(b.total) << " (se " << fmt_g17(b.std_error)
                        << ")" << (b.vacuous ? " [vacuous]" : "") << '\n';
                series[{b.display_id, b.metric}].push_back(RatePoint{s, b.total, b.std_error});
            }
        }

        std::vector<DistanceRow> drows;
        DistanceEstimate dhl;
        bool have_dhl = false;
        if (cfg.blocks.distances || cfg.blocks.stein) {
            DistanceSearchPlan dplan;
            dplan.budget = cfg.distance_budget;
            dplan.seed = seed_for(cfg.root_seed, 3, k);
            dplan.prob.n_draws = cfg.prob_draws;
            dplan.prob.seed = seed_for(cfg.root_seed, 4, k);
            dhl = estimate_dHl(samples, target, cfg.distance_l, dplan);
            have_dhl = true;
            if (cfg.blocks.distances) {
                const SampleBlock null_samples =
                    draw_gaussian_samples(target, cfg.distance_n, seed_for(cfg.root_seed, 6, k));
                DistanceSearchPlan nplan = dplan;
                nplan.seed = seed_for(cfg.root_seed, 13, k);
                nplan.prob.seed = seed_for(cfg.root_seed, 14, k);
                const std::string metric_hl = "dH" + std::to_string(cfg.distance_l);

                if (m == 1) {
                    std::vector<double> col(static_cast<std::size_t>(samples.n));
                    for (long r = 0; r < samples.n; ++r)
                        col[static_cast<std::size_t>(r)] = samples.row(r)[0];
                    const double sd = std::sqrt(target.sigma()(0, 0));
                    DistanceRow row;
                    row.metric = "dK";
                    row.est = estimate_dK(col, sd);
                    std::vector<double> ncol(static_cast<std::size_t>(null_samples.n));
                    for (long r = 0; r < null_samples.n; ++r)
                        ncol[static_cast<std::size_t>(r)] = null_samples.row(r)[0];
                    row.null_est = estimate_dK(ncol, sd);
                    row.budget = 0;  // the scalar sup is exact, no search involved
                    row.witness_file = "witness_s" + tag + "_dK.txt";
                    write_witness_file(out_dir / row.witness_file, row.est, target, dplan.prob);
                    drows.push_back(std::move(row));
                }
                {
                    DistanceRow row;
                    row.metric = metric_hl;
                    row.est = dhl;
                    row.null_est = estimate_dHl(null_samples, target, cfg.distance_l, nplan);
                    row.budget = cfg.distance_budget;
                    row.witness_file = "witness_s" + tag + "_" + metric_hl + ".txt";
                    write_witness_file(out_dir / row.witness_file, row.est, target, dplan.prob);
                    drows.push_back(std::move(row));
                }
                {
                    DistanceRow row;
                    row.metric = "dconvex";
                    const TestFunction* seed_witness =
                        dhl.witness ? &*dhl.witness : nullptr;
                    row.est = estimate_dconvex(samples, target, dplan, seed_witness);
                    row.null_est = estimate_dconvex(null_samples, target, nplan);
                    row.budget = cfg.distance_budget;
                    row.witness_file = "witness_s" + tag + "_dconvex.txt";
                    write_witness_file(out_dir / row.witness_file, row.est, target, dplan.prob);
                    drows.push_back(std::move(row));

                    checks.push_back(make_check(
                        stag + "dconvex >= " + metric_hl + " (same samples)", dhl.value,
                        row.est.value, 0.0));
                }
                std::ofstream csv = open_out(out_dir / ("distance_s" + tag + ".csv"));
                write_distance_csv(csv, drows);
                for (const DistanceRow& row : drows) {
                    summary << "  " << row.metric << " = " << fmt_g17(row.est.value) << " (se "
                            << fmt_g17(row.est.std_error)
                            << ", null = " << fmt_g17(row.null_est.value) << ")\n";
                    series[{"empirical", row.metric}].push_back(
                        RatePoint{s, row.est.value, row.est.std_error});
                }

                // Containment of the empirical distances in every assembled
                // bound for the same metric class. The half-space estimate
                // with distance_l faces is dominated by any dHl display with
                // bound_l >= distance_l faces; the scalar dK coincides with
                // the one-face distance when m = 1.
                for (const BoundReport& b : bounds) {
                    const double se_sum = b.std_error;
                    if (b.metric == "dHl" && cfg.distance_l <= cfg.bound_l) {
                        for (const DistanceRow& row : drows)
                            if (row.metric != "dconvex")
                                checks.push_back(make_check(stag + row.metric + " <= " +
                                                                b.display_id,
                                                            row.est.value, b.total,
                                                            row.est.std_error + se_sum));
                    }
                    if (b.metric == "dconvex") {
                        for (const DistanceRow& row : drows)
                            checks.push_back(make_check(stag + row.metric + " <= " + b.display_id,
                                                        row.est.value, b.total,
                                                        row.est.std_error + se_sum));
                    }
                }
            }
        }

        if (cfg.blocks.stein) {
            const std::uint64_t stein_seed = seed_for(cfg.root_seed, 5, k);
            QuadratureSpec spec;
            spec.n_draws = cfg.stein_draws;
            spec.n_nodes = cfg.stein_nodes;
            spec.seed = stein_seed;
            std::vector<SteinCheckRow> rows;

            const std::vector<TestFunction> singles =
                random_halfspace_catalog(m, 1, cfg.stein_points, target, stein_seed);
            RngStream yroot = RngStream(stein_seed).sub(stream_tag::kChecks, 7);
            for (std::size_t c = 0; c < singles.size(); ++c) {
                SteinSolution f(singles[c], target, cfg.stein_t, spec);
                RngStream ys = yroot.sub(static_cast<std::uint64_t>(c));
                rows.push_back(check_residual(f, sample_gaussian(target, ys)));
            }
            for (SteinCheckRow& r : check_derivative_sup_bounds(singles.front(), target,
                                                                cfg.stein_t, 8, spec))
                rows.push_back(std::move(r));
            rows.push_back(check_hessian_null_integral(target, 200000, stein_seed));
            {
                RngStream ys = yroot.sub(999);
                rows.push_back(check_conjugation(singles.front(), target, cfg.stein_t,
                                                 sample_gaussian(target, ys), spec));
            }
            for (SteinCheckRow& r : check_gaussian_stripe_bound({0.05, 0.2, 1.0}))
                rows.push_back(std::move(r));
            for (SteinCheckRow& r : check_boundary_proximity(m, 0.5, 200000, stein_seed))
                rows.push_back(std::move(r));

            if (have_dhl) {
                DistanceSearchPlan dplan;
                dplan.budget = cfg.distance_budget;
                dplan.seed = seed_for(cfg.root_seed, 15, k);
                dplan.prob.n_draws = cfg.prob_draws;
                dplan.prob.seed = seed_for(cfg.root_seed, 16, k);
                const DistanceEstimate dh2l =
                    estimate_dHl(samples, target, 2 * cfg.distance_l, dplan);
                std::vector<TestFunction> catalog =
                    random_halfspace_catalog(m, cfg.distance_l, cfg.stein_points, target,
                                             stein_seed + 1);
                if (dhl.witness) catalog.push_back(*dhl.witness);
                rows.push_back(check_second_derivative_catalog(
                    catalog, thin_rows(samples, 64), target, cfg.stein_t, dh2l.value, spec));
                if (cfg.distance_l <= 2)
                    rows.push_back(check_halfspace_smoothing(catalog, samples, target,
                                                             cfg.stein_t, cfg.distance_l, dhl,
                                                             dplan.prob));
                if (m <= 2) {
                    const SampleBlock std_samples = standardize_rows(samples, target);
                    const GaussianTarget identity{Matrix::identity(m)};
                    DistanceSearchPlan splan = dplan;
                    splan.seed = seed_for(cfg.root_seed, 17, k);
                    const DistanceEstimate dcx_std =
                        estimate_dconvex(std_samples, identity, splan);
                    std::vector<TestFunction> convex_catalog =
                        random_convex_catalog(m, cfg.stein_points, identity, stein_seed + 2);
                    if (dcx_std.witness) convex_catalog.push_back(*dcx_std.witness);
                    rows.push_back(check_convex_smoothing(convex_catalog, std_samples,
                                                          cfg.stein_t, dcx_std, splan.prob));
                }
            }

            std::ofstream csv = open_out(out_dir / ("stein_s" + tag + ".csv"));
            write_stein_csv(csv, rows);
            long passed = 0;
            for (const SteinCheckRow& r : rows) {
                SteinCheckRow tagged = r;
                tagged.check = stag + r.check;
                passed += r.pass ? 1 : 0;
                checks.push_back(std::move(tagged));
            }
            summary << "  interpolant checks passed = " << passed << "/" << rows.size() << '\n';
        }
    }

    summary << "\n[rates]\n";
    summary << "display,metric,slope,ci_lo,ci_hi,intercept\n";
    for (const auto& [key, points] : series) {
        std::vector<std::pair<double, double>> pairs;
        std::vector<double> ses;
        for (const RatePoint& p : points)
            if (p.value > 0) {
                pairs.emplace_back(p.s, p.value);
                ses.push_back(p.se);
            }
        std::sort(pairs.begin(), pairs.end());
        if (pairs.size() < 2 || pairs.front().first == pairs.back().first) continue;
        const RateFit fit = rate_slope(pairs, ses);
        summary << key.first << ',' << key.second << ',' << fmt_g17(fit.slope) << ','
                << fmt_g17(fit.ci_lo) << ',' << fmt_g17(fit.ci_hi) << ','
                << fmt_g17(fit.intercept) << '\n';
    }

    summary << "\n[checks]\n";
    summary << "check,lhs,rhs,margin,se,pass\n";
    long failed = 0;
    for (const SteinCheckRow& c : checks) {
        summary << c.check << ',' << fmt_g17(c.lhs) << ',' << fmt_g17(c.rhs) << ','
                << fmt_g17(c.margin) << ',' << fmt_g17(c.se) << ',' << (c.pass ? 1 : 0) << '\n';
        failed += c.pass ? 0 : 1;
    }

    const int exit_code = (instability || failed > 0) ? 1 : 0;
    summary << "\n[result]\n";
    summary << "instability = " << (instability ? "yes" : "no") << '\n';
    summary << "checks_failed = " << failed << " of " << checks.size() << '\n';
    summary << "exit = " << exit_code << '\n';

    {
        std::ofstream out = open_out(out_dir / "summary.txt");
        out << summary.str();
    }
    if (log) *log << summary.str();
    return exit_code;
}

int replay_witness_files(const std::string& witness_path, const std::string& samples_path,
                         std::ostream& log) {
    const WitnessRecord rec = read_witness_file(witness_path);
    const SampleBlock samples = read_samples_file(samples_path);
    const GaussianTarget target(rec.sigma);
    if (samples.m != target.m())
        throw config_error("witness dimension " + std::to_string(target.m()) +
                           " does not match samples dimension " + std::to_string(samples.m));
    const DistanceEstimate replayed = replay_witness(rec.witness, samples, target, rec.prob);
    const double diff = std::abs(replayed.value - rec.value);
    const double band = 3.0 * replayed.std_error;
    const bool pass = diff <= band;
    log << "recorded gap  = " << fmt_g17(rec.value) << '\n';
    log << "replayed gap  = " << fmt_g17(replayed.value) << '\n';
    log << "difference    = " << fmt_g17(diff) << " (3 s.e. band " << fmt_g17(band) << ")\n";
    log << "verdict       = " << (pass ? "match" : "MISMATCH") << '\n';
    return pass ? 0 : 1;
}

}  // namespace poincare
