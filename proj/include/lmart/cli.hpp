#pragma once

// Command-line front end.  Exit codes: 0 pass, 1 a check failed, 2 usage or
// environment error.  Documents go to --out when given, stdout otherwise.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "lmart/errors.hpp"
#include "lmart/gundy.hpp"
#include "lmart/harness.hpp"
#include "lmart/martingale.hpp"
#include "lmart/riemann.hpp"
#include "lmart/serialize.hpp"
#include "lmart/weaktype.hpp"

namespace lmart {

namespace detail {

inline void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-")
        std::cout << content;
    else
        write_text_file(out_path, content);
}

inline void add_config_options(CLI::App* cmd, HarnessConfig& cfg, bool with_trials) {
    cmd->add_option("--seed", cfg.seed, "master RNG seed");
    cmd->add_option("--omega-size", cfg.omega_size, "number of sample points");
    cmd->add_option("--depth", cfg.depth, "filtration depth");
    if (with_trials) cmd->add_option("--trials", cfg.trials, "number of seeded trials");
    cmd->add_option("--tol", cfg.tol, "comparison tolerance");
    cmd->add_flag("--nonneg", cfg.nonneg_only, "generate nonnegative martingales only");
    cmd->add_option("--out", cfg.out_path, "output path (default stdout)");
}

inline int run_generate(const HarnessConfig& cfg) {
    Martingale f = generate_random_martingale(cfg);
    emit(cfg.out_path, martingale_to_json(f).dump(2) + "\n");
    return 0;
}

inline int run_decompose(const HarnessConfig& cfg, double lambda, const std::string& in_path) {
    validate(cfg);
    Martingale f = in_path.empty() ? generate_random_martingale(cfg)
                                   : martingale_from_json(njson::parse(read_text_file(in_path)));
    GundyDecomposition d = gundy_decompose(f, lambda);
    emit(cfg.out_path, gundy_to_json(d).dump(2) + "\n");
    const bool ok = reconstructs(d, f, cfg.tol) && is_martingale(d.u, cfg.tol) &&
                    is_martingale(d.v, cfg.tol) && is_martingale(d.w, cfg.tol);
    return ok ? 0 : 1;
}

inline int run_verify(const HarnessConfig& cfg) {
    SuiteReport report = run_suite(cfg);
    emit(cfg.out_path, suite_report_to_json(report).dump(2) + "\n");
    return report.pass ? 0 : 1;
}

inline int run_weaktype(const HarnessConfig& cfg, const std::string& op_name,
                        const std::string& format) {
    validate(cfg);
    std::vector<WeakTypeCsvRow> rows;
    std::vector<Martingale> sample;
    long failures = 0;
    double max_ratio = 0.0;
    for (long t = 0; t < cfg.trials; ++t) {
        const std::uint64_t tseed = trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
        Rng rng(tseed);
        Martingale f = random_martingale(rng, cfg.omega_size, cfg.depth, cfg.nonneg_only);
        SequenceOperator op = maximal_operator();
        double pin = 1.0;  // conditional maximal inequality, any martingale
        if (op_name == "square") {
            op = square_function_operator();
            pin = componentwise_nonnegative(f) ? 3.0 : 6.0;
        } else if (op_name == "transform") {
            op = transform_maximal_operator(random_predictable_coefficients(rng, f.filtration, 1.0));
            pin = 0.0;  // reported, no asserted constant
        }
        sample.push_back(f);
        for (double lambda : cfg.lambda_grid) {
            WeakTypeSides sides = weak_type_ratio(op, f, lambda);
            for (std::size_t c = 0; c < sides.lhs.size(); ++c) {
                const double denom = sides.rhs.values[c];
                const double ratio = denom > 1e-300 ? sides.lhs.values[c] / denom : 0.0;
                rows.push_back(WeakTypeCsvRow{lambda, ratio, static_cast<int>(c), t});
                max_ratio = std::max(max_ratio, ratio);
                if (pin > 0.0 && ratio > pin + cfg.tol) ++failures;
            }
        }
    }
    if (format == "json") {
        SequenceOperator op = op_name == "square" ? square_function_operator() : maximal_operator();
        njson doc{{"schema", "weaktype/1"},
                  {"op", op_name},
                  {"config", config_to_json(cfg)},
                  {"max_ratio", max_ratio},
                  {"failures", failures},
                  {"class_a", class_a_to_json(verify_class_a(op, sample))}};
        emit(cfg.out_path, doc.dump(2) + "\n");
    } else {
        emit(cfg.out_path, weaktype_csv(rows));
    }
    return failures == 0 ? 0 : 1;
}

inline int run_holder(const HarnessConfig& cfg) {
    validate(cfg);
    std::ostringstream out;
    long bad_holder = 0;
    static const double ps[] = {1.25, 2.0, 4.0};
    for (long t = 0; t < cfg.trials; ++t) {
        Rng rng(trial_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        SpacePtr sp = random_space(rng, cfg.omega_size);
        StepFunction f = random_step_function(rng, sp, 8, -2.0, 2.0);
        StepFunction g = random_step_function(rng, sp, 8, -2.0, 2.0);
        const double p = ps[t % 3];
        HolderSides hs = holder_check(f, g, p, p / (p - 1.0));
        if (!leq(hs.lhs, hs.rhs, cfg.tol)) ++bad_holder;
    }
    out << (bad_holder == 0 ? "[ok]" : "[fail]") << " holder_pairs trials=" << cfg.trials
        << " failures=" << bad_holder << "\n";

    long bad_ortho = 0;
    SpacePtr one = make_space({1.0});
    for (int n = 1; n <= 10; ++n)
        for (int m = 1; m <= 10; ++m) {
            const double got = integrable_product(rademacher(n, one), rademacher(m, one)).values[0];
            if (got != (n == m ? 1.0 : 0.0)) ++bad_ortho;
        }
    out << (bad_ortho == 0 ? "[ok]" : "[fail]") << " rademacher_orthonormality pairs=100"
        << " failures=" << bad_ortho << "\n";

    long bad_refine = 0;
    for (long t = 0; t < cfg.trials; ++t) {
        Rng rng(trial_seed(cfg.seed ^ 0x517cc1b727220a95ULL, static_cast<std::uint64_t>(t)));
        SpacePtr sp = random_space(rng, cfg.omega_size);
        StepFunction f = random_step_function(rng, sp, 6, -2.0, 2.0);
        std::vector<Rat> cuts = f.partition.cuts;
        for (std::size_t i = 1; i < f.partition.cuts.size(); ++i)
            cuts.push_back((f.partition.cuts[i - 1] + f.partition.cuts[i]) / 2);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        Partition1D fine = make_partition1d(std::move(cuts));
        RiemannSums coarse = lower_upper_sums(f, f.partition);
        RiemannSums refined = lower_upper_sums(f, fine);
        if (!leq(coarse.lower, refined.lower) || !leq(refined.upper, coarse.upper)) ++bad_refine;
    }
    out << (bad_refine == 0 ? "[ok]" : "[fail]") << " refinement_monotonicity trials=" << cfg.trials
        << " failures=" << bad_refine << "\n";

    long bad_gap = 0;
    static const double gap_ps[] = {1.0, 1.5, 2.0, 3.0, 0.25, 0.5, 0.9};
    for (long t = 0; t < 200; ++t) {
        Rng rng(trial_seed(cfg.seed ^ 0x2545F4914F6CDD1DULL, static_cast<std::uint64_t>(t)));
        SpacePtr sp = random_space(rng, cfg.omega_size);
        PowerGapBounds pg = power_gap_bounds(random_element(rng, sp, 0.0, 2.0),
                                             random_element(rng, sp, 0.0, 2.0), gap_ps[t % 7]);
        if (!leq(pg.lhs, pg.rhs, cfg.tol)) ++bad_gap;
    }
    out << (bad_gap == 0 ? "[ok]" : "[fail]") << " power_gap_bounds trials=200"
        << " failures=" << bad_gap << "\n";

    const long total = bad_holder + bad_ortho + bad_refine + bad_gap;
    out << (total == 0 ? "[ok]" : "[fail]") << " holder_suite\n";
    emit(cfg.out_path, out.str());
    return total == 0 ? 0 : 1;
}

}  // namespace detail

inline int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"martingale decomposition and weak-type toolkit on finite sample spaces"};
    app.require_subcommand(1);

    HarnessConfig gen_cfg, dec_cfg, ver_cfg, wk_cfg, hol_cfg;
    double lambda = 0.5;
    std::string in_path, op_name = "maximal", format = "csv";

    CLI::App* gen = app.add_subcommand("generate", "emit a seeded random martingale (martingale/1)");
    detail::add_config_options(gen, gen_cfg, false);

    CLI::App* dec = app.add_subcommand("decompose", "decompose a martingale at a threshold (gundy/1)");
    detail::add_config_options(dec, dec_cfg, false);
    dec->add_option("--lambda", lambda, "decomposition threshold");
    dec->add_option("--in", in_path, "read the martingale from a martingale/1 JSON file");

    CLI::App* ver = app.add_subcommand("verify", "run the seeded property suite (suite/1)");
    detail::add_config_options(ver, ver_cfg, true);

    CLI::App* wk = app.add_subcommand("weaktype", "weak-type ratio sweep (CSV or weaktype/1)");
    detail::add_config_options(wk, wk_cfg, true);
    wk->add_option("--op", op_name, "operator: maximal | square | transform")
        ->check(CLI::IsMember({"maximal", "square", "transform"}));
    wk->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    CLI::App* hol = app.add_subcommand("holder", "integration checks: Holder, orthonormality, refinement");
    detail::add_config_options(hol, hol_cfg, true);

    std::vector<const char*> argv;
    argv.push_back("lmart");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (gen->parsed()) return detail::run_generate(gen_cfg);
        if (dec->parsed()) return detail::run_decompose(dec_cfg, lambda, in_path);
        if (ver->parsed()) return detail::run_verify(ver_cfg);
        if (wk->parsed()) return detail::run_weaktype(wk_cfg, op_name, format);
        if (hol->parsed()) return detail::run_holder(hol_cfg);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const njson::exception& e) {
        std::cerr << "parse_error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace lmart
