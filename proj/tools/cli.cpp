#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bgsa/baselines.hpp"
#include "bgsa/errors.hpp"
#include "bgsa/evaluation.hpp"
#include "bgsa/io.hpp"
#include "bgsa/model.hpp"
#include "bgsa/parallel.hpp"
#include "bgsa/sampler.hpp"
#include "bgsa/simgen.hpp"
#include "bgsa/version.hpp"

namespace bgsa::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Every run writes metadata.json next to its outputs. "options" holds the
// resolved flag values (everything except --out and --threads) so `replay`
// can re-run the command; outputs never depend on the thread count.
void write_metadata(const fs::path& dir, const std::string& command, json options, json extra) {
    json meta = {{"command", command}, {"options", std::move(options)}, {"versions", io::version_info()}};
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    io::write_json(meta, dir / "metadata.json");
}

json gmt_report_json(const io::GmtLoadReport& r) {
    return {{"sets_read", r.sets_read},
            {"dropped_sets", r.dropped_sets},
            {"dropped_genes", r.dropped_genes},
            {"duplicate_genes", r.duplicate_genes}};
}

GeneSetCollection load_sets(const std::string& gmt, const ExpressionDataset& data, io::GmtLoadReport& rep,
                            std::ostream& err) {
    GeneSetCollection sets = io::parse_gmt(gmt, data, &rep);
    if (rep.dropped_genes > 0) {
        err << "warning: " << rep.dropped_genes << " gene membership(s) in " << gmt << " not found in the matrix\n";
    }
    if (rep.dropped_sets > 0) {
        err << "warning: dropped " << rep.dropped_sets << " gene set(s) with fewer than 2 matched genes\n";
    }
    if (sets.size() == 0) throw InputError(gmt + ": no gene set has 2 or more genes in the matrix");
    return sets;
}

void check_cutoff(double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw InputError("--cutoff must lie strictly between 0 and 1");
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string matrix, labels, gmt, out;
    std::string variant = "mixture";
    std::size_t iters = 2000;
    std::size_t burnin = 500;
    std::uint64_t seed = 0;
    double cutoff = 0.1;
    bool rao_blackwell = false;
    bool flagged_only = false;
};

int run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    check_cutoff(a.cutoff);
    McmcConfig cfg;
    cfg.n_iterations = a.iters;
    cfg.burn_in = a.burnin;
    cfg.seed = a.seed;
    cfg.model_variant = parse_variant(a.variant);
    if (a.rao_blackwell && cfg.model_variant != ModelVariant::mixture) {
        throw InputError("--rao-blackwell needs the mixture variant");
    }
    cfg.rao_blackwell = a.rao_blackwell;
    cfg.validate();

    const ExpressionDataset data = io::read_matrix(a.matrix, a.labels);
    io::GmtLoadReport rep;
    const GeneSetCollection sets = load_sets(a.gmt, data, rep, err);
    const BoundProblem problem = validate_and_bind(data, sets);
    const ChainTrace trace = run_chain(problem, cfg);
    const PosteriorSummary summary = summarize(trace, problem, cfg.rao_blackwell);
    io::write_results(summary, a.out, a.cutoff, a.flagged_only);

    std::size_t flagged = 0;
    for (const auto& s : summary.sets) flagged += s.prob_null && *s.prob_null <= a.cutoff;

    json options = {{"matrix", a.matrix},   {"labels", a.labels}, {"gmt", a.gmt},       {"variant", a.variant},
                    {"iters", a.iters},     {"burnin", a.burnin}, {"seed", a.seed},     {"cutoff", a.cutoff},
                    {"rao-blackwell", a.rao_blackwell}, {"flagged-only", a.flagged_only}};
    json diag = io::to_json(summary.diagnostics);
    diag["gmt"] = gmt_report_json(rep);
    write_metadata(a.out, "fit", std::move(options),
                   {{"seed", cfg.seed}, {"config", io::to_json(cfg)}, {"cutoff", a.cutoff}, {"diagnostics", diag}});

    out << "fitted " << summary.sets.size() << " gene sets (" << problem.n_slots() << " gene slots, "
        << summary.retained << " retained draws)";
    if (cfg.model_variant == ModelVariant::mixture) out << "; " << flagged << " with P(v=0|D) <= " << a.cutoff;
    out << "\nresults in " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- baseline

struct BaselineArgs {
    std::string matrix, labels, gmt, out;
    std::string method = "maxmean";
    std::size_t perms = 1000;
    std::size_t randomizations = 100;
    bool restandardize = false;
    bool exhaustive = false;
    std::uint64_t seed = 0;
};

int run_baseline(const BaselineArgs& a, unsigned threads, std::ostream& out, std::ostream& err) {
    BaselineOptions opts;
    opts.method = parse_statistic(a.method);
    opts.n_permutations = a.perms;
    opts.n_randomizations = a.randomizations;
    opts.restandardize = a.restandardize;
    opts.exhaustive = a.exhaustive;
    opts.seed = a.seed;
    opts.threads = threads;

    const ExpressionDataset data = io::read_matrix(a.matrix, a.labels);
    io::GmtLoadReport rep;
    const GeneSetCollection sets = load_sets(a.gmt, data, rep, err);
    const BaselineResult result = permutation_pvalues(data, sets, opts);
    io::write_results(result, a.out);

    json options = {{"matrix", a.matrix},
                    {"labels", a.labels},
                    {"gmt", a.gmt},
                    {"method", a.method},
                    {"perms", a.perms},
                    {"randomizations", a.randomizations},
                    {"restandardize", a.restandardize},
                    {"exhaustive", a.exhaustive},
                    {"seed", a.seed}};
    json diag = {{"degenerate_genes", result.degenerate_genes},
                 {"degenerate_restandardization", result.degenerate_restandardization},
                 {"gmt", gmt_report_json(rep)}};
    write_metadata(a.out, "baseline", std::move(options),
                   {{"seed", a.seed}, {"n_permutations", result.n_permutations}, {"diagnostics", diag}});

    if (result.degenerate_genes > 0) {
        err << "warning: " << result.degenerate_genes << " gene(s) with zero within-class variance scored as 0\n";
    }
    const auto best = std::min_element(result.perm_pvalue.begin(), result.perm_pvalue.end());
    out << a.method << " p-values for " << result.set_names.size() << " sets (" << result.n_permutations
        << (result.exhaustive ? " relabellings, exhaustive" : " permutations") << "); smallest "
        << io::format_sig(*best) << " (" << result.set_names[best - result.perm_pvalue.begin()] << ")\nresults in "
        << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    const Scenario sc = parse_scenario(a.scenario);
    const SimulatedData sim = generate(sc, a.seed);
    const fs::path dir = a.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw Error("cannot create output directory " + a.out);
    io::write_matrix(sim.data, dir / "matrix.tsv", dir / "labels.tsv");
    io::write_gmt(sim.sets, sim.data, dir / "sets.gmt");
    io::write_truth(sim.truth, dir / "truth.json");
    write_metadata(dir, "simulate", {{"scenario", a.scenario}, {"seed", a.seed}}, {{"seed", a.seed}});
    out << to_string(sc) << ": " << sim.data.n_genes() << " genes x " << sim.data.n_samples() << " samples, "
        << sim.sets.size() << " sets\nresults in " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::vector<std::string> scenarios{"sim1", "sim2"};
    std::vector<std::string> methods{"bgsa", "maxmean", "mean-z", "mean-abs-z", "ks"};
    std::size_t replicates = 20;
    std::size_t iters = 2000;
    std::size_t burnin = 500;
    std::size_t perms = 200;
    std::size_t randomizations = 100;
    bool rao_blackwell = false;
    bool full_scale = false;
    std::uint64_t seed = 0;
    std::string out;
};

int run_benchmark_cmd(const BenchmarkArgs& a, unsigned threads, std::ostream& out) {
    BenchmarkConfig cfg;
    cfg.scenarios.clear();
    for (const auto& s : a.scenarios) cfg.scenarios.push_back(parse_scenario(s));
    cfg.methods.clear();
    for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
    cfg.n_replicates = a.replicates;
    cfg.mcmc.n_iterations = a.iters;
    cfg.mcmc.burn_in = a.burnin;
    cfg.mcmc.rao_blackwell = a.rao_blackwell;
    cfg.n_permutations = a.perms;
    cfg.n_randomizations = a.randomizations;
    cfg.seed = a.seed;
    cfg.threads = threads;
    cfg.validate();

    const BenchmarkReport report = run_benchmark(cfg);
    io::write_results(report, a.out);

    json options = {{"scenarios", a.scenarios},
                    {"methods", a.methods},
                    {"replicates", a.replicates},
                    {"iters", a.iters},
                    {"burnin", a.burnin},
                    {"perms", a.perms},
                    {"randomizations", a.randomizations},
                    {"rao-blackwell", a.rao_blackwell},
                    {"seed", a.seed}};
    write_metadata(a.out, "benchmark", std::move(options), {{"seed", a.seed}, {"config", io::to_json(cfg.mcmc)}});

    out << io::format_benchmark_table(report) << "results in " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- demo-prior

struct DemoArgs {
    std::size_t reps = 1000;
    std::size_t draws = 100;
    std::uint64_t seed = 0;
    std::string out;
};

int run_demo_prior(const DemoArgs& a, std::ostream& out) {
    if (a.reps == 0) throw InputError("--reps must be positive");
    if (a.draws < 3) throw InputError("--draws must be at least 3");
    const PriorCorrelationDemo demo = gen_prior_correlation_demo(a.reps, a.draws, a.seed);
    const fs::path dir = a.out;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw Error("cannot create output directory " + a.out);
    std::string tsv = "rep\tr_within\tr_between\n";
    for (std::size_t r = 0; r < a.reps; ++r) {
        tsv += std::to_string(r) + '\t' + io::format_exact(demo.r_within[r]) + '\t' +
               io::format_exact(demo.r_between[r]) + '\n';
    }
    io::write_text_atomic(dir / "prior_correlation.tsv", tsv);
    write_metadata(dir, "demo-prior", {{"reps", a.reps}, {"draws", a.draws}, {"seed", a.seed}}, {{"seed", a.seed}});

    const auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out << "mean r_within " << io::format_sig(mean(demo.r_within)) << ", mean r_between "
        << io::format_sig(mean(demo.r_between)) << "\nresults in " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- replay

std::vector<std::string> replay_args(const json& meta, const std::string& out_dir, std::optional<unsigned> threads) {
    const auto command = meta.at("command").get<std::string>();
    std::vector<std::string> args{command};
    const json& options = meta.at("options");
    for (auto it = options.begin(); it != options.end(); ++it) {
        const std::string& key = it.key();
        const json& value = it.value();
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + v.get<std::string>();
            args.push_back("--" + key);
            args.push_back(joined);
        } else if (value.is_string()) {
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back("--" + key);
            args.push_back(value.dump());
        }
    }
    args.push_back("--out");
    args.push_back(out_dir);
    if (threads && (command == "baseline" || command == "benchmark")) {
        args.push_back("--threads");
        args.push_back(std::to_string(*threads));
    }
    return args;
}

void add_io_flags(CLI::App* sub, std::string& matrix, std::string& labels, std::string& gmt, std::string& out) {
    sub->add_option("--matrix", matrix, "Expression matrix TSV (gene_id, then one column per sample)")->required();
    sub->add_option("--labels", labels, "Class labels TSV (sample_id, 0 = control / 1 = treatment)")->required();
    sub->add_option("--gmt", gmt, "Gene sets in GMT format")->required();
    sub->add_option("--out", out, "Output directory (created if missing)")->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian gene set analysis", "bgsa"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    unsigned threads = default_thread_count();
    const std::string threads_help = "Worker threads (default: BGSA_THREADS or 1); results do not depend on it";

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the hierarchical model and rank gene sets");
    add_io_flags(fit_cmd, fit.matrix, fit.labels, fit.gmt, fit.out);
    fit_cmd->add_option("--variant", fit.variant, "Model variant")
        ->check(CLI::IsMember({"simple", "mixture"}))
        ->capture_default_str();
    fit_cmd->add_option("--iters", fit.iters, "Total MCMC iterations")->capture_default_str();
    fit_cmd->add_option("--burnin", fit.burnin, "Burn-in iterations (must be < --iters)")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
    fit_cmd->add_option("--cutoff", fit.cutoff, "Flag sets with P(v=0|D) at or below this value")
        ->capture_default_str();
    fit_cmd->add_flag("--rao-blackwell", fit.rao_blackwell,
                      "Estimate P(v=0|D) from conditional probabilities instead of indicator frequencies");
    fit_cmd->add_flag("--flagged-only", fit.flagged_only, "List only sets at or below --cutoff in sets.tsv");

    BaselineArgs base;
    auto* base_cmd = app.add_subcommand("baseline", "Permutation p-values for a frequentist gene set statistic");
    add_io_flags(base_cmd, base.matrix, base.labels, base.gmt, base.out);
    base_cmd->add_option("--method", base.method, "Set statistic")
        ->check(CLI::IsMember({"maxmean", "mean-z", "mean-abs-z", "ks"}))
        ->capture_default_str();
    base_cmd->add_option("--perms", base.perms, "Number of label permutations (>= 100)")->capture_default_str();
    base_cmd->add_flag("--restandardize", base.restandardize, "Restandardize against random gene sets");
    base_cmd->add_option("--randomizations", base.randomizations, "Random gene sets per size for restandardization")
        ->capture_default_str();
    base_cmd->add_flag("--exhaustive", base.exhaustive, "Enumerate every relabelling (at most 12 samples)");
    base_cmd->add_option("--seed", base.seed, "Random seed")->capture_default_str();
    base_cmd->add_option("--threads", threads, threads_help);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic dataset with its ground truth");
    sim_cmd->add_option("--scenario", sim.scenario, "Design to simulate")
        ->required()
        ->check(CLI::IsMember({"illustrative", "all-shifted", "sim1", "sim2", "sim3", "sim4", "sim5", "sim6"}));
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Output directory (created if missing)")->required();

    BenchmarkArgs bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "Compare methods by AUC over simulated replicates");
    bench_cmd->add_option("--scenarios", bench.scenarios, "Comma-separated scenarios (sim1..sim6)")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods: bgsa, bgsa-simple, maxmean, mean-z, "
                                                      "mean-abs-z, ks")
        ->delimiter(',')
        ->capture_default_str();
    auto* reps_opt = bench_cmd->add_option("--replicates", bench.replicates, "Replicates per scenario")
                         ->capture_default_str();
    auto* iters_opt = bench_cmd->add_option("--iters", bench.iters, "MCMC iterations per fit")->capture_default_str();
    auto* burn_opt = bench_cmd->add_option("--burnin", bench.burnin, "MCMC burn-in per fit")->capture_default_str();
    auto* scen_opt = bench_cmd->get_option("--scenarios");
    bench_cmd->add_option("--perms", bench.perms, "Permutations per baseline run")->capture_default_str();
    bench_cmd->add_option("--randomizations", bench.randomizations, "Random gene sets per size (maxmean)")
        ->capture_default_str();
    bench_cmd->add_flag("--rao-blackwell", bench.rao_blackwell, "Rao-Blackwellized P(v=0|D) for the mixture model");
    bench_cmd->add_flag("--full-scale", bench.full_scale,
                        "Full study: sim1..sim6, 100 replicates, 4000 iterations with 500 burn-in (hours)");
    bench_cmd->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
    bench_cmd->add_option("--threads", threads, threads_help);
    bench_cmd->add_option("--out", bench.out, "Output directory (created if missing)")->required();

    DemoArgs demo;
    auto* demo_cmd = app.add_subcommand("demo-prior", "Prior correlation of |beta| within and between gene sets");
    demo_cmd->add_option("--reps", demo.reps, "Repetitions")->capture_default_str();
    demo_cmd->add_option("--draws", demo.draws, "Prior draws per repetition")->capture_default_str();
    demo_cmd->add_option("--seed", demo.seed, "Random seed")->capture_default_str();
    demo_cmd->add_option("--out", demo.out, "Output directory (created if missing)")->required();

    std::string replay_meta, replay_out;
    std::optional<unsigned> replay_threads;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a metadata.json");
    replay_cmd->add_option("--metadata", replay_meta, "metadata.json written by an earlier run")->required();
    replay_cmd->add_option("--out", replay_out, "Output directory for the re-run")->required();
    replay_cmd->add_option("--threads", replay_threads, threads_help);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "bgsa: error: " << e.what() << "\n\n";
        const CLI::App* shown = &app;
        for (const auto* sub : app.get_subcommands({})) {
            if (sub->parsed()) shown = sub;
        }
        err << shown->help();
        return kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return run_fit(fit, out, err);
        if (base_cmd->parsed()) return run_baseline(base, threads, out, err);
        if (sim_cmd->parsed()) return run_simulate(sim, out);
        if (bench_cmd->parsed()) {
            if (bench.full_scale) {
                if (!scen_opt->count()) bench.scenarios = {"sim1", "sim2", "sim3", "sim4", "sim5", "sim6"};
                if (!reps_opt->count()) bench.replicates = 100;
                if (!iters_opt->count()) bench.iters = 4000;
                if (!burn_opt->count()) bench.burnin = 500;
            }
            return run_benchmark_cmd(bench, threads, out);
        }
        if (demo_cmd->parsed()) return run_demo_prior(demo, out);
        if (replay_cmd->parsed()) {
            const json meta = io::read_json(replay_meta);
            std::vector<std::string> again;
            try {
                again = replay_args(meta, replay_out, replay_threads);
            } catch (const json::exception& e) {
                throw InputError(replay_meta + ": not a run metadata file (" + e.what() + ")");
            }
            if (again.front() == "replay") throw InputError(replay_meta + ": cannot replay a replay");
            return run(again, out, err);
        }
    } catch (const InputError& e) {
        err << "bgsa: error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "bgsa: error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "bgsa: runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace bgsa::cli
