#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curvatlas/curve.hpp"
#include "curvatlas/experiment.hpp"
#include "curvatlas/generators.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::int64_t seed = -1;
    long trials = -1;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
    auto* c = cmd->add_option("--config", o.config_path, "experiment config file");
    if (config_required) c->required();
    cmd->add_option("--seed", o.seed, "override the experiment seed");
    cmd->add_option("--trials", o.trials, "override the trial count");
    cmd->add_option("--out", o.out, "output path prefix");
    cmd->add_option("--threads", o.threads, "worker thread count");
}

curvatlas::ExperimentConfig load_with_overrides(const CommonOpts& o) {
    curvatlas::ExperimentConfig cfg = curvatlas::load_experiment_config(o.config_path);
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (o.trials >= 0) cfg.trials = o.trials;
    if (o.threads >= 0) cfg.threads = o.threads;
    if (!o.out.empty()) cfg.output_path = o.out;
    cfg.validate();
    return cfg;
}

int run_kind(const CommonOpts& o, const std::vector<curvatlas::ExperimentKind>& allowed) {
    curvatlas::ExperimentConfig cfg = load_with_overrides(o);
    if (!allowed.empty()) {
        bool ok = false;
        for (auto k : allowed) ok = ok || k == cfg.experiment;
        if (!ok) cfg.experiment = allowed.front();
    }
    curvatlas::ResultRecord rec = curvatlas::run_experiment(cfg);
    std::cout << rec.records_text();
    if (!cfg.output_path.empty()) {
        curvatlas::emit_table(rec, "records", cfg.output_path);
        curvatlas::emit_table(rec, "csv", cfg.output_path);
    }
    return 0;
}

int run_generate(const CommonOpts& o) {
    curvatlas::ExperimentConfig cfg = load_with_overrides(o);
    const long trials = cfg.trials;
    for (long t = 0; t < trials; ++t) {
        const curvatlas::CurveConfig F =
            curvatlas::draw_config(cfg.generator, static_cast<std::uint64_t>(t));
        if (cfg.output_path.empty()) {
            curvatlas::write_curveset(std::cout, F);
        } else {
            const std::string path = trials == 1 ? cfg.output_path + ".curveset"
                                                 : cfg.output_path + "." + std::to_string(t) +
                                                       ".curveset";
            curvatlas::write_curveset_file(path, F);
            std::cout << "wrote " << path << " curves=" << F.curves.size() << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using curvatlas::ExperimentKind;
    CLI::App app{"curvatlas: random curve systems - counting, crossings, capacity"};
    app.require_subcommand(1);

    CommonOpts gen_o, ana_o, cro_o, cap_o, dis_o, exp_o;
    CLI::App* gen = app.add_subcommand("generate", "draw curve configurations to curveset files");
    add_common(gen, gen_o, true);
    CLI::App* ana = app.add_subcommand("analyze", "dimension and regularity fits");
    add_common(ana, ana_o, true);
    CLI::App* cro = app.add_subcommand("crossings", "lambda/rho crossing-probability scans");
    add_common(cro, cro_o, true);
    CLI::App* cap = app.add_subcommand("capacity", "hierarchy capacity and sparsity checks");
    add_common(cap, cap_o, true);
    CLI::App* dis = app.add_subcommand("distance", "configuration distance experiments");
    add_common(dis, dis_o, true);
    CLI::App* exp = app.add_subcommand("experiment", "run the experiment the config describes");
    add_common(exp, exp_o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_generate(gen_o);
        if (ana->parsed()) return run_kind(ana_o, {ExperimentKind::dimension});
        if (cro->parsed())
            return run_kind(cro_o, {ExperimentKind::lambda_scan, ExperimentKind::rho_scan});
        if (cap->parsed())
            return run_kind(cap_o, {ExperimentKind::capacity, ExperimentKind::sparsity});
        if (dis->parsed()) return run_kind(dis_o, {ExperimentKind::distance});
        if (exp->parsed()) return run_kind(exp_o, {});
    } catch (const curvatlas::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const curvatlas::ExperimentAbort& e) {
        std::cerr << "abort: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "abort: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
