// slc: train, test, and sweep robust control pulses for the built-in qubit
// models, from flat key-value config files. All outputs are deterministic
// functions of the resolved configuration (no timestamps, fixed-order
// reductions), so reruns with equal configs produce byte-identical files.
//
// Exit codes: 0 success (training converged), 2 stopped at max_iterations,
// 3 configuration error, 4 I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slc/config.hpp"
#include "slc/evaluation.hpp"
#include "slc/field_file.hpp"
#include "slc/io.hpp"
#include "slc/model.hpp"
#include "slc/optimizer.hpp"
#include "slc/parallel.hpp"
#include "slc/sampling.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config;
    std::uint64_t seed_train = 0;
    std::uint64_t seed_test = 0;
    std::string out;
    int threads = 0;
    bool dump_samples = false;
    CLI::Option* o_config = nullptr;
    CLI::Option* o_seed_train = nullptr;
    CLI::Option* o_seed_test = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_threads = nullptr;
    CLI::Option* o_dump = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    f.o_config = cmd->add_option("--config", f.config, "Key-value config file");
    f.o_seed_train = cmd->add_option("--seed-train", f.seed_train, "Training seed (recorded)");
    f.o_seed_test = cmd->add_option("--seed-test", f.seed_test, "Test-sampling seed");
    f.o_out = cmd->add_option("--out", f.out, "Output directory");
    f.o_threads = cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware)");
    f.o_dump = cmd->add_flag("--dump-samples", f.dump_samples, "Write per-sample fidelity CSVs");
}

// Precedence: defaults < config file < SLC_* environment < command line.
slc::RunConfig resolve_config(const CommonFlags& f) {
    std::string path = f.o_config->count() ? f.config : "";
    if (path.empty())
        if (const char* v = std::getenv("SLC_CONFIG")) path = v;
    slc::RunConfig cfg;
    if (!path.empty()) cfg = slc::load_config_file(path);
    if (const char* v = std::getenv("SLC_SEED_TRAIN")) slc::apply_config_key(cfg, "seed_train", v);
    if (const char* v = std::getenv("SLC_SEED_TEST")) slc::apply_config_key(cfg, "seed_test", v);
    if (const char* v = std::getenv("SLC_OUT")) slc::apply_config_key(cfg, "out", v);
    if (const char* v = std::getenv("SLC_THREADS")) slc::apply_config_key(cfg, "threads", v);
    if (const char* v = std::getenv("SLC_DUMP_SAMPLES"))
        slc::apply_config_key(cfg, "dump_samples", v);
    if (f.o_seed_train->count())
        slc::apply_config_key(cfg, "seed_train", std::to_string(f.seed_train));
    if (f.o_seed_test->count())
        slc::apply_config_key(cfg, "seed_test", std::to_string(f.seed_test));
    if (f.o_out->count()) slc::apply_config_key(cfg, "out", f.out);
    if (f.o_threads->count()) slc::apply_config_key(cfg, "threads", std::to_string(f.threads));
    if (f.o_dump->count()) cfg.dump_samples = true;
    return cfg;
}

std::string out_path(const slc::RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw slc::IoError("cannot create output directory " + cfg.out + ": " + ec.message());
    return (fs::path(cfg.out) / name).string();
}

std::string report_row(const slc::TestReport& r) {
    return slc::format_double(r.mean) + "," + slc::format_double(r.stddev) + "," +
           slc::format_double(r.min) + "," + std::to_string(r.n) + "," + std::to_string(r.seed);
}

std::string sweep_csv(const std::vector<slc::SweepPoint>& pts, const std::string& lead_name,
                      bool lead_is_nf, const std::string& prefix_header = "",
                      const std::string& prefix_value = "") {
    std::string s;
    if (!prefix_header.empty()) s += prefix_header + ",";
    s += lead_name + ",mean_fidelity,std_fidelity,min_fidelity,n,seed\n";
    for (const auto& p : pts) {
        if (!prefix_value.empty()) s += prefix_value + ",";
        s += (lead_is_nf ? std::to_string(p.nf) : slc::format_double(p.theta)) + "," +
             report_row(p.report) + "\n";
    }
    return s;
}

std::string sweep_training_csv(const std::vector<slc::SweepPoint>& pts,
                               const std::string& prefix_header = "",
                               const std::string& prefix_value = "") {
    std::string s;
    if (!prefix_header.empty()) s += prefix_header + ",";
    s += "theta,nf,converged,iterations,J_final\n";
    for (const auto& p : pts) {
        if (!prefix_value.empty()) s += prefix_value + ",";
        s += slc::format_double(p.theta) + "," + std::to_string(p.nf) + "," +
             (p.converged ? "1" : "0") + "," + std::to_string(p.iterations) + "," +
             slc::format_double(p.J_final) + "\n";
    }
    return s;
}

std::string histogram_csv(const slc::TestReport& r) {
    std::string s = "bin,lo,hi,count\n";
    for (std::size_t b = 0; b < r.histogram.size(); ++b)
        s += std::to_string(b) + "," + slc::format_double(0.01 * static_cast<double>(b)) + "," +
             slc::format_double(0.01 * static_cast<double>(b + 1)) + "," +
             std::to_string(r.histogram[b]) + "\n";
    return s;
}

std::string samples_csv(const slc::QubitModel& model,
                        const std::vector<slc::FluctuationSample>& samples,
                        const std::vector<double>& fidelities) {
    std::string s = "sample";
    for (const auto& p : model.params) s += "," + p.name;
    s += ",fidelity\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        s += std::to_string(i);
        for (double v : samples[i].values) s += "," + slc::format_double(v);
        s += "," + slc::format_double(fidelities[i]) + "\n";
    }
    return s;
}

void echo_config(const slc::RunConfig& cfg) {
    slc::write_text_file(out_path(cfg, "config_resolved.cfg"), slc::resolved_config_text(cfg));
}

void reject_group_overrides(const slc::RunConfig& cfg, const std::string& cmd) {
    if (!cfg.theta_group.empty())
        throw slc::ConfigError(cmd + ": per-group theta.<group> overrides are not supported here"
                                     " (the swept bound applies to every group)");
    if (!cfg.nf_group.empty())
        throw slc::ConfigError(cmd + ": per-group nf.<group> overrides are not supported here");
}

int cmd_train(const slc::RunConfig& cfg) {
    const slc::QubitModel model = slc::configured_model(cfg);
    const auto sizes = slc::configured_grid_sizes(cfg, model);
    const auto ensemble = slc::training_grid(model.params, sizes);
    const slc::ControlField init = slc::reference_initial_field(model);
    const int threads = slc::resolve_threads(cfg.threads);
    const slc::TrainingResult tr =
        slc::train(model, ensemble, init, slc::optimizer_config(cfg, threads));

    echo_config(cfg);
    slc::FieldFileData fd;
    fd.model_id = model.id;
    fd.field = tr.field;
    fd.seed_train = cfg.seed_train;
    fd.objective = tr.J_history.back();
    fd.converged = tr.converged;
    fd.iterations = tr.iterations;
    slc::save_field_file(out_path(cfg, "field.slc"), fd);

    std::string j = "iteration,J\n";
    for (std::size_t i = 0; i < tr.J_history.size(); ++i)
        j += std::to_string(i) + "," + slc::format_double(tr.J_history[i]) + "\n";
    slc::write_text_file(out_path(cfg, "j_history.csv"), j);

    if (cfg.dump_samples)
        slc::write_text_file(out_path(cfg, "train_samples.csv"),
                             samples_csv(model, ensemble, tr.sample_fidelities));

    std::printf("train: model=%s samples=%d J=%s iterations=%d converged=%d\n", model.id.c_str(),
                static_cast<int>(ensemble.size()), slc::format_double(fd.objective).c_str(),
                tr.iterations, tr.converged ? 1 : 0);
    return tr.converged ? 0 : 2;
}

int cmd_test(const std::string& field_path, slc::RunConfig cfg) {
    const slc::FieldFileData fd = slc::load_field_file(field_path);
    if (!cfg.model.empty() && cfg.model != fd.model_id)
        throw slc::ConfigError("config model '" + cfg.model + "' does not match field file model '" +
                               fd.model_id + "'");
    cfg.model = fd.model_id;
    const slc::QubitModel model = slc::configured_model(cfg);
    const int threads = slc::resolve_threads(cfg.threads);

    const auto samples =
        slc::draw_test_samples(model, cfg.n_test, cfg.seed_test, cfg.test_distribution);
    const auto fids = slc::sample_fidelities(fd.field, model, samples, threads);
    const slc::TestReport rep = slc::summarize_fidelities(fids, cfg.seed_test);

    echo_config(cfg);
    slc::write_text_file(out_path(cfg, "report.csv"),
                         "theta,mean_fidelity,std_fidelity,min_fidelity,n,seed\n" +
                             slc::format_double(cfg.theta) + "," + report_row(rep) + "\n");
    slc::write_text_file(out_path(cfg, "histogram.csv"), histogram_csv(rep));
    if (cfg.dump_samples)
        slc::write_text_file(out_path(cfg, "test_samples.csv"), samples_csv(model, samples, fids));

    std::printf("test: model=%s mean=%s std=%s min=%s n=%d seed=%llu\n", model.id.c_str(),
                slc::format_double(rep.mean).c_str(), slc::format_double(rep.stddev).c_str(),
                slc::format_double(rep.min).c_str(), rep.n,
                static_cast<unsigned long long>(rep.seed));
    return 0;
}

int cmd_sweep_bound(const slc::RunConfig& cfg) {
    reject_group_overrides(cfg, "sweep-bound");
    const slc::QubitModel probe = slc::configured_model(cfg);  // validates model key
    slc::detail::check_grid_size_allowed(cfg, "nf", cfg.nf);
    const int threads = slc::resolve_threads(cfg.threads);
    const auto pts = slc::sweep_bound(slc::model_kind_from_id(probe.id), cfg.bounds, cfg.nf,
                                      slc::optimizer_config(cfg, threads), cfg.seed_test,
                                      cfg.n_test, cfg.test_distribution);
    echo_config(cfg);
    slc::write_text_file(out_path(cfg, "sweep_bound.csv"), sweep_csv(pts, "theta", false));
    slc::write_text_file(out_path(cfg, "sweep_bound_training.csv"), sweep_training_csv(pts));
    bool all = true;
    for (const auto& p : pts) {
        all = all && p.converged;
        std::printf("sweep-bound: theta=%s mean=%s converged=%d\n",
                    slc::format_double(p.theta).c_str(), slc::format_double(p.report.mean).c_str(),
                    p.converged ? 1 : 0);
    }
    return all ? 0 : 2;
}

int cmd_sweep_nf(const slc::RunConfig& cfg) {
    reject_group_overrides(cfg, "sweep-nf");
    const slc::QubitModel probe = slc::configured_model(cfg);
    for (int n : cfg.nf_list) slc::detail::check_grid_size_allowed(cfg, "nf_list", n);
    const int threads = slc::resolve_threads(cfg.threads);
    const auto pts = slc::sweep_sample_count(slc::model_kind_from_id(probe.id), cfg.theta,
                                             cfg.nf_list, slc::optimizer_config(cfg, threads),
                                             cfg.seed_test, cfg.n_test, cfg.test_distribution);
    echo_config(cfg);
    slc::write_text_file(out_path(cfg, "sweep_nf.csv"), sweep_csv(pts, "nf", true));
    slc::write_text_file(out_path(cfg, "sweep_nf_training.csv"), sweep_training_csv(pts));
    bool all = true;
    for (const auto& p : pts) {
        all = all && p.converged;
        std::printf("sweep-nf: nf=%d mean=%s converged=%d\n", p.nf,
                    slc::format_double(p.report.mean).c_str(), p.converged ? 1 : 0);
    }
    return all ? 0 : 2;
}

int cmd_reproduce(int figure, slc::RunConfig cfg) {
    // Presets pin the experiment definition; seeds, output directory, thread
    // count, and dump flag still come from the user.
    cfg.theta_group.clear();
    cfg.nf_group.clear();
    cfg.test_distribution = slc::TestDistribution::model_default;
    cfg.n_test = 5000;
    cfg.nf = 5;
    cfg.bounds = slc::default_sweep_bounds();
    cfg.nf_list = slc::default_sweep_grid_sizes();
    const int threads = slc::resolve_threads(cfg.threads);
    const slc::OptimizationConfig oc = slc::optimizer_config(cfg, threads);

    if (figure == 1) {
        cfg.model = "single_charge_excited";
        const auto case1 = slc::sweep_bound(slc::ModelKind::single_charge_excited, cfg.bounds,
                                            cfg.nf, oc, cfg.seed_test, cfg.n_test,
                                            cfg.test_distribution);
        const auto case2 = slc::sweep_bound(slc::ModelKind::single_charge_superposition,
                                            cfg.bounds, cfg.nf, oc, cfg.seed_test, cfg.n_test,
                                            cfg.test_distribution);
        echo_config(cfg);
        std::string csv = sweep_csv(case1, "theta", false, "case", "1");
        const std::string second = sweep_csv(case2, "theta", false, "case", "2");
        csv += second.substr(second.find('\n') + 1);  // drop the repeated header
        slc::write_text_file(out_path(cfg, "fig1.csv"), csv);
        std::string tcsv = sweep_training_csv(case1, "case", "1");
        const std::string tsecond = sweep_training_csv(case2, "case", "2");
        tcsv += tsecond.substr(tsecond.find('\n') + 1);
        slc::write_text_file(out_path(cfg, "fig1_training.csv"), tcsv);
        bool all = true;
        for (const auto& p : case1) all = all && p.converged;
        for (const auto& p : case2) all = all && p.converged;
        std::printf("reproduce 1: %zu rows written\n", case1.size() + case2.size());
        return all ? 0 : 2;
    }
    if (figure == 2) {
        cfg.model = "single_charge_superposition";
        cfg.theta = 0.15;
        const auto pts = slc::sweep_sample_count(slc::ModelKind::single_charge_superposition,
                                                 cfg.theta, cfg.nf_list, oc, cfg.seed_test,
                                                 cfg.n_test, cfg.test_distribution);
        echo_config(cfg);
        slc::write_text_file(out_path(cfg, "fig2.csv"), sweep_csv(pts, "nf", true));
        slc::write_text_file(out_path(cfg, "fig2_training.csv"), sweep_training_csv(pts));
        bool all = true;
        for (const auto& p : pts) all = all && p.converged;
        std::printf("reproduce 2: %zu rows written\n", pts.size());
        return all ? 0 : 2;
    }
    if (figure == 4 || figure == 5) {
        const bool charge = figure == 4;
        cfg.model = charge ? "coupled_charge" : "coupled_phase";
        const auto kind =
            charge ? slc::ModelKind::coupled_charge : slc::ModelKind::coupled_phase;
        const auto pts = slc::sweep_bound(kind, cfg.bounds, cfg.nf, oc, cfg.seed_test, cfg.n_test,
                                          cfg.test_distribution);
        echo_config(cfg);
        const std::string stem = charge ? "fig4" : "fig5";
        slc::write_text_file(out_path(cfg, stem + ".csv"), sweep_csv(pts, "theta", false));
        slc::write_text_file(out_path(cfg, stem + "_training.csv"), sweep_training_csv(pts));
        bool all = true;
        for (const auto& p : pts) all = all && p.converged;
        std::printf("reproduce %d: %zu rows written\n", figure, pts.size());
        return all ? 0 : 2;
    }
    if (figure == 6) {
        cfg.model = "coupled_phase";
        cfg.theta = 0.25;
        slc::QubitModel model = slc::configured_model(cfg);
        const auto ensemble = slc::training_grid(model.params, cfg.nf);
        const slc::TrainingResult tr =
            slc::train(model, ensemble, slc::reference_initial_field(model), oc);
        echo_config(cfg);
        std::string csv = "k,t";
        for (const auto& n : tr.field.names) csv += "," + n;
        csv += "\n";
        for (int k = 0; k < tr.field.intervals; ++k) {
            csv += std::to_string(k) + "," + slc::format_double(tr.field.midpoint(k));
            for (int c = 0; c < tr.field.channels(); ++c)
                csv += "," + slc::format_double(tr.field.at(c, k));
            csv += "\n";
        }
        slc::write_text_file(out_path(cfg, "fig6.csv"), csv);
        slc::FieldFileData fd;
        fd.model_id = model.id;
        fd.field = tr.field;
        fd.seed_train = cfg.seed_train;
        fd.objective = tr.J_history.back();
        fd.converged = tr.converged;
        fd.iterations = tr.iterations;
        slc::save_field_file(out_path(cfg, "fig6_field.slc"), fd);
        std::printf("reproduce 6: J=%s iterations=%d converged=%d\n",
                    slc::format_double(fd.objective).c_str(), tr.iterations,
                    tr.converged ? 1 : 0);
        return tr.converged ? 0 : 2;
    }
    throw slc::ConfigError("reproduce: unknown figure id " + std::to_string(figure) +
                           " (valid ids: 1, 2, 4, 5, 6)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling-based learning control for small qubit models"};
    app.require_subcommand(1);

    CommonFlags f_train, f_test, f_sb, f_snf, f_rep;
    CLI::App* c_train = app.add_subcommand("train", "Train a robust control field");
    add_common_flags(c_train, f_train);

    std::string field_path;
    CLI::App* c_test = app.add_subcommand("test", "Monte-Carlo test a trained field file");
    c_test->add_option("field", field_path, "Trained field file (.slc)")->required();
    add_common_flags(c_test, f_test);

    CLI::App* c_sb = app.add_subcommand("sweep-bound", "Train and test across fluctuation bounds");
    add_common_flags(c_sb, f_sb);

    CLI::App* c_snf = app.add_subcommand("sweep-nf", "Train and test across training-grid sizes");
    add_common_flags(c_snf, f_snf);

    int figure = 0;
    CLI::App* c_rep = app.add_subcommand("reproduce", "Run a preset experiment (1, 2, 4, 5, 6)");
    c_rep->add_option("figure", figure, "Preset id")->required();
    add_common_flags(c_rep, f_rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (c_train->parsed()) return cmd_train(resolve_config(f_train));
        if (c_test->parsed()) return cmd_test(field_path, resolve_config(f_test));
        if (c_sb->parsed()) return cmd_sweep_bound(resolve_config(f_sb));
        if (c_snf->parsed()) return cmd_sweep_nf(resolve_config(f_snf));
        if (c_rep->parsed()) return cmd_reproduce(figure, resolve_config(f_rep));
        std::fprintf(stderr, "error: no command\n");
        return 3;
    } catch (const slc::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const slc::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
