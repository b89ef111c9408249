#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "commands.hpp"
#include "magnex/error.hpp"
#include "magnex/run.hpp"

using namespace magnex::cli;

int main(int argc, char** argv) {
    CLI::App app{"magnex: micromagnetic solver and benchmark drivers"};
    app.require_subcommand(1);
    Common c;
    std::string pairs, plot_in, plot_out;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", c.config, "Parameter file ([section] key = value)");
        sub->add_option("--set", c.sets, "Override, section.key=value (repeatable)");
        sub->add_option("--out-dir", c.out_dir, "Output directory")->each([&](const std::string&) { c.out_dir_given = true; });
        sub->add_option("--seed", c.seed, "Random seed");
        sub->add_option("--threads", c.threads, "Thread count (0 = runtime default)");
        sub->add_flag("--paper-scale", c.paper_scale, "Published protocol instead of the desk-scale default");
    };

    auto* run = app.add_subcommand("run", "Run a scenario config file");
    common(run);
    run->get_option("--config")->required();
    auto* std2 = app.add_subcommand("std2", "Platelet hysteresis loop");
    common(std2);
    auto* std3 = app.add_subcommand("std3", "Cube flower/vortex crossover");
    common(std3);
    auto* std4 = app.add_subcommand("std4", "Thin-film switching from the S-state");
    common(std4);
    auto* sky = app.add_subcommand("skyrmion", "DMI nanodot steady states and radius sweep");
    common(sky);
    auto* bench = app.add_subcommand("bench-integrators", "RK4 vs MRI stable step and cost table");
    common(bench);
    auto* gen = app.add_subcommand("gen-dataset", "Surrogate training frames (M, H_demag)");
    common(gen);
    auto* infer = app.add_subcommand("infer-check", "Check a surrogate model against MAGF pairs");
    common(infer);
    infer->add_option("--model", c.model, "MAGW weight file")->required();
    infer->add_option("--pairs", pairs, "Directory of 6-component MAGF pairs (M, H)");
    auto* plot = app.add_subcommand("plot", "Emit a matplotlib script for a result CSV");
    plot->add_option("csv", plot_in, "Input CSV")->required();
    plot->add_option("out", plot_out, "Script path (default: <csv>.py)");
    auto* defaults = app.add_subcommand("defaults", "Print a command's default parameters");
    std::string defaults_cmd;
    bool defaults_paper = false;
    defaults->add_option("command", defaults_cmd)->required();
    defaults->add_flag("--paper-scale", defaults_paper);

    CLI11_PARSE(app, argc, argv);
    try {
        magnex::set_thread_count(c.threads);
        if (*run) return cmd_run(c);
        if (*std2) return cmd_std2(c);
        if (*std3) return cmd_std3(c);
        if (*std4) return cmd_std4(c);
        if (*sky) return cmd_skyrmion(c);
        if (*bench) return cmd_bench_integrators(c);
        if (*gen) return cmd_gen_dataset(c);
        if (*infer) return cmd_infer_check(c, pairs);
        if (*plot) return cmd_plot(plot_in, plot_out);
        if (*defaults) {
            std::fputs(defaults_for(defaults_cmd, defaults_paper), stdout);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
