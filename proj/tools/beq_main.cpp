#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "beq/beq.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral solver suite for the b-equation family"};
    app.set_version_flag("--version", beq::version_string);
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    std::int64_t seed_override = -1;
    double tolerance = 1e-4;
    int levels = 3;
    std::string mode = "temporal";

    auto add_common = [&](CLI::App* sub, bool with_seed = true) {
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--threads", threads, "parallelism for independent runs")->default_val(1);
        if (with_seed)
            sub->add_option("--seed-override", seed_override, "seed for random scenarios");
    };

    CLI::App* c_run = app.add_subcommand("run", "execute one configured run");
    add_common(c_run);

    CLI::App* c_val = app.add_subcommand("validate-symbol", "certify symbol classes");
    c_val->add_option("config", config_path, "JSON config file")->required();
    c_val->add_option("--out", out_dir, "output directory");

    CLI::App* c_cmp = app.add_subcommand("compare", "Eulerian vs Lagrangian from matched data");
    add_common(c_cmp);
    c_cmp->add_option("--tolerance", tolerance, "final relative sup-difference bound")
        ->default_val(1e-4);

    CLI::App* c_cnv = app.add_subcommand("convergence", "temporal/spatial refinement study");
    add_common(c_cnv);
    c_cnv->add_option("--levels", levels, "refinement levels (>= 3)")->default_val(3);
    c_cnv->add_option("--mode", mode, "temporal | spatial")->default_val("temporal");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : beq::exit_config_error;
    }

    beq::CmdOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    if (seed_override >= 0) opt.seed_override = static_cast<std::uint64_t>(seed_override);
    opt.tolerance = tolerance;
    opt.levels = levels;
    opt.mode = mode;

    if (c_run->parsed()) return beq::cmd_run(config_path, opt);
    if (c_val->parsed()) return beq::cmd_validate_symbol(config_path, opt);
    if (c_cmp->parsed()) return beq::cmd_compare(config_path, opt);
    return beq::cmd_convergence(config_path, opt);
}
