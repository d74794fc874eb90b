#include "catch_amalgamated.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace beq;
using namespace beqtest;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("beq_test_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json base_config(const fs::path& out) {
    json c;
    c["grid"] = {{"dim", 1}, {"points", {64}}, {"lengths", {two_pi}}};
    c["params"] = {{"b", 2.0}, {"operator", {{"type", "sobolev"}, {"s", 1.0}}}};
    c["scenario"] = {{"type", "gaussian"},
                     {"center", {pi}},
                     {"amplitude", 0.4},
                     {"width", two_pi / 8}};
    c["run"] = {{"formulation", "eulerian"},
                {"dt", 5e-3},
                {"t_end", 0.1},
                {"diagnostics_every", 5}};
    c["output"] = {{"directory", out.string()}};
    return c;
}

fs::path write_config(const json& c, const fs::path& dir, const char* name = "config.json") {
    const fs::path p = dir / name;
    std::ofstream f(p);
    f << c.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("cmd_run: happy path writes series and manifest") {
    const fs::path dir = fresh_dir("run");
    const fs::path cfg = write_config(base_config(dir), dir);
    REQUIRE(cmd_run(cfg.string()) == exit_ok);
    REQUIRE(fs::exists(dir / "series.csv"));
    REQUIRE(fs::exists(dir / "run_manifest.json"));

    const std::string csv = slurp(dir / "series.csv");
    REQUIRE(csv.rfind("time,sup_u,l2_u,energy,energy_rel_drift,mean_momentum_0,", 0) == 0);

    const json man = json::parse(slurp(dir / "run_manifest.json"));
    REQUIRE(man.at("termination").at("eulerian") == "completed");
    REQUIRE(man.at("files").size() == 1);
    REQUIRE(man.at("files")[0].at("path") == "series.csv");
    REQUIRE(man.at("files")[0].at("sha256").get<std::string>().size() == 64);
    REQUIRE(man.at("config") == base_config(dir)); // echoed verbatim
}

TEST_CASE("cmd_run: t_end = 0 leaves exactly one data row") {
    const fs::path dir = fresh_dir("t0");
    json c = base_config(dir);
    c["run"]["t_end"] = 0.0;
    REQUIRE(cmd_run(write_config(c, dir).string()) == exit_ok);
    const std::string csv = slurp(dir / "series.csv");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 2); // header + initial state
}

TEST_CASE("config validation is fail-closed") {
    const fs::path dir = fresh_dir("badcfg");
    {
        json c = base_config(dir);
        c["extra_key"] = 1;
        REQUIRE(cmd_run(write_config(c, dir, "a.json").string()) == exit_config_error);
    }
    {
        json c = base_config(dir);
        c["run"]["typo_dt"] = 0.1;
        REQUIRE(cmd_run(write_config(c, dir, "b.json").string()) == exit_config_error);
    }
    {
        json c = base_config(dir);
        c.erase("scenario");
        REQUIRE(cmd_run(write_config(c, dir, "c.json").string()) == exit_config_error);
    }
    {
        json c = base_config(dir);
        c["params"]["operator"] = {{"type", "hilbert"}}; // singular at xi = 0
        REQUIRE(cmd_run(write_config(c, dir, "d.json").string()) == exit_config_error);
    }
    {
        json c = base_config(dir);
        c["run"]["dt"] = "sometimes";
        REQUIRE(cmd_run(write_config(c, dir, "e.json").string()) == exit_config_error);
    }
    REQUIRE(cmd_run((dir / "missing.json").string()) == exit_config_error);
}

TEST_CASE("cmd_validate_symbol exit codes and report") {
    const fs::path dir = fresh_dir("symbol");
    json ok;
    ok["dim"] = 1;
    ok["operator"] = {{"type", "sobolev"}, {"s", 1.0}};
    ok["order"] = 2.0;
    CmdOptions opt;
    opt.out_dir = (dir / "ok").string();
    REQUIRE(cmd_validate_symbol(write_config(ok, dir, "ok.json").string(), opt) == exit_ok);
    const json rep = json::parse(slurp(dir / "ok" / "class_report.json"));
    REQUIRE(rep.at("s_r_bound").at("ok").get<bool>());
    REQUIRE(rep.at("elliptic").at("ok").get<bool>());
    REQUIRE(rep.at("hermitian_pd").at("ok").get<bool>());

    json over = ok;
    over["order"] = 4.0; // only an order-2 operator
    opt.out_dir = (dir / "over").string();
    REQUIRE(cmd_validate_symbol(write_config(over, dir, "over.json").string(), opt) ==
            exit_validation);

    json hil;
    hil["dim"] = 1;
    hil["operator"] = {{"type", "hilbert"}};
    hil["order"] = 0.0;
    opt.out_dir = (dir / "hil").string();
    REQUIRE(cmd_validate_symbol(write_config(hil, dir, "hil.json").string(), opt) ==
            exit_validation);
    const json hrep = json::parse(slurp(dir / "hil" / "class_report.json"));
    REQUIRE_FALSE(hrep.at("hermitian_pd").at("ok").get<bool>());
}

TEST_CASE("cmd_compare: zero data agrees identically, smooth data within tolerance") {
    const fs::path dir = fresh_dir("cmp0");
    json c = base_config(dir);
    c["run"]["formulation"] = "both";
    c["run"]["snapshot_every"] = 10;
    c["scenario"]["amplitude"] = 0.0;
    REQUIRE(cmd_compare(write_config(c, dir).string()) == exit_ok);
    const std::string csv = slurp(dir / "compare.csv");
    REQUIRE(csv.rfind("time,sup_diff,rel_sup_diff,rel_l2_diff", 0) == 0);

    const fs::path dir2 = fresh_dir("cmp1");
    json c2 = base_config(dir2);
    c2["run"]["formulation"] = "both";
    c2["scenario"]["amplitude"] = 0.3;
    c2["run"]["t_end"] = 0.2;
    c2["run"]["dt"] = 2e-3;
    REQUIRE(cmd_compare(write_config(c2, dir2).string()) == exit_ok);

    // compare requires formulation both
    const fs::path dir3 = fresh_dir("cmp2");
    REQUIRE(cmd_compare(write_config(base_config(dir3), dir3).string()) == exit_config_error);
}

TEST_CASE("cmd_convergence: temporal order and spatial table") {
    const fs::path dir = fresh_dir("conv");
    json c = base_config(dir);
    c["run"]["t_end"] = 0.2;
    c["run"]["dt"] = 4e-3;
    CmdOptions opt;
    opt.levels = 3;
    REQUIRE(cmd_convergence(write_config(c, dir).string(), opt) == exit_ok);
    const std::string csv = slurp(dir / "convergence.csv");
    REQUIRE(csv.rfind("level,dt,diff_to_next,observed_order", 0) == 0);

    const fs::path dirs = fresh_dir("convs");
    json cs = base_config(dirs);
    cs["grid"]["points"] = {32};
    cs["run"]["t_end"] = 0.1;
    opt.mode = "spatial";
    REQUIRE(cmd_convergence(write_config(cs, dirs).string(), opt) == exit_ok);
    REQUIRE(slurp(dirs / "convergence.csv").rfind("level,points,error_vs_finest", 0) == 0);

    opt.mode = "temporal";
    opt.levels = 2;
    REQUIRE(cmd_convergence(write_config(c, dir, "lv.json").string(), opt) ==
            exit_config_error);
}

TEST_CASE("blow-up exits with code 2 and a tagged manifest") {
    const fs::path dir = fresh_dir("blow");
    json c = base_config(dir);
    c["grid"]["points"] = {128};
    c["scenario"] = {{"type", "random"}, {"seed", 4}, {"kmax", 3}, {"amplitude", 1.3}};
    c["run"]["formulation"] = "lagrangian";
    c["run"]["dt"] = 2e-3;
    c["run"]["t_end"] = 6.0;
    c["run"]["diagnostics_every"] = 100;
    REQUIRE(cmd_run(write_config(c, dir).string()) == exit_blowup);
    const json man = json::parse(slurp(dir / "run_manifest.json"));
    const std::string term = man.at("termination").at("lagrangian").get<std::string>();
    REQUIRE(term.rfind("blowup:", 0) == 0);
}

TEST_CASE("single-threaded reruns are byte-identical") {
    const fs::path dira = fresh_dir("det_a");
    const fs::path dirb = fresh_dir("det_b");
    json ca = base_config(dira);
    ca["scenario"] = {{"type", "random"}, {"seed", 11}, {"kmax", 6}, {"amplitude", 0.4}};
    json cb = ca;
    cb["output"]["directory"] = dirb.string();
    REQUIRE(cmd_run(write_config(ca, dira).string()) == exit_ok);
    REQUIRE(cmd_run(write_config(cb, dirb).string()) == exit_ok);
    REQUIRE(slurp(dira / "series.csv") == slurp(dirb / "series.csv"));
    const json ma = json::parse(slurp(dira / "run_manifest.json"));
    const json mb = json::parse(slurp(dirb / "run_manifest.json"));
    REQUIRE(ma.at("files") == mb.at("files"));
}

TEST_CASE("seed override switches the random scenario") {
    const fs::path dira = fresh_dir("seed_a");
    const fs::path dirb = fresh_dir("seed_b");
    json c = base_config(dira);
    c["scenario"] = {{"type", "random"}, {"seed", 11}, {"kmax", 6}, {"amplitude", 0.4}};
    const fs::path cfg = write_config(c, dira);
    REQUIRE(cmd_run(cfg.string()) == exit_ok);
    CmdOptions opt;
    opt.out_dir = dirb.string();
    opt.seed_override = 999;
    REQUIRE(cmd_run(cfg.string(), opt) == exit_ok);
    REQUIRE(slurp(dira / "series.csv") != slurp(dirb / "series.csv"));
}

TEST_CASE("snapshots: raw doubles plus sidecar") {
    const fs::path dir = fresh_dir("snap");
    json c = base_config(dir);
    c["run"]["snapshot_every"] = 10;
    c["output"]["snapshots"] = true;
    REQUIRE(cmd_run(write_config(c, dir).string()) == exit_ok);
    REQUIRE(fs::exists(dir / "eulerian_u_000000.f64"));
    REQUIRE(fs::file_size(dir / "eulerian_u_000000.f64") == 64 * sizeof(double));
    const json side = json::parse(slurp(dir / "eulerian_u_000000.json"));
    REQUIRE(side.at("grid").at("points")[0] == 64);
    REQUIRE(side.at("components") == 1);
    REQUIRE(side.at("field") == "u");
    // initial + final + every 10th of 20 steps
    REQUIRE(fs::exists(dir / "eulerian_u_000002.f64"));
    const json man = json::parse(slurp(dir / "run_manifest.json"));
    REQUIRE(man.at("files").size() >= 5);
}

TEST_CASE("cli binary: version, exit codes") {
    const std::string exe = BEQ_CLI_PATH;
    REQUIRE(std::system((exe + " --version > /dev/null").c_str()) == 0);

    const fs::path dir = fresh_dir("cli");
    REQUIRE(WEXITSTATUS(std::system(
                (exe + " run " + (dir / "nope.json").string() + " 2> /dev/null").c_str())) ==
            exit_config_error);

    json hil;
    hil["dim"] = 1;
    hil["operator"] = {{"type", "hilbert"}};
    hil["order"] = 0.0;
    const fs::path cfg = write_config(hil, dir, "hil.json");
    const std::string cmd =
        exe + " validate-symbol " + cfg.string() + " --out " + (dir / "out").string();
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == exit_validation);

    json ok = base_config(dir / "runout");
    const fs::path rcfg = write_config(ok, dir, "run.json");
    REQUIRE(WEXITSTATUS(std::system((exe + " run " + rcfg.string()).c_str())) == exit_ok);
}
