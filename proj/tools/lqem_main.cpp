#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "lqem/run.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    long long threads = -1;
    std::string check;
};

void attach_common(CLI::App* sub, CliOverrides& ov) {
    sub->add_option("--config", ov.config_path, "config file (INI-style key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", ov.out_dir, "output directory (overrides run.out)");
    sub->add_option("--seed", ov.seed, "random seed (overrides run.seed)");
    sub->add_option("--threads", ov.threads, "worker threads; recorded in the report "
                                             "(solvers currently run single-threaded)");
    sub->add_option("--check", ov.check, "enable/disable verification checks (on/off)")
        ->check(CLI::IsMember({"on", "off"}));
}

int run_mode(const std::string& mode, CliOverrides& ov) {
    lqem::RunConfig rc = lqem::load_run_config(ov.config_path);
    if (!rc.mode.empty() && rc.mode != mode) {
        std::fprintf(stderr, "error: config sets run.mode=%s but subcommand is %s\n",
                     rc.mode.c_str(), mode.c_str());
        return 2;
    }
    rc.mode = mode;
    if (!ov.out_dir.empty()) rc.out_dir = ov.out_dir;
    if (ov.seed >= 0) rc.seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.threads >= 1) rc.threads = ov.threads;
    if (!ov.check.empty()) rc.checks_enabled = (ov.check == "on");
    // keep the report's config echo in sync with the effective settings
    rc.raw.set("run.mode", rc.mode);
    rc.raw.set("run.out", rc.out_dir);
    rc.raw.set("run.seed", std::to_string(rc.seed));
    rc.raw.set("run.threads", std::to_string(rc.threads));
    rc.raw.set("run.check", rc.checks_enabled ? "on" : "off");

    const lqem::SolveReport rep = lqem::run_case(rc);
    std::size_t passed = 0, total = 0;
    for (const auto& e : rep.residuals) {
        ++total;
        passed += e.pass ? 1 : 0;
    }
    for (const auto& e : rep.checks) {
        ++total;
        passed += e.pass ? 1 : 0;
    }
    std::printf("%s: energy %.12g -> %.12g, %llu iterations, %s; checks %zu/%zu\n", mode.c_str(),
                rep.initial_energy, rep.final_energy,
                static_cast<unsigned long long>(rep.iterations),
                rep.converged ? "converged" : "NOT converged", passed, total);
    std::printf("report: %s/report.json\n", rc.out_dir.c_str());
    return lqem::exit_status(rc, rep);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lqem: interpolated nonlinear electromagnetostatics solvers"};
    app.require_subcommand(1);

    const std::vector<std::string> modes = {"electro-radial", "electro-grid", "magneto",
                                            "decompose", "verify"};
    std::map<std::string, CliOverrides> overrides;
    for (const std::string& m : modes) {
        CLI::App* sub = app.add_subcommand(m, m + " mode");
        attach_common(sub, overrides[m]);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (const std::string& m : modes)
            if (app.got_subcommand(m)) return run_mode(m, overrides[m]);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
