#include "qsplit/qsplit.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int exit_code(qsplit_status s) {
    if (s == QSPLIT_OK) return 0;
    if (s == QSPLIT_INCONCLUSIVE) return 2;
    return 1;
}

int report(const char* mode, qsplit_status s) {
    if (s != QSPLIT_OK) {
        std::fprintf(stderr, "qsplit %s: %s: %s\n", mode, qsplit_status_name(s), qsplit_last_error());
    }
    return exit_code(s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-splitting solver for quenching-combustion problems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    auto add_mode = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--out", out_dir, "output directory")->required();
        return sub;
    };
    CLI::App* run = add_mode("run", "single run to quench: trajectory.csv, summary.json, grid.json");
    CLI::App* ctime = add_mode("converge-time", "temporal order study: order_time.json/.csv");
    CLI::App* cspace = add_mode("converge-space", "spatial order study: order_space.json/.csv");
    CLI::App* crit = add_mode("critical-a", "critical half-width bisection: critical_a.json");
    CLI::App* val = add_mode("validate", "linear-algebra invariant suite: validation.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::fprintf(stderr, "%s", app.help().c_str());
        return 1;
    }

    qsplit_config* cfg = nullptr;
    qsplit_status s = config_path.empty() ? qsplit_config_default(&cfg) : qsplit_config_load(config_path.c_str(), &cfg);
    if (s != QSPLIT_OK) {
        std::fprintf(stderr, "qsplit: %s\n", qsplit_last_error());
        return 1;
    }

    int code = 0;
    if (run->parsed()) {
        code = report("run", qsplit_mode_run(cfg, out_dir.c_str()));
    } else if (ctime->parsed()) {
        double order = 0.0;
        s = qsplit_mode_converge_time(cfg, out_dir.c_str(), &order);
        if (s == QSPLIT_OK) std::printf("observed temporal order %.6f\n", order);
        code = report("converge-time", s);
    } else if (cspace->parsed()) {
        double order = 0.0;
        s = qsplit_mode_converge_space(cfg, out_dir.c_str(), &order);
        if (s == QSPLIT_OK) std::printf("observed spatial order %.6f\n", order);
        code = report("converge-space", s);
    } else if (crit->parsed()) {
        double a = 0.0;
        s = qsplit_mode_critical_a(cfg, out_dir.c_str(), &a);
        if (s == QSPLIT_OK) std::printf("critical half-width %.6f\n", a);
        code = report("critical-a", s);
    } else if (val->parsed()) {
        int all_pass = 0;
        s = qsplit_mode_validate(cfg, out_dir.c_str(), &all_pass);
        if (s == QSPLIT_OK) std::printf("validation %s\n", all_pass ? "all checks pass" : "has failing checks");
        code = report("validate", s);
    }
    qsplit_config_free(cfg);
    return code;
}
