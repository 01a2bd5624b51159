// Command-line front end: certify one case, sweep a parameter grid, calibrate
// the pointwise-estimate constants, or emit solution profiles.

#include "emden/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Radial Emden-Fowler annulus solver and bound certifier"};

    std::string variant, grading, mode, config_path, out_dir, emit_profile;
    std::vector<int> n;
    std::vector<double> q, d, k;
    std::size_t grid_size = 0, max_cases = 0;
    unsigned jobs = 0;
    int ladder_steps = 0;

    auto* o_variant = app.add_option("--variant", variant, "absorption | source | laplace");
    auto* o_n = app.add_option("--n", n, "dimension(s), comma separated")->delimiter(',');
    auto* o_q = app.add_option("--q", q, "exponent(s)")->delimiter(',');
    auto* o_d = app.add_option("--d", d, "inner radius value(s)")->delimiter(',');
    auto* o_k = app.add_option("--k", k, "inner boundary value(s)")->delimiter(',');
    auto* o_grid = app.add_option("--grid-size", grid_size, "number of radial nodes (default 1025)");
    auto* o_grading = app.add_option("--grading", grading, "uniform | geometric");
    auto* o_mode = app.add_option("--mode", mode, "certify | calibrate | profile");
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    auto* o_out = app.add_option("--out-dir", out_dir, "directory for reports (default .)");
    auto* o_emit = app.add_option("--emit-profile", emit_profile, "profile CSV path (one case) or directory (sweep)");
    auto* o_jobs = app.add_option("--jobs", jobs, "worker threads (default: logical CPUs)");
    auto* o_cap = app.add_option("--max-cases", max_cases, "cap on the sweep size (default 10000)");
    auto* o_steps = app.add_option("--ladder-steps", ladder_steps, "Picard ladder steps (default 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    emden::SweepConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw emden::Error(emden::ErrorCode::InvalidConfig, "cannot open " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw emden::Error(emden::ErrorCode::InvalidConfig, config_path + ": " + e.what());
            }
            config = emden::sweep_from_json(j);
        }
        if (o_variant->count()) {
            const auto v = emden::parse_variant(variant);
            if (!v) throw emden::Error(emden::ErrorCode::InvalidConfig, "unknown variant '" + variant + "'");
            config.variant = *v;
        }
        if (o_grading->count()) {
            const auto g = emden::parse_grading(grading);
            if (!g) throw emden::Error(emden::ErrorCode::InvalidConfig, "unknown grading '" + grading + "'");
            config.grading = *g;
        }
        if (o_mode->count()) {
            const auto m = emden::parse_mode(mode);
            if (!m) throw emden::Error(emden::ErrorCode::InvalidConfig, "unknown mode '" + mode + "'");
            config.mode = *m;
        }
        if (o_n->count()) config.n = n;
        if (o_q->count()) config.q = q;
        if (o_d->count()) config.d = d;
        if (o_k->count()) config.k = k;
        if (o_grid->count()) config.grid_size = grid_size;
        if (o_out->count()) config.out_dir = out_dir;
        if (o_emit->count()) config.emit_profile = emit_profile;
        if (o_jobs->count()) config.jobs = jobs;
        if (o_cap->count()) config.max_cases = max_cases;
        if (o_steps->count()) config.ladder_steps = ladder_steps;
    } catch (const emden::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }

    try {
        return emden::run(config, std::cout, std::cerr).exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
