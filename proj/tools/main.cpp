#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "commands.hpp"
#include "selftest.hpp"

namespace {

using qzzb_cli::RunConfig;

// Range-valued flags arrive as strings ("2", "1,5,9" or "lo:hi[:steps]").
struct RawArgs {
    std::string d, n, w, eta, beta, r;
    std::string config_path;
};

void apply_config_file(const std::string& path, RunConfig& cfg, const CLI::App& app) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    auto absent = [&](const char* flag) { return app.count(flag) == 0; };
    if (j.contains("probe") && absent("--probe")) cfg.probe = j["probe"];
    if (j.contains("noise") && absent("--noise")) cfg.noise = j["noise"];
    if (j.contains("lambda") && absent("--lambda")) cfg.lambda = j["lambda"];
    if (j.contains("quad_points") && absent("--quad-points"))
        cfg.quad_points = j["quad_points"];
    if (j.contains("valley_fill") && absent("--no-valley-fill"))
        cfg.valley_fill = j["valley_fill"];
    if (j.contains("integrate") && absent("--integrate")) cfg.integrate = j["integrate"];
    if (j.contains("format") && absent("--format")) cfg.format = j["format"];
    if (j.contains("output") && absent("--output")) cfg.output = j["output"];
    auto range_of = [](const nlohmann::json& v) {
        if (v.is_string()) return qzzb_cli::parse_range(v.get<std::string>());
        if (v.is_array()) return v.get<std::vector<double>>();
        return std::vector<double>{v.get<double>()};
    };
    if (j.contains("d") && absent("--d")) cfg.d = range_of(j["d"]);
    if (j.contains("n") && absent("--n")) cfg.n = range_of(j["n"]);
    if (j.contains("w") && absent("--w")) cfg.w = range_of(j["w"]);
    if (j.contains("eta") && absent("--eta")) cfg.eta = range_of(j["eta"]);
    if (j.contains("beta") && absent("--beta")) cfg.beta = range_of(j["beta"]);
    if (j.contains("r") && absent("--r")) cfg.r = range_of(j["r"]);
}

void wire_common(CLI::App* cmd, RunConfig& cfg, RawArgs& raw, bool with_probe) {
    if (with_probe) {
        cmd->add_option("--probe", cfg.probe, "Probe family: optimal | noon | squeezed");
        cmd->add_option("--noise", cfg.noise, "Noise model: none | loss | diffusion");
        cmd->add_option("--d", raw.d, "Parameter count (value, list or lo:hi[:steps])");
        cmd->add_option("--n", raw.n, "Total photon budget");
        cmd->add_option("--w", raw.w, "Prior window width (default: 100x validity threshold)");
        cmd->add_option("--eta", raw.eta, "Loss transmissivity in (0, 1]");
        cmd->add_option("--beta", raw.beta, "Phase-diffusion strength");
        cmd->add_option("--r", raw.r, "Squeezing strength override (squeezed probe)");
        cmd->add_flag("--integrate", cfg.integrate,
                      "Also evaluate the numeric integral bound (spectrum probes)");
    }
    cmd->add_option("--lambda", cfg.lambda, "Speed-limit constant (default 0.7246)");
    cmd->add_option("--quad-points", cfg.quad_points, "Quadrature grid intervals");
    cmd->add_flag_callback("--no-valley-fill", [&cfg] { cfg.valley_fill = false; },
                           "Disable valley filling in the integral bound");
    cmd->add_option("--format", cfg.format, "Output format: csv | json");
    cmd->add_option("--output", cfg.output, "Output path (default: stdout)");
    cmd->add_option("--config", raw.config_path, "JSON config file; flags take precedence");
}

void finalize_ranges(const RawArgs& raw, RunConfig& cfg) {
    if (!raw.d.empty()) cfg.d = qzzb_cli::parse_range(raw.d);
    if (!raw.n.empty()) cfg.n = qzzb_cli::parse_range(raw.n);
    if (!raw.w.empty()) cfg.w = qzzb_cli::parse_range(raw.w);
    if (!raw.eta.empty()) cfg.eta = qzzb_cli::parse_range(raw.eta);
    if (!raw.beta.empty()) cfg.beta = qzzb_cli::parse_range(raw.beta);
    if (!raw.r.empty()) cfg.r = qzzb_cli::parse_range(raw.r);
}

void validate(const RunConfig& cfg, bool figure_cmd) {
    if (cfg.format != "csv" && cfg.format != "json")
        throw CLI::ValidationError("--format", "must be csv or json");
    if (cfg.quad_points < 16) throw CLI::ValidationError("--quad-points", "must be >= 16");
    if (!(cfg.lambda > 0)) throw CLI::ValidationError("--lambda", "must be > 0");
    for (double w : cfg.w)
        if (!(w > 0)) throw CLI::ValidationError("--w", "widths must be > 0");
    for (double e : cfg.eta)
        if (!(e > 0) || e > 1) throw CLI::ValidationError("--eta", "must be in (0, 1]");
    for (double b : cfg.beta)
        if (!(b > 0)) throw CLI::ValidationError("--beta", "must be > 0");
    if (!figure_cmd) {
        if (cfg.probe != "optimal" && cfg.probe != "noon" && cfg.probe != "squeezed")
            throw CLI::ValidationError("--probe", "unknown probe " + cfg.probe);
        if (cfg.noise != "none" && cfg.noise != "loss" && cfg.noise != "diffusion")
            throw CLI::ValidationError("--noise", "unknown noise " + cfg.noise);
        if (cfg.noise == "loss" && cfg.eta.empty())
            throw CLI::ValidationError("--eta", "required for loss noise");
        if (cfg.noise == "diffusion" && cfg.beta.empty())
            throw CLI::ValidationError("--beta", "required for diffusion noise");
        if (!cfg.r.empty() && cfg.probe != "squeezed")
            throw CLI::ValidationError("--r", "only the squeezed probe takes r");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Ziv-Zakai bounds for vector-parameter estimation"};
    app.require_subcommand(1);

    RunConfig cfg;
    RawArgs raw;

    auto* bound = app.add_subcommand("bound", "Evaluate one bound report");
    wire_common(bound, cfg, raw, true);

    auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over parameter ranges");
    wire_common(sweep, cfg, raw, true);

    auto* figure = app.add_subcommand(
        "figure", "Emit a named preset dataset (fig2, fig3a..c, fig4loss, fig4diff)");
    figure->add_option("name", cfg.figure, "Dataset name")->required();
    wire_common(figure, cfg, raw, true);

    auto* selftest = app.add_subcommand("selftest", "Run the oracle cross-check suite");
    wire_common(selftest, cfg, raw, false);

    try {
        app.parse(argc, argv);
        if (!raw.config_path.empty()) {
            CLI::App* active = app.get_subcommands().front();
            apply_config_file(raw.config_path, cfg, *active);
        }
        finalize_ranges(raw, cfg);
        if (!figure->parsed()) {
            if (cfg.d.empty()) cfg.d = {2};
            if (cfg.n.empty()) cfg.n = {10};
        }
        validate(cfg, figure->parsed());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qzzb_cli::kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qzzb_cli::kUsageError;
    }

    try {
        if (bound->parsed()) return qzzb_cli::cmd_bound(cfg);
        if (sweep->parsed()) return qzzb_cli::cmd_sweep(cfg);
        if (figure->parsed()) return qzzb_cli::cmd_figure(cfg);
        if (selftest->parsed()) return qzzb_cli::cmd_selftest(cfg.lambda);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qzzb_cli::kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return qzzb_cli::kNumericFailure;
    }
    return qzzb_cli::kUsageError;
}
