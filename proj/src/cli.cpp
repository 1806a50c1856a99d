#include "pvsim/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pvsim/curve.hpp"
#include "pvsim/datasheet_io.hpp"
#include "pvsim/errors.hpp"
#include "pvsim/estimation.hpp"
#include "pvsim/service.hpp"

namespace pvsim::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PanelSource {
    std::string panel;
    std::string datasheet;
};

struct Environment {
    double irradiance_w_m2 = 1000.0;
    double temperature_c = 25.0;
    std::size_t points = default_curve_points;
};

struct Options {
    PanelSource source;
    Environment env;
    std::string out_path;
    std::vector<double> temperatures;
    std::vector<double> irradiances;
    double n_min = 0.5;
    double n_max = 10.0;
    std::size_t count = 200;
    service::ServerOptions server;
};

void add_panel_source(CLI::App* cmd, PanelSource& source) {
    cmd->add_option("--panel", source.panel, "Bundled panel name (e.g. bp_sx_150)");
    cmd->add_option("--datasheet", source.datasheet, "Path to a JSON datasheet file");
}

void add_environment(CLI::App* cmd, Environment& env) {
    cmd->add_option("--irradiance", env.irradiance_w_m2, "Irradiance [W/m^2]")
        ->capture_default_str();
    cmd->add_option("--temperature", env.temperature_c, "Cell temperature [degC]")
        ->capture_default_str();
    cmd->add_option("--points", env.points, "Current samples per curve")->capture_default_str();
}

PanelDatasheet load_panel(const PanelSource& source) {
    const bool has_panel = !source.panel.empty();
    const bool has_file = !source.datasheet.empty();
    if (has_panel == has_file) {
        throw UsageError(has_panel ? "give exactly one of --panel or --datasheet, not both"
                                   : "a panel source is required: --panel <name> or --datasheet <path>");
    }
    return has_panel ? bundled_panel(source.panel) : load_datasheet(source.datasheet);
}

void check_environment(const Environment& env) {
    if (!(env.irradiance_w_m2 > 0.0) || !std::isfinite(env.irradiance_w_m2)) {
        throw UsageError("irradiance must be positive");
    }
    if (!std::isfinite(env.temperature_c)) {
        throw UsageError("temperature must be finite");
    }
    if (env.points < 2) {
        throw UsageError("points must be at least 2");
    }
}

struct Panel {
    PanelDatasheet ds;
    StcContext ctx;
    EstimatedParams params;
};

Panel estimated_panel(const PanelSource& source) {
    Panel p{load_panel(source), {}, {}};
    p.ctx = make_stc_context(p.ds);
    p.params = estimate_parameters(p.ds, p.ctx);
    return p;
}

struct Simulated {
    ConditionedModel model;
    IvCurve curve;
};

Simulated simulate(const Panel& p, double irradiance_w_m2, double temperature_c, std::size_t points) {
    const auto env = EnvConditions::from_user_units(irradiance_w_m2, temperature_c, p.ctx);
    const auto model = condition_model(p.ds, p.params, env, p.ctx);
    return {model, generate_iv_curve(model, env, points)};
}

IvCurve curve_for(const Panel& p, double irradiance_w_m2, double temperature_c, std::size_t points) {
    return simulate(p, irradiance_w_m2, temperature_c, points).curve;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    file << text;
    if (!file) {
        throw Error(ErrorKind::InvalidArgument, "cannot write \"" + path + "\"");
    }
}

std::string suffixed_path(const std::string& path, double value) {
    const std::filesystem::path p(path);
    auto name = p.stem().string() + "_" + format_number(value) + p.extension().string();
    return (p.parent_path() / name).string();
}

void run_estimate(const Options& o, std::ostream& out) {
    const auto p = estimated_panel(o.source);
    std::string report;
    if (p.ds.name) {
        report += "panel=" + *p.ds.name + "\n";
    }
    report += "n=" + format_number(p.params.n) + "\n";
    report += "rs_ohm=" + format_number(p.params.rs) + "\n";
    report += "i0_a=" + format_number(p.params.i0_stc) + "\n";
    report += "iterations=" + std::to_string(p.params.iterations) + "\n";
    report += "residual=" + format_number(p.params.residual) + "\n";
    write_output(o.out_path, report, out);
}

void run_curve(const Options& o, std::ostream& out) {
    check_environment(o.env);
    const auto p = estimated_panel(o.source);
    const auto curve = curve_for(p, o.env.irradiance_w_m2, o.env.temperature_c, o.env.points);
    write_output(o.out_path, export_curve_csv(curve), out);
}

void run_mpp(const Options& o, std::ostream& out) {
    check_environment(o.env);
    const auto p = estimated_panel(o.source);
    const auto mpp =
        track_mpp(curve_for(p, o.env.irradiance_w_m2, o.env.temperature_c, o.env.points));
    std::string report;
    report += "irradiance_w_m2=" + format_number(o.env.irradiance_w_m2) + "\n";
    report += "temperature_c=" + format_number(o.env.temperature_c) + "\n";
    report += "v_mp=" + format_number(mpp.v_mp) + "\n";
    report += "i_mp=" + format_number(mpp.i_mp) + "\n";
    report += "p_mp=" + format_number(mpp.p_mp) + "\n";
    write_output(o.out_path, report, out);
}

void run_sweep(const Options& o, std::ostream& out) {
    const bool by_temperature = !o.temperatures.empty();
    if (by_temperature == !o.irradiances.empty()) {
        throw UsageError("give exactly one sweep axis: --temperatures or --irradiances");
    }
    check_environment(o.env);
    for (double g : o.irradiances) {
        if (!(g > 0.0)) {
            throw UsageError("irradiance must be positive");
        }
    }
    const auto p = estimated_panel(o.source);
    const auto& values = by_temperature ? o.temperatures : o.irradiances;
    const char* axis = by_temperature ? "temperature_c" : "irradiance_w_m2";
    for (double value : values) {
        const auto sim = by_temperature ? simulate(p, o.env.irradiance_w_m2, value, o.env.points)
                                        : simulate(p, value, o.env.temperature_c, o.env.points);
        const auto summary = std::string(axis) + "=" + format_number(value) +
                             " voc_v=" + format_number(sim.model.voc_gt) +
                             " isc_a=" + format_number(sim.model.isc_gt);
        const auto csv = export_curve_csv(sim.curve);
        if (o.out_path.empty()) {
            out << "# " << summary << '\n' << csv;
        } else {
            const auto path = suffixed_path(o.out_path, value);
            write_output(path, csv, out);
            out << summary << " file=" << path << '\n';
        }
    }
}

void run_fn_plot(const Options& o, std::ostream& out) {
    if (!(o.n_min > 0.0) || !(o.n_min < o.n_max)) {
        throw UsageError("n range must satisfy 0 < --n-min < --n-max");
    }
    if (o.count < 2) {
        throw UsageError("--count must be at least 2");
    }
    const auto ds = load_panel(o.source);
    const auto ctx = make_stc_context(ds);
    write_output(o.out_path, export_residual_csv(sample_residual(ds, ctx, o.n_min, o.n_max, o.count)),
                 out);
}

void run_serve(const Options& o, std::ostream& out) {
    auto registry = service::PanelRegistry::with_bundled_panels();
    service::Server server(registry, o.server);
    const int port = server.bind();
    out << "listening on http://" << o.server.bind << ':' << port << std::endl;
    server.listen();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Solar panel simulation from datasheet values", "pvsim"};
    app.require_subcommand(1);

    auto* estimate = app.add_subcommand("estimate", "Estimate n, R_s and I_0 at STC");
    add_panel_source(estimate, o.source);
    estimate->add_option("--out", o.out_path, "Output file (default: stdout)");

    auto* curve = app.add_subcommand("curve", "Emit the I-V/P-V curve as CSV");
    add_panel_source(curve, o.source);
    add_environment(curve, o.env);
    curve->add_option("--out", o.out_path, "Output file (default: stdout)");

    auto* mpp = app.add_subcommand("mpp", "Report the maximum power point");
    add_panel_source(mpp, o.source);
    add_environment(mpp, o.env);
    mpp->add_option("--out", o.out_path, "Output file (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "Curve family over temperatures or irradiances");
    add_panel_source(sweep, o.source);
    add_environment(sweep, o.env);
    sweep->add_option("--temperatures", o.temperatures, "Cell temperatures [degC]")->delimiter(',');
    sweep->add_option("--irradiances", o.irradiances, "Irradiances [W/m^2]")->delimiter(',');
    sweep->add_option("--out", o.out_path,
                      "Output file stem; each curve goes to <stem>_<value><ext> (default: stdout)");

    auto* fn_plot = app.add_subcommand("fn-plot", "Sample the ideality residual f(n) as CSV");
    add_panel_source(fn_plot, o.source);
    fn_plot->add_option("--n-min", o.n_min)->capture_default_str();
    fn_plot->add_option("--n-max", o.n_max)->capture_default_str();
    fn_plot->add_option("--count", o.count)->capture_default_str();
    fn_plot->add_option("--out", o.out_path, "Output file (default: stdout)");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", o.server.port)->capture_default_str();
    serve->add_option("--bind", o.server.bind)->capture_default_str();
    serve->add_option("--ui", o.server.ui_dir, "Directory of static UI assets to serve at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*estimate) run_estimate(o, out);
        else if (*curve) run_curve(o, out);
        else if (*mpp) run_mpp(o, out);
        else if (*sweep) run_sweep(o, out);
        else if (*fn_plot) run_fn_plot(o, out);
        else if (*serve) run_serve(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    out.flush();
    return exit_ok;
}

} // namespace pvsim::cli
