#include "relaxmm/app.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>


#include "relaxmm/dispersion.hpp"
#include "relaxmm/identities.hpp"
#include "relaxmm/initial_data.hpp"
#include "relaxmm/io.hpp"
#include "relaxmm/mms.hpp"
#include "relaxmm/regularity.hpp"

namespace relaxmm {

using nlohmann::json;
namespace fs = std::filesystem;

BoundaryData make_boundary(const RunConfig& c, const CartesianGrid& g) {
    if (c.bc.mode == "catalog") return manufactured_case(c.bc.catalog).boundary_data();
    if (c.bc.mode == "extension") {
        const auto gu = std::make_shared<VectorField>(read_node_field<3>(resolve_path(c, c.bc.displacement), g));
        const auto ge = std::make_shared<TensorField>(read_node_field<9>(resolve_path(c, c.bc.extension), g));
        BoundaryData b;
        b.g = [gu](const NodeIndex& n, const Point&, double) { return get_vec(*gu, gu->grid().index(n)); };
        b.g_t = [](const NodeIndex&, const Point&, double) { return Vec3{}; };
        b.G_ext = [ge](const NodeIndex& n, const Point&, double) { return get_tensor(*ge, ge->grid().index(n)); };
        b.G_ext_t = [](const NodeIndex&, const Point&, double) { return Tensor3{}; };
        return b;
    }
    return BoundaryData::homogeneous();
}

SourceTerms make_sources(const RunConfig& c, const CartesianGrid& g) {
    if (!c.sources.catalog.empty()) return manufactured_case(c.sources.catalog).sources(c.parameters, g);
    SourceTerms s;
    if (!c.sources.force.empty()) {
        const auto f = std::make_shared<VectorField>(read_node_field<3>(resolve_path(c, c.sources.force), g));
        s.f = [f](double, VectorField& out) { out = *f; };
    }
    if (!c.sources.moment.empty()) {
        const auto m = std::make_shared<TensorField>(read_node_field<9>(resolve_path(c, c.sources.moment), g));
        s.M = [m](double, TensorField& out) { out = *m; };
    }
    return s;
}

SimulationState make_initial(const RunConfig& c, const CartesianGrid& g) {
    const auto& in = c.initial;
    if (in.kind == "standing_wave") return standing_wave_state(g, in.modes, in.amplitude);
    if (in.kind == "random") return random_band_limited_state(g, in.max_mode, c.seed, in.amplitude);
    if (in.kind == "manufactured") return manufactured_case(in.catalog).exact_state(g, 0.0);
    if (in.kind == "plane_wave") return plane_wave_state(g, c.parameters, in.modes, in.branch, in.amplitude);
    if (in.kind == "file") {
        SimulationState s = read_state(resolve_path(c, in.path));
        if (!(s.grid() == g)) throw ConfigError("/initial/path", "snapshot grid differs from the configured grid");
        return s;
    }
    return SimulationState(g);
}

RunSettings make_settings(const RunConfig& c) {
    RunSettings rs;
    rs.T = c.time.T;
    rs.cfl_safety = c.time.cfl_safety;
    rs.dt = c.time.dt;
    rs.steps = c.time.steps;
    rs.record_every = c.time.record_every;
    rs.snapshot_every = c.outputs.snapshot_every;
    rs.closure = c.grid.closure;
    return rs;
}

namespace {

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

RunConfig load(const Globals& gl) {
    if (gl.config.empty()) throw ConfigError("", "a configuration file is required (--config or positional)");
    RunConfig c = parse_config(gl.config);
    if (gl.seed) c.seed = *gl.seed;
    if (!gl.out_dir.empty()) c.outputs.directory = gl.out_dir;
    validate_config(c);
    return c;
}

fs::path out_dir(const RunConfig& c) {
    fs::path d(c.outputs.directory);
    fs::create_directories(d);
    return d;
}

void emit(const fs::path& path, const std::string& text, const std::string& command, const json& config) {
    write_text(path, text);
    write_sidecar(path, command, config);
}

void emit_json(const fs::path& path, const json& j, const std::string& command, const json& config) {
    write_json(path, j);
    write_sidecar(path, command, config);
}

json trajectory_json(const Trajectory& t, const json& snapshots) {
    json records = json::array();
    for (const auto& r : t.records)
        records.push_back({{"step", r.step}, {"time", r.time}, {"total", r.energy.total}, {"power", r.power}});
    return {{"dt", t.dt}, {"records", records}, {"snapshots", snapshots}};
}

int cmd_simulate(const Globals& gl, std::ostream& out) {
    const RunConfig c = load(gl);
    const json resolved = to_json(c);
    const CartesianGrid g = c.grid.make();
    const fs::path dir = out_dir(c);

    RunSettings rs = make_settings(c);
    json snapshots = json::array();
    rs.on_snapshot = [&](const SimulationState& s, std::size_t step) {
        char name[64];
        std::snprintf(name, sizeof name, "state_%08zu", step);
        write_state(dir / "snapshots" / name, s, {{"command", "simulate"}, {"config", resolved}});
        snapshots.push_back({{"directory", std::string("snapshots/") + name}, {"step", step}, {"time", s.time}});
    };
    std::optional<HSweepProbe> probe;
    if (c.probe) {
        probe.emplace(g, c.parameters, c.probe->cutoff, c.probe->axes, c.probe->h, c.grid.closure);
        rs.on_record = [&](const SimulationState& s, std::size_t) { probe->observe(s); };
    }

    const Trajectory t =
        run_simulation(make_initial(c, g), c.parameters, make_sources(c, g), make_boundary(c, g), rs);

    emit(dir / "energy.csv", energy_csv(t), "simulate", resolved);
    emit_json(dir / "trajectory.json", trajectory_json(t, snapshots), "simulate", resolved);
    if (probe) {
        const ProbeSummary s = probe->summary();
        emit(dir / "probe.csv", probe_csv(s), "simulate", resolved);
        emit_json(dir / "probe.json", probe_json(s), "simulate", resolved);
        out << "probe worst ratio " << format_double(s.worst_ratio) << "\n";
    }
    const auto& last = t.records.back();
    out << "simulated " << last.step << " steps to t = " << format_double(last.time) << " (dt = " << format_double(t.dt)
        << "), energy " << format_double(t.records.front().energy.total) << " -> " << format_double(last.energy.total)
        << "\n";
    out << "wrote " << dir.string() << "\n";
    return kExitOk;
}

int cmd_dispersion(const Globals& gl, std::ostream& out) {
    const RunConfig c = load(gl);
    const json resolved = to_json(c);
    const auto& d = c.dispersion;
    const DispersionResult r = band_structure(c.parameters, d.direction, d.k_max, d.samples, d.gap_resolution);
    const fs::path dir = out_dir(c);
    emit_json(dir / "dispersion.json", dispersion_json(r), "dispersion", resolved);
    emit(dir / "dispersion.csv", dispersion_csv(r), "dispersion", resolved);
    out << "dispersion: " << r.k_samples.size() << " samples";
    if (d.gap_resolution)
        out << ", " << r.gaps.size() << " gap(s)\n";
    else
        out << " (gap search off; set dispersion.gap_resolution)\n";
    for (const auto& gap : r.gaps) out << "  gap (" << format_double(gap.lo) << ", " << format_double(gap.hi) << ")\n";
    return kExitOk;
}

int cmd_probe(const Globals& gl, const std::string& trajectory_dir, std::ostream& out) {
    const RunConfig c = load(gl);
    if (!c.probe) throw ConfigError("/probe", "the probe section is required");
    const json resolved = to_json(c);
    const CartesianGrid g = c.grid.make();
    const fs::path tdir(trajectory_dir);
    std::ifstream in(tdir / "trajectory.json");
    if (!in) throw RuntimeFailure("no trajectory.json in " + tdir.string());
    const json tj = json::parse(in);
    if (tj.at("snapshots").empty()) throw RuntimeFailure("the trajectory has no snapshots; set outputs.snapshot_every");

    HSweepProbe probe(g, c.parameters, c.probe->cutoff, c.probe->axes, c.probe->h, c.grid.closure);
    for (const auto& snap : tj.at("snapshots")) {
        const SimulationState s = read_state(tdir / snap.at("directory").get<std::string>());
        if (!(s.grid() == g)) throw ConfigError("/grid", "snapshot grid differs from the configured grid");
        probe.observe(s);
    }
    const ProbeSummary s = probe.summary();
    const fs::path dir = out_dir(c);
    emit(dir / "probe.csv", probe_csv(s), "probe", resolved);
    emit_json(dir / "probe.json", probe_json(s), "probe", resolved);
    out << "probe over " << probe.observations() << " snapshots\n";
    for (std::size_t a = 0; a < s.axis_ratio.size(); ++a)
        out << "  axis " << c.probe->axes[a] << " ratio " << format_double(s.axis_ratio[a]) << "\n";
    out << "worst ratio " << format_double(s.worst_ratio) << "\n";
    return kExitOk;
}

int cmd_mms(const Globals& gl, const std::string& name, const std::vector<int>& resolutions, double T, double cfl,
            std::ostream& out) {
    RunConfig c;
    if (!gl.config.empty()) c = load(gl);
    if (!gl.out_dir.empty()) c.outputs.directory = gl.out_dir;
    std::vector<ConfigIssue> issues;
    const auto names = manufactured_case_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) issues.push_back({"/mms/case", "unknown case '" + name + "'"});
    if (resolutions.empty()) issues.push_back({"/mms/resolutions", "at least one resolution is required"});
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        if (resolutions[i] < 5) issues.push_back({"/mms/resolutions/" + std::to_string(i), "must be >= 5"});
        if (i > 0 && resolutions[i] <= resolutions[i - 1])
            issues.push_back({"/mms/resolutions/" + std::to_string(i), "resolutions must increase"});
    }
    if (!(T > 0.0)) issues.push_back({"/mms/T", "must be > 0"});
    if (!(cfl > 0.0 && cfl <= 1.0)) issues.push_back({"/mms/cfl_safety", "must be in (0, 1]"});
    if (!issues.empty()) throw ConfigError(issues);

    ConvergenceOptions o;
    o.cfl_safety = cfl;
    o.parameters = c.parameters;
    o.threads = static_cast<unsigned>(gl.threads);
    const ConvergenceStudy s = convergence_study(manufactured_case(name), resolutions, T, o);
    json resolved = to_json(c);
    resolved["mms"] = {{"case", name}, {"resolutions", resolutions}, {"T", T}, {"cfl_safety", cfl},
                       {"floor", o.floor}, {"interior_fraction", o.interior_fraction}};
    const fs::path dir = out_dir(c);
    emit(dir / "convergence.csv", convergence_csv(s), "mms", resolved);
    emit_json(dir / "convergence.json", convergence_json(s), "mms", resolved);
    out << convergence_csv(s);
    for (const auto& f : s.fits) {
        out << f.metric << ": ";
        if (f.at_floor)
            out << "at floor (max error " << format_double(f.max_error) << ")";
        else if (f.non_monotone)
            out << "non-monotone";
        else
            out << "order " << format_double(*f.order);
        out << "\n";
    }
    return kExitOk;
}

int cmd_check(const Globals& gl, std::ostream& out) {
    const RunConfig c = load(gl);  // parameter validation happens here
    const json resolved = to_json(c);
    const CartesianGrid g = c.grid.make();
    json report;
    report["parameters"] = {{"ok", true}};
    bool compatible = true;
    if (!g.periodic()) {
        const SimulationState s = make_initial(c, g);
        const auto cr = check_compatibility(s.u, s.u_t, s.P, s.P_t, make_boundary(c, g), 1e-8);
        report["compatibility"] = compatibility_json(cr);
        compatible = cr.ok();
        out << "compatibility: " << cr.summary() << "\n";
    } else {
        report["compatibility"] = {{"ok", true}, {"checks", json::array()}, {"note", "periodic grid, no boundary data"}};
    }
    const IdentityReport ir = mimetic_identity_check(g, 10, c.seed, c.grid.closure);
    report["identities"] = identity_json(ir);
    out << "identities on " << g.counts()[0] << "x" << g.counts()[1] << "x" << g.counts()[2] << ": div curl "
        << format_double(ir.div_curl) << ", curl grad " << format_double(ir.curl_grad) << ", commute "
        << format_double(ir.commute) << (ir.ok() ? " (ok)" : " (FAILED)") << "\n";
    emit_json(out_dir(c) / "check.json", report, "check", resolved);
    if (!compatible) return kExitValidation;
    if (!ir.ok()) return kExitRuntime;
    return kExitOk;
}

json error_json(const std::string& kind, const std::string& message, const std::vector<ConfigIssue>& issues = {}) {
    json e = {{"kind", kind}, {"message", message}};
    if (!issues.empty()) {
        json list = json::array();
        for (const auto& i : issues) list.push_back({{"pointer", i.pointer}, {"message", i.message}});
        e["issues"] = list;
    }
    return {{"error", e}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relaxed micromorphic continuum solver and diagnostics", "relaxmm"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals gl;
    std::uint64_t seed = 0;
    app.add_option("--config", gl.config, "JSON configuration file");
    app.add_option("--out-dir", gl.out_dir, "output directory (overrides outputs.directory)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized data and diagnostics");
    app.add_option("--threads", gl.threads, "worker threads for multi-resolution studies")->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "run the time-domain solver");
    sim->add_option("config", gl.config, "configuration file");
    auto* disp = app.add_subcommand("dispersion", "plane-wave branches and band gaps");
    disp->add_option("config", gl.config, "configuration file");
    std::string trajectory_dir;
    auto* prb = app.add_subcommand("probe", "difference-quotient energy sweep over a stored trajectory");
    prb->add_option("config", gl.config, "configuration file");
    prb->add_option("trajectory", trajectory_dir, "output directory of a simulate run")->required();
    std::string case_name;
    std::vector<int> resolutions;
    double T = 0.25, cfl = 0.9;
    auto* mms = app.add_subcommand("mms", "manufactured-solution convergence table");
    mms->add_option("case", case_name, "catalog case")->required();
    mms->add_option("resolutions", resolutions, "nodes per axis, increasing")->required();
    mms->add_option("--T", T, "final time");
    mms->add_option("--cfl", cfl, "CFL safety factor");
    auto* chk = app.add_subcommand("check", "validate parameters, compatibility and discrete identities");
    chk->add_option("config", gl.config, "configuration file");

    std::vector<char*> argv;
    std::vector<std::string> copy = args;
    for (auto& a : copy) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << error_json("usage", e.what()).dump() << "\n";
        return kExitValidation;
    }
    if (seed_opt->count() > 0) gl.seed = seed;

    try {
        if (sim->parsed()) return cmd_simulate(gl, out);
        if (disp->parsed()) return cmd_dispersion(gl, out);
        if (prb->parsed()) return cmd_probe(gl, trajectory_dir, out);
        if (mms->parsed()) return cmd_mms(gl, case_name, resolutions, T, cfl, out);
        if (chk->parsed()) return cmd_check(gl, out);
    } catch (const ConfigError& e) {
        err << error_json("validation", "invalid configuration", e.issues()).dump() << "\n";
        return kExitValidation;
    } catch (const IncompatibleData& e) {
        std::vector<ConfigIssue> issues;
        for (const auto& v : e.report().violations())
            issues.push_back({"/initial", v.name + " violated by " + format_double(v.max_error)});
        err << error_json("validation", "initial data incompatible with the boundary data", issues).dump() << "\n";
        return kExitValidation;
    } catch (const InvalidParameters& e) {
        std::vector<ConfigIssue> issues;
        for (const auto& v : e.report().violations) issues.push_back({"/parameters/" + v.field, "violates " + v.constraint});
        err << error_json("validation", e.what(), issues).dump() << "\n";
        return kExitValidation;
    } catch (const NumericalInstability& e) {
        err << error_json("numerical", e.what()).dump() << "\n";
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        err << error_json("validation", e.what()).dump() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << error_json("runtime", e.what()).dump() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace relaxmm
