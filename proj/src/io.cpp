#include "relaxmm/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace relaxmm {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "field data is written in host order, assumed little endian");

namespace {

void ensure_parent(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

std::filesystem::path component_path(const std::filesystem::path& descriptor, const std::string& component) {
    std::filesystem::path p = descriptor;
    p.replace_extension();
    p += "." + component + ".f64";
    return p;
}

json breakdown_json(const EnergyBreakdown& e) {
    return {{"kinetic_u", e.kinetic_u},     {"kinetic_P", e.kinetic_P},       {"elastic_sym", e.elastic_sym},
            {"elastic_trace", e.elastic_trace}, {"elastic_skew", e.elastic_skew}, {"micro_sym", e.micro_sym},
            {"micro_trace", e.micro_trace}, {"curvature", e.curvature},       {"total", e.total}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

const std::vector<std::string>& vector_components() {
    static const std::vector<std::string> names{"x", "y", "z"};
    return names;
}

const std::vector<std::string>& tensor_components() {
    static const std::vector<std::string> names{"11", "12", "13", "21", "22", "23", "31", "32", "33"};
    return names;
}

void write_field(const std::filesystem::path& descriptor, const std::string& name, const CartesianGrid& g, double time,
                 std::span<const double> values, const std::vector<std::string>& components, const json& extra) {
    if (descriptor.extension() != ".json") throw std::invalid_argument("field descriptor must end in .json: " + descriptor.string());
    const std::size_t n = g.node_count();
    if (components.empty() || values.size() != components.size() * n)
        throw std::invalid_argument("field size does not match the grid and component list");
    ensure_parent(descriptor);
    json files = json::array();
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto path = component_path(descriptor, components[c]);
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        os.write(reinterpret_cast<const char*>(values.data() + c * n), static_cast<std::streamsize>(n * sizeof(double)));
        if (!os) throw std::runtime_error("failed writing " + path.string());
        files.push_back(path.filename().string());
    }
    json d = {{"field", name},
              {"counts", g.counts()},
              {"lengths", g.lengths()},
              {"origin", g.origin()},
              {"periodic", g.periodic()},
              {"time", time},
              {"components", components},
              {"files", files},
              {"dtype", "float64"},
              {"byte_order", "little"},
              {"layout", "x fastest, then y, then z"}};
    for (const auto& [k, v] : extra.items()) d[k] = v;
    write_json(descriptor, d);
}

FieldFile read_field(const std::filesystem::path& descriptor) {
    std::ifstream in(descriptor);
    if (!in) throw std::runtime_error("cannot open " + descriptor.string());
    FieldFile f;
    try {
        const json d = json::parse(in);
        f.name = d.at("field").get<std::string>();
        f.time = d.at("time").get<double>();
        f.components = d.at("components").get<std::vector<std::string>>();
        if (d.at("dtype") != "float64") throw std::runtime_error("unsupported dtype");
        f.grid = CartesianGrid(d.at("lengths").get<std::array<double, 3>>(), d.at("counts").get<std::array<int, 3>>(),
                               d.at("periodic").get<bool>() ? CartesianGrid::Topology::periodic
                                                            : CartesianGrid::Topology::bounded,
                               d.at("origin").get<Point>());
    } catch (const json::exception& e) {
        throw std::runtime_error(descriptor.string() + " is not a field descriptor: " + e.what());
    }
    const std::size_t n = f.grid.node_count();
    f.values.resize(f.components.size() * n);
    for (std::size_t c = 0; c < f.components.size(); ++c) {
        const auto path = component_path(descriptor, f.components[c]);
        std::ifstream is(path, std::ios::binary | std::ios::ate);
        if (!is) throw std::runtime_error("cannot open " + path.string());
        if (static_cast<std::size_t>(is.tellg()) != n * sizeof(double))
            throw std::runtime_error(path.string() + " does not hold " + std::to_string(n) + " float64 values");
        is.seekg(0);
        is.read(reinterpret_cast<char*>(f.values.data() + c * n), static_cast<std::streamsize>(n * sizeof(double)));
        if (!is) throw std::runtime_error("failed reading " + path.string());
    }
    return f;
}

template <std::size_t NC>
NodeField<NC> read_node_field(const std::filesystem::path& descriptor, const CartesianGrid& grid) {
    const FieldFile f = read_field(descriptor);
    if (f.components.size() != NC)
        throw std::runtime_error(descriptor.string() + " holds " + std::to_string(f.components.size()) +
                                 " components, expected " + std::to_string(NC));
    if (!(f.grid == grid)) throw std::runtime_error(descriptor.string() + " lives on a different grid");
    NodeField<NC> out(grid);
    std::copy(f.values.begin(), f.values.end(), out.raw().begin());
    return out;
}

template NodeField<1> read_node_field<1>(const std::filesystem::path&, const CartesianGrid&);
template NodeField<3> read_node_field<3>(const std::filesystem::path&, const CartesianGrid&);
template NodeField<9> read_node_field<9>(const std::filesystem::path&, const CartesianGrid&);

void write_vector_field(const std::filesystem::path& descriptor, const std::string& name, const VectorField& f, double time) {
    write_field(descriptor, name, f.grid(), time, f.raw(), vector_components());
}

void write_tensor_field(const std::filesystem::path& descriptor, const std::string& name, const TensorField& f, double time) {
    write_field(descriptor, name, f.grid(), time, f.raw(), tensor_components());
}

void write_state(const std::filesystem::path& dir, const SimulationState& s, const json& extra) {
    s.check_consistent();
    write_field(dir / "u.json", "u", s.grid(), s.time, s.u.raw(), vector_components(), extra);
    write_field(dir / "u_t.json", "u_t", s.grid(), s.time, s.u_t.raw(), vector_components(), extra);
    write_field(dir / "P.json", "P", s.grid(), s.time, s.P.raw(), tensor_components(), extra);
    write_field(dir / "P_t.json", "P_t", s.grid(), s.time, s.P_t.raw(), tensor_components(), extra);
}

SimulationState read_state(const std::filesystem::path& dir) {
    const FieldFile u = read_field(dir / "u.json");
    SimulationState s(u.grid, u.time);
    s.u = read_node_field<3>(dir / "u.json", u.grid);
    s.u_t = read_node_field<3>(dir / "u_t.json", u.grid);
    s.P = read_node_field<9>(dir / "P.json", u.grid);
    s.P_t = read_node_field<9>(dir / "P_t.json", u.grid);
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::filesystem::path sidecar_path(const std::filesystem::path& output) {
    std::filesystem::path p = output;
    p += ".meta.json";
    return p;
}

void write_sidecar(const std::filesystem::path& output, const std::string& command, const json& config) {
    write_json(sidecar_path(output), {{"file", output.filename().string()}, {"command", command}, {"config", config}});
}

std::string energy_csv(const Trajectory& t) {
    std::ostringstream os;
    os << "step,time,kinetic_u,kinetic_P,elastic_sym,elastic_trace,elastic_skew,micro_sym,micro_trace,curvature,total,power\n";
    for (const auto& r : t.records) {
        const auto& e = r.energy;
        os << r.step << ',' << format_double(r.time);
        for (double v : {e.kinetic_u, e.kinetic_P, e.elastic_sym, e.elastic_trace, e.elastic_skew, e.micro_sym, e.micro_trace,
                         e.curvature, e.total, r.power})
            os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

std::string probe_csv(const ProbeSummary& s) {
    std::ostringstream os;
    os << "axis,h,sup_energy,sup_time\n";
    for (const auto& r : s.rows)
        os << r.axis << ',' << format_double(r.h) << ',' << format_double(r.sup_energy) << ',' << format_double(r.sup_time)
           << '\n';
    return os.str();
}

json probe_json(const ProbeSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"axis", r.axis},
                        {"h", r.h},
                        {"sup_energy", r.sup_energy},
                        {"sup_time", r.sup_time},
                        {"at_sup", breakdown_json(r.at_sup)}});
    return {{"rows", rows}, {"axis_ratio", s.axis_ratio}, {"worst_ratio", s.worst_ratio}};
}

std::string dispersion_csv(const DispersionResult& r) {
    std::ostringstream os;
    os << "k";
    for (int j = 1; j <= 12; ++j) os << ",omega_" << j;
    os << '\n';
    for (std::size_t s = 0; s < r.k_samples.size(); ++s) {
        os << format_double(r.k_samples[s]);
        for (double w : r.branches[s]) os << ',' << format_double(w);
        os << '\n';
    }
    return os.str();
}

json dispersion_json(const DispersionResult& r) {
    json branches = json::array();
    for (std::size_t j = 0; j < 12; ++j) {
        json b = json::array();
        for (const auto& sample : r.branches) b.push_back(sample[j]);
        branches.push_back(b);
    }
    json gaps = json::array();
    for (const auto& g : r.gaps) gaps.push_back({g.lo, g.hi});
    return {{"direction", r.direction}, {"k", r.k_samples}, {"branches", branches}, {"gaps", gaps}};
}

std::string convergence_csv(const ConvergenceStudy& s) {
    std::ostringstream os;
    os << "N,h,dt,steps,u_interior,u_global,P_interior,P_global,curl_P_global\n";
    for (const auto& r : s.rows) {
        os << r.N << ',' << format_double(r.h) << ',' << format_double(r.dt) << ',' << r.steps;
        for (double v : {r.u_interior, r.u_global, r.P_interior, r.P_global, r.curl_P_global}) os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

json convergence_json(const ConvergenceStudy& s) {
    json rows = json::array();
    for (const auto& r : s.rows)
        rows.push_back({{"N", r.N},
                        {"h", r.h},
                        {"dt", r.dt},
                        {"steps", r.steps},
                        {"u_interior", r.u_interior},
                        {"u_global", r.u_global},
                        {"P_interior", r.P_interior},
                        {"P_global", r.P_global},
                        {"curl_P_global", r.curl_P_global}});
    json fits = json::array();
    for (const auto& f : s.fits)
        fits.push_back({{"metric", f.metric},
                        {"order", optional_number(f.order)},
                        {"at_floor", f.at_floor},
                        {"non_monotone", f.non_monotone},
                        {"max_error", f.max_error}});
    return {{"case", s.case_name},
            {"T", s.T},
            {"interior", {{"lo", s.interior.lo}, {"hi", s.interior.hi}}},
            {"rows", rows},
            {"fits", fits}};
}

json identity_json(const IdentityReport& r) {
    return {{"fields", r.fields},
            {"div_curl", r.div_curl},
            {"curl_grad", r.curl_grad},
            {"commute", r.commute},
            {"ok", r.ok()}};
}

json compatibility_json(const CompatibilityReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"max_error", c.max_error},
                          {"worst_node", {c.worst_node.i, c.worst_node.j, c.worst_node.k}},
                          {"passed", c.passed}});
    return {{"ok", r.ok()}, {"checks", checks}};
}

}  // namespace relaxmm
