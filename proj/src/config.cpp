#include "relaxmm/config.hpp"
#include "relaxmm/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "relaxmm/mms.hpp"

namespace relaxmm {

using nlohmann::json;

namespace {

std::string join_messages(const std::vector<ConfigIssue>& issues) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& i : issues) os << "\n  " << (i.pointer.empty() ? "/" : i.pointer) << ": " << i.message;
    return os.str();
}

std::string fmt(double v) { return format_double(v); }

bool is_catalog_name(const std::string& s) {
    const auto names = manufactured_case_names();
    return std::find(names.begin(), names.end(), s) != names.end();
}

std::string catalog_list() {
    std::string out;
    for (const auto& n : manufactured_case_names()) out += (out.empty() ? "" : ", ") + n;
    return out;
}

// Collects issues while reading a JSON document with defaults.
class Reader {
public:
    std::vector<ConfigIssue> issues;

    void add(const std::string& ptr, const std::string& msg) { issues.push_back({ptr, msg}); }

    // nullptr when the member is absent; records an issue when present but not an object.
    const json* object(const json& parent, const std::string& key, const std::string& ptr) {
        if (!parent.contains(key)) return nullptr;
        const json& v = parent.at(key);
        if (!v.is_object()) {
            add(ptr, "must be an object");
            return nullptr;
        }
        return &v;
    }

    void allow_only(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) add(ptr + "/" + it.key(), "unknown member");
        }
    }

    void number(const json& obj, const char* key, const std::string& ptr, double& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            add(ptr + "/" + key, "must be a finite number");
            return;
        }
        out = v.get<double>();
    }

    void number(const json& obj, const char* key, const std::string& ptr, std::optional<double>& out) {
        if (!obj.contains(key) || obj.at(key).is_null()) return;
        double v = 0.0;
        const std::size_t before = issues.size();
        number(obj, key, ptr, v);
        if (issues.size() == before) out = v;
    }

    template <typename Int>
    void integer(const json& obj, const char* key, const std::string& ptr, Int& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            add(ptr + "/" + key, "must be an integer");
            return;
        }
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned()) {
                out = static_cast<Int>(v.get<std::uint64_t>());
            } else if (v.get<std::int64_t>() >= 0) {
                out = static_cast<Int>(v.get<std::int64_t>());
            } else {
                add(ptr + "/" + key, "must be >= 0");
            }
        } else {
            out = static_cast<Int>(v.get<std::int64_t>());
        }
    }

    void boolean(const json& obj, const char* key, const std::string& ptr, bool& out) {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_boolean()) {
            add(ptr + "/" + key, "must be true or false");
            return;
        }
        out = obj.at(key).get<bool>();
    }

    void string(const json& obj, const char* key, const std::string& ptr, std::string& out) {
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_string()) {
            add(ptr + "/" + key, "must be a string");
            return;
        }
        out = obj.at(key).get<std::string>();
    }

    template <typename T>
    void triple(const json& obj, const char* key, const std::string& ptr, std::array<T, 3>& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        const std::string p = ptr + "/" + key;
        if (!v.is_array() || v.size() != 3) {
            add(p, "must be an array of three numbers");
            return;
        }
        std::array<T, 3> tmp{};
        for (std::size_t a = 0; a < 3; ++a) {
            const bool ok = std::is_integral_v<T> ? v[a].is_number_integer() : v[a].is_number();
            if (!ok) {
                add(p + "/" + std::to_string(a), std::is_integral_v<T> ? "must be an integer" : "must be a number");
                return;
            }
            tmp[a] = v[a].get<T>();
        }
        out = tmp;
    }

    template <typename T>
    void list(const json& obj, const char* key, const std::string& ptr, std::vector<T>& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        const std::string p = ptr + "/" + key;
        if (!v.is_array()) {
            add(p, "must be an array");
            return;
        }
        std::vector<T> tmp;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
            if (!ok) {
                add(p + "/" + std::to_string(i), std::is_integral_v<T> ? "must be an integer" : "must be a number");
                return;
            }
            tmp.push_back(v[i].get<T>());
        }
        out = tmp;
    }
};

void read_box(Reader& r, const json& obj, const std::string& ptr, Box& box) {
    r.allow_only(obj, ptr, {"lo", "hi"});
    if (!obj.contains("lo") || !obj.contains("hi")) r.add(ptr, "needs lo and hi");
    r.triple(obj, "lo", ptr, box.lo);
    r.triple(obj, "hi", ptr, box.hi);
}

Closure closure_from(const std::string& s, Reader& r, const std::string& ptr) {
    if (s == "summation_by_parts") return Closure::summation_by_parts;
    if (s == "one_sided") return Closure::one_sided;
    r.add(ptr, "must be summation_by_parts or one_sided, got '" + s + "'");
    return Closure::summation_by_parts;
}

void check_file(std::vector<ConfigIssue>& out, const RunConfig& c, const std::string& ptr, const std::string& p) {
    if (p.empty()) {
        out.push_back({ptr, "a file path is required"});
    } else if (!std::filesystem::exists(resolve_path(c, p))) {
        out.push_back({ptr, "file not found: " + resolve_path(c, p).string()});
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::invalid_argument(join_messages(issues)), issues_(std::move(issues)) {}

CartesianGrid GridConfig::make() const {
    return CartesianGrid(lengths, counts, periodic ? CartesianGrid::Topology::periodic : CartesianGrid::Topology::bounded,
                         origin);
}

std::filesystem::path resolve_path(const RunConfig& c, const std::string& p) {
    const std::filesystem::path path(p);
    if (path.is_absolute() || c.base_dir.empty()) return path;
    return c.base_dir / path;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{"", "cannot open configuration file " + path.string()}});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({{"", std::string("not a JSON document: ") + e.what()}});
    }
    return parse_config_json(doc, path.parent_path());
}

RunConfig parse_config_json(const json& doc, const std::filesystem::path& base_dir) {
    Reader r;
    RunConfig c;
    c.base_dir = base_dir;
    if (!doc.is_object()) throw ConfigError("", "the configuration must be a JSON object");
    r.allow_only(doc, "", {"grid", "parameters", "time", "bc", "sources", "initial", "probe", "outputs", "dispersion", "seed"});

    if (const json* g = r.object(doc, "grid", "/grid")) {
        r.allow_only(*g, "/grid", {"lengths", "counts", "origin", "periodic", "closure"});
        r.triple(*g, "lengths", "/grid", c.grid.lengths);
        r.triple(*g, "counts", "/grid", c.grid.counts);
        r.triple(*g, "origin", "/grid", c.grid.origin);
        r.boolean(*g, "periodic", "/grid", c.grid.periodic);
        std::string closure = to_string(c.grid.closure);
        r.string(*g, "closure", "/grid", closure);
        c.grid.closure = closure_from(closure, r, "/grid/closure");
    }
    if (const json* p = r.object(doc, "parameters", "/parameters")) {
        r.allow_only(*p, "/parameters", {"mu_e", "lambda_e", "mu_c", "mu_micro", "lambda_micro", "L_c"});
        r.number(*p, "mu_e", "/parameters", c.parameters.mu_e);
        r.number(*p, "lambda_e", "/parameters", c.parameters.lambda_e);
        r.number(*p, "mu_c", "/parameters", c.parameters.mu_c);
        r.number(*p, "mu_micro", "/parameters", c.parameters.mu_micro);
        r.number(*p, "lambda_micro", "/parameters", c.parameters.lambda_micro);
        r.number(*p, "L_c", "/parameters", c.parameters.L_c);
    }
    if (const json* t = r.object(doc, "time", "/time")) {
        r.allow_only(*t, "/time", {"T", "cfl_safety", "dt", "steps", "record_every"});
        r.number(*t, "T", "/time", c.time.T);
        r.number(*t, "cfl_safety", "/time", c.time.cfl_safety);
        r.number(*t, "dt", "/time", c.time.dt);
        if (t->contains("steps") && !t->at("steps").is_null()) {
            std::size_t steps = 0;
            r.integer(*t, "steps", "/time", steps);
            c.time.steps = steps;
        }
        r.integer(*t, "record_every", "/time", c.time.record_every);
    }
    if (const json* b = r.object(doc, "bc", "/bc")) {
        r.allow_only(*b, "/bc", {"mode", "catalog", "displacement", "extension"});
        r.string(*b, "mode", "/bc", c.bc.mode);
        r.string(*b, "catalog", "/bc", c.bc.catalog);
        r.string(*b, "displacement", "/bc", c.bc.displacement);
        r.string(*b, "extension", "/bc", c.bc.extension);
    }
    if (const json* s = r.object(doc, "sources", "/sources")) {
        r.allow_only(*s, "/sources", {"catalog", "force", "moment"});
        r.string(*s, "catalog", "/sources", c.sources.catalog);
        r.string(*s, "force", "/sources", c.sources.force);
        r.string(*s, "moment", "/sources", c.sources.moment);
    }
    if (const json* i = r.object(doc, "initial", "/initial")) {
        r.allow_only(*i, "/initial", {"kind", "modes", "amplitude", "max_mode", "branch", "catalog", "path"});
        r.string(*i, "kind", "/initial", c.initial.kind);
        r.triple(*i, "modes", "/initial", c.initial.modes);
        r.number(*i, "amplitude", "/initial", c.initial.amplitude);
        r.integer(*i, "max_mode", "/initial", c.initial.max_mode);
        r.integer(*i, "branch", "/initial", c.initial.branch);
        r.string(*i, "catalog", "/initial", c.initial.catalog);
        r.string(*i, "path", "/initial", c.initial.path);
    }
    if (const json* p = r.object(doc, "probe", "/probe")) {
        r.allow_only(*p, "/probe", {"inner", "outer", "inner_fraction", "outer_fraction", "axes", "h", "h_multiples"});
        ProbeConfig pc;
        const bool boxes = p->contains("inner") || p->contains("outer");
        const bool fractions = p->contains("inner_fraction") || p->contains("outer_fraction");
        if (boxes && fractions) r.add("/probe", "give either inner/outer boxes or inner_fraction/outer_fraction, not both");
        if (boxes) {
            if (const json* in = r.object(*p, "inner", "/probe/inner")) read_box(r, *in, "/probe/inner", pc.cutoff.inner);
            if (const json* out = r.object(*p, "outer", "/probe/outer")) read_box(r, *out, "/probe/outer", pc.cutoff.outer);
            if (!p->contains("inner") || !p->contains("outer")) r.add("/probe", "needs both inner and outer");
        } else {
            double fi = 0.25, fo = 0.5;
            r.number(*p, "inner_fraction", "/probe", fi);
            r.number(*p, "outer_fraction", "/probe", fo);
            try {
                pc.cutoff = CutoffSpec::centered(c.grid.make(), fi, fo);
            } catch (const std::invalid_argument& e) {
                r.add("/probe", e.what());
            }
        }
        r.list(*p, "axes", "/probe", pc.axes);
        const bool has_h = p->contains("h"), has_m = p->contains("h_multiples");
        if (has_h && has_m) r.add("/probe", "give either h or h_multiples, not both");
        if (has_h) {
            r.list(*p, "h", "/probe", pc.h);
        } else {
            std::vector<int> mult{4, 2, 1};
            r.list(*p, "h_multiples", "/probe", mult);
            double spacing = -1.0;
            bool uniform = true;
            for (int a : pc.axes) {
                if (a < 0 || a > 2) continue;
                const double s = c.grid.lengths[static_cast<std::size_t>(a)] /
                                 (c.grid.periodic ? c.grid.counts[static_cast<std::size_t>(a)]
                                                  : c.grid.counts[static_cast<std::size_t>(a)] - 1);
                if (spacing < 0.0) spacing = s;
                uniform = uniform && std::abs(s - spacing) <= 1e-12 * spacing;
            }
            if (!uniform) {
                r.add("/probe/h_multiples", "probed axes have different spacings; give physical h instead");
            } else {
                for (int m : mult) pc.h.push_back(m * spacing);
            }
        }
        c.probe = pc;
    }
    if (const json* o = r.object(doc, "outputs", "/outputs")) {
        r.allow_only(*o, "/outputs", {"directory", "snapshot_every"});
        r.string(*o, "directory", "/outputs", c.outputs.directory);
        r.integer(*o, "snapshot_every", "/outputs", c.outputs.snapshot_every);
    }
    if (const json* d = r.object(doc, "dispersion", "/dispersion")) {
        r.allow_only(*d, "/dispersion", {"direction", "k_max", "samples", "gap_resolution"});
        r.triple(*d, "direction", "/dispersion", c.dispersion.direction);
        r.number(*d, "k_max", "/dispersion", c.dispersion.k_max);
        r.integer(*d, "samples", "/dispersion", c.dispersion.samples);
        r.number(*d, "gap_resolution", "/dispersion", c.dispersion.gap_resolution);
    }
    r.integer(doc, "seed", "", c.seed);

    if (!r.issues.empty()) throw ConfigError(r.issues);
    validate_config(c);
    return c;
}

void validate_config(const RunConfig& c) {
    std::vector<ConfigIssue> out;
    auto add = [&](std::string p, std::string m) { out.push_back({std::move(p), std::move(m)}); };

    // grid
    bool grid_ok = true;
    for (std::size_t a = 0; a < 3; ++a) {
        if (!(c.grid.lengths[a] > 0.0)) {
            add("/grid/lengths/" + std::to_string(a), "must be > 0, got " + fmt(c.grid.lengths[a]));
            grid_ok = false;
        }
        const int min_count = c.grid.periodic ? 3 : 4;
        if (c.grid.counts[a] < min_count) {
            add("/grid/counts/" + std::to_string(a),
                "must be >= " + std::to_string(min_count) + ", got " + std::to_string(c.grid.counts[a]));
            grid_ok = false;
        }
    }
    CartesianGrid g;
    if (grid_ok) g = c.grid.make();

    // parameters
    for (const auto& v : validate_parameters(c.parameters).violations)
        add("/parameters/" + v.field, "violates " + v.constraint + " (value " + fmt(v.value) + ")");

    // time
    if (!(c.time.T >= 0.0)) add("/time/T", "must be >= 0, got " + fmt(c.time.T));
    if (!(c.time.cfl_safety > 0.0 && c.time.cfl_safety <= 1.0))
        add("/time/cfl_safety", "must be in (0, 1], got " + fmt(c.time.cfl_safety));
    if (c.time.dt && !(*c.time.dt > 0.0)) add("/time/dt", "must be > 0, got " + fmt(*c.time.dt));
    if (c.time.record_every < 1) add("/time/record_every", "must be >= 1");

    // boundary data
    const std::set<std::string> bc_modes{"homogeneous", "catalog", "extension"};
    if (!bc_modes.count(c.bc.mode)) {
        add("/bc/mode", "must be homogeneous, catalog or extension, got '" + c.bc.mode + "'");
    } else if (c.grid.periodic && c.bc.mode != "homogeneous") {
        add("/bc/mode", "periodic grids take no boundary data; use homogeneous");
    } else if (c.bc.mode == "catalog") {
        if (!is_catalog_name(c.bc.catalog)) add("/bc/catalog", "unknown case '" + c.bc.catalog + "'; catalog: " + catalog_list());
    } else if (c.bc.mode == "extension") {
        check_file(out, c, "/bc/displacement", c.bc.displacement);
        check_file(out, c, "/bc/extension", c.bc.extension);
    }

    // sources
    if (!c.sources.catalog.empty()) {
        if (!c.sources.force.empty() || !c.sources.moment.empty())
            add("/sources", "give either a catalog case or field files, not both");
        if (!is_catalog_name(c.sources.catalog))
            add("/sources/catalog", "unknown case '" + c.sources.catalog + "'; catalog: " + catalog_list());
    }
    if (!c.sources.force.empty()) check_file(out, c, "/sources/force", c.sources.force);
    if (!c.sources.moment.empty()) check_file(out, c, "/sources/moment", c.sources.moment);

    // initial data
    const auto& in = c.initial;
    if (!std::isfinite(in.amplitude)) add("/initial/amplitude", "must be finite");
    if (in.kind == "zero") {
    } else if (in.kind == "standing_wave") {
        if (c.grid.periodic) add("/initial/kind", "standing waves need a bounded grid");
        for (std::size_t a = 0; a < 3; ++a)
            if (in.modes[a] < 1) add("/initial/modes/" + std::to_string(a), "must be >= 1");
    } else if (in.kind == "random") {
        if (c.grid.periodic) add("/initial/kind", "random band-limited data needs a bounded grid");
        if (in.max_mode < 1) add("/initial/max_mode", "must be >= 1");
    } else if (in.kind == "manufactured") {
        if (!is_catalog_name(in.catalog)) add("/initial/catalog", "unknown case '" + in.catalog + "'; catalog: " + catalog_list());
    } else if (in.kind == "plane_wave") {
        if (!c.grid.periodic) add("/initial/kind", "plane waves need a periodic grid");
        if (in.modes[0] == 0 && in.modes[1] == 0 && in.modes[2] == 0) add("/initial/modes", "must not all be zero");
        if (in.branch < 0 || in.branch > 11) add("/initial/branch", "must be in [0, 11], got " + std::to_string(in.branch));
    } else if (in.kind == "file") {
        check_file(out, c, "/initial/path", in.path);
    } else {
        add("/initial/kind", "must be zero, standing_wave, random, manufactured, plane_wave or file, got '" + in.kind + "'");
    }

    // probe
    if (c.probe && grid_ok) {
        const auto& p = *c.probe;
        if (c.grid.periodic) add("/probe", "the probe needs a bounded grid");
        bool boxes_ok = true;
        try {
            p.cutoff.validate(g);
        } catch (const std::invalid_argument& e) {
            add("/probe", e.what());
            boxes_ok = false;
        }
        if (boxes_ok && !c.grid.periodic) {
            for (int a = 0; a < 3; ++a)
                for (int sgn : {-1, 1})
                    if (p.cutoff.inner_clearance(a, sgn) < 2.0 * g.spacing()[static_cast<std::size_t>(a)] * (1.0 - 1e-12))
                        add("/probe", std::string(sgn < 0 ? "lower" : "upper") + " V-to-U margin along axis " + std::to_string(a) +
                                            " is below two grid spacings");
        }
        if (p.axes.empty()) add("/probe/axes", "must not be empty");
        std::set<int> seen;
        for (std::size_t i = 0; i < p.axes.size(); ++i) {
            if (p.axes[i] < 0 || p.axes[i] > 2) add("/probe/axes/" + std::to_string(i), "must be 0, 1 or 2");
            if (!seen.insert(p.axes[i]).second) add("/probe/axes/" + std::to_string(i), "repeated axis");
        }
        if (p.h.empty()) add("/probe/h", "must not be empty");
        for (std::size_t i = 0; i < p.h.size(); ++i) {
            const double h = p.h[i];
            const std::string ptr = "/probe/h/" + std::to_string(i);
            for (int a : p.axes) {
                if (a < 0 || a > 2) continue;
                try {
                    lattice_steps(g, a, h);
                } catch (const std::invalid_argument&) {
                    add(ptr, fmt(h) + " is not a nonzero multiple of the spacing " + fmt(g.spacing()[static_cast<std::size_t>(a)]) +
                                 " on axis " + std::to_string(a));
                    break;
                }
                if (boxes_ok && std::abs(h) > p.cutoff.outer_clearance(g, a, h > 0 ? 1 : -1) * (1.0 + 1e-12)) {
                    add(ptr, "shift " + fmt(h) + " moves U outside the domain along axis " + std::to_string(a));
                    break;
                }
            }
        }
    }

    // outputs and dispersion
    if (c.outputs.directory.empty()) add("/outputs/directory", "must not be empty");
    const auto& d = c.dispersion;
    if (!(d.direction[0] != 0.0 || d.direction[1] != 0.0 || d.direction[2] != 0.0))
        add("/dispersion/direction", "must be nonzero");
    if (!(d.k_max >= 0.0)) add("/dispersion/k_max", "must be >= 0, got " + fmt(d.k_max));
    if (d.samples < 2) add("/dispersion/samples", "must be >= 2, got " + std::to_string(d.samples));
    if (d.gap_resolution && !(*d.gap_resolution > 0.0)) add("/dispersion/gap_resolution", "must be > 0");

    if (!out.empty()) throw ConfigError(out);
}

json to_json(const RunConfig& c) {
    json j;
    j["grid"] = {{"lengths", c.grid.lengths},
                 {"counts", c.grid.counts},
                 {"origin", c.grid.origin},
                 {"periodic", c.grid.periodic},
                 {"closure", to_string(c.grid.closure)}};
    const auto& p = c.parameters;
    j["parameters"] = {{"mu_e", p.mu_e},         {"lambda_e", p.lambda_e},         {"mu_c", p.mu_c},
                       {"mu_micro", p.mu_micro}, {"lambda_micro", p.lambda_micro}, {"L_c", p.L_c}};
    j["time"] = {{"T", c.time.T}, {"cfl_safety", c.time.cfl_safety}, {"record_every", c.time.record_every}};
    j["time"]["dt"] = c.time.dt ? json(*c.time.dt) : json(nullptr);
    j["time"]["steps"] = c.time.steps ? json(*c.time.steps) : json(nullptr);
    j["bc"] = {{"mode", c.bc.mode}};
    if (c.bc.mode == "catalog") j["bc"]["catalog"] = c.bc.catalog;
    if (c.bc.mode == "extension") {
        j["bc"]["displacement"] = c.bc.displacement;
        j["bc"]["extension"] = c.bc.extension;
    }
    j["sources"] = json::object();
    if (!c.sources.catalog.empty()) j["sources"]["catalog"] = c.sources.catalog;
    if (!c.sources.force.empty()) j["sources"]["force"] = c.sources.force;
    if (!c.sources.moment.empty()) j["sources"]["moment"] = c.sources.moment;
    const auto& in = c.initial;
    j["initial"] = {{"kind", in.kind},       {"modes", in.modes},     {"amplitude", in.amplitude},
                    {"max_mode", in.max_mode}, {"branch", in.branch}};
    if (!in.catalog.empty()) j["initial"]["catalog"] = in.catalog;
    if (!in.path.empty()) j["initial"]["path"] = in.path;
    if (c.probe) {
        const auto& pr = *c.probe;
        j["probe"] = {{"inner", {{"lo", pr.cutoff.inner.lo}, {"hi", pr.cutoff.inner.hi}}},
                      {"outer", {{"lo", pr.cutoff.outer.lo}, {"hi", pr.cutoff.outer.hi}}},
                      {"axes", pr.axes},
                      {"h", pr.h}};
    }
    j["outputs"] = {{"directory", c.outputs.directory}, {"snapshot_every", c.outputs.snapshot_every}};
    j["dispersion"] = {{"direction", c.dispersion.direction},
                       {"k_max", c.dispersion.k_max},
                       {"samples", c.dispersion.samples},
                       {"gap_resolution", c.dispersion.gap_resolution ? json(*c.dispersion.gap_resolution) : json(nullptr)}};
    j["seed"] = c.seed;
    return j;
}

}  // namespace relaxmm
