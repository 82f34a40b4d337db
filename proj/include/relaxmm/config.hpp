#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaxmm/grid.hpp"
#include "relaxmm/material.hpp"
#include "relaxmm/operators.hpp"
#include "relaxmm/regularity.hpp"

namespace relaxmm {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

struct GridConfig {
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    std::array<int, 3> counts{17, 17, 17};
    Point origin{0.0, 0.0, 0.0};
    bool periodic = false;
    Closure closure = Closure::summation_by_parts;

    CartesianGrid make() const;
};

struct TimeConfig {
    double T = 0.0;
    double cfl_safety = 0.5;
    std::optional<double> dt;
    std::optional<std::size_t> steps;
    std::size_t record_every = 1;
};

/// "homogeneous": zero data on every face. "catalog": the closed-form data of a
/// manufactured case. "extension": time-independent g and G_ext read from field
/// descriptors (vector and tensor, see io.hpp) on the run grid.
struct BoundaryConfig {
    std::string mode = "homogeneous";
    std::string catalog;
    std::string displacement;  // vector field descriptor, extension mode
    std::string extension;     // tensor field descriptor, extension mode
};

/// Either a manufactured case name or time-independent field descriptors; all empty means no sources.
struct SourceConfig {
    std::string catalog;
    std::string force;   // vector field descriptor
    std::string moment;  // tensor field descriptor
};

/// kind: zero | standing_wave | random | manufactured | plane_wave | file
struct InitialConfig {
    std::string kind = "zero";
    std::array<int, 3> modes{1, 1, 1};  // standing_wave mode numbers, plane_wave wave numbers
    double amplitude = 1.0;
    int max_mode = 3;  // random
    int branch = 0;    // plane_wave
    std::string catalog;  // manufactured
    std::string path;     // file: a state snapshot directory
};

struct ProbeConfig {
    CutoffSpec cutoff;
    std::vector<int> axes{0, 1, 2};
    std::vector<double> h;  // physical lengths, all lattice multiples on the probed axes
};

struct OutputConfig {
    std::string directory = "out";
    std::size_t snapshot_every = 0;
};

struct DispersionConfig {
    Vec3 direction{1.0, 0.0, 0.0};
    double k_max = 10.0;
    int samples = 201;
    std::optional<double> gap_resolution;
};

struct RunConfig {
    GridConfig grid;
    MaterialParameters parameters = kReferenceParameters;
    TimeConfig time;
    BoundaryConfig bc;
    SourceConfig sources;
    InitialConfig initial;
    std::optional<ProbeConfig> probe;
    OutputConfig outputs;
    DispersionConfig dispersion;
    std::uint64_t seed = kDefaultSeed;
    /// Directory used to resolve relative data paths (the config file's directory).
    std::filesystem::path base_dir;
};

struct ConfigIssue {
    std::string pointer;  // JSON pointer of the offending member
    std::string message;
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    ConfigError(std::string pointer, std::string message)
        : ConfigError(std::vector<ConfigIssue>{{std::move(pointer), std::move(message)}}) {}
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// Reads, fills defaults and cross-validates. Every problem found is reported,
/// each with the JSON pointer of the member at fault.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Re-runs the cross-field checks (after command-line overrides, say).
void validate_config(const RunConfig& c);

/// Fully resolved configuration, defaults included. parse_config_json of the
/// result gives back an equal configuration.
nlohmann::json to_json(const RunConfig& c);

/// Path of a data file named in the configuration.
std::filesystem::path resolve_path(const RunConfig& c, const std::string& p);

}  // namespace relaxmm
