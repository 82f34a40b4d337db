#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "relaxmm/dispersion.hpp"
#include "relaxmm/dynamics.hpp"
#include "relaxmm/identities.hpp"
#include "relaxmm/mms.hpp"
#include "relaxmm/regularity.hpp"

namespace relaxmm {

/// A node field on disk is a JSON descriptor <stem>.json plus one header-free
/// file <stem>.<component>.f64 per component: float64 values in little-endian
/// order, x fastest. The descriptor records the field name, grid (counts,
/// lengths, origin, periodic), time and component order.
struct FieldFile {
    CartesianGrid grid;
    double time = 0.0;
    std::string name;
    std::vector<std::string> components;
    std::vector<double> values;  // component-major
};

/// Component names used for vectors (x, y, z) and tensors (11 ... 33).
const std::vector<std::string>& vector_components();
const std::vector<std::string>& tensor_components();

/// descriptor must end in ".json". extra members (such as a resolved run
/// configuration) are merged into the descriptor.
void write_field(const std::filesystem::path& descriptor, const std::string& name, const CartesianGrid& grid, double time,
                 std::span<const double> values, const std::vector<std::string>& components,
                 const nlohmann::json& extra = nlohmann::json::object());
FieldFile read_field(const std::filesystem::path& descriptor);
/// Reads a field with NC components and checks it lives on grid.
template <std::size_t NC>
NodeField<NC> read_node_field(const std::filesystem::path& descriptor, const CartesianGrid& grid);
void write_vector_field(const std::filesystem::path& descriptor, const std::string& name, const VectorField& f,
                        double time = 0.0);
void write_tensor_field(const std::filesystem::path& descriptor, const std::string& name, const TensorField& f,
                        double time = 0.0);

/// A state snapshot is a directory holding the fields u, u_t, P and P_t.
void write_state(const std::filesystem::path& dir, const SimulationState& s,
                 const nlohmann::json& extra = nlohmann::json::object());
SimulationState read_state(const std::filesystem::path& dir);

/// Writes text exactly as given (creating parent directories).
void write_text(const std::filesystem::path& path, const std::string& text);
/// Two-space indented JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// <output>.meta.json next to an output file: the producing command, the file
/// name and the full resolved configuration.
std::filesystem::path sidecar_path(const std::filesystem::path& output);
void write_sidecar(const std::filesystem::path& output, const std::string& command, const nlohmann::json& config);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

std::string energy_csv(const Trajectory& t);
std::string probe_csv(const ProbeSummary& s);
nlohmann::json probe_json(const ProbeSummary& s);
std::string dispersion_csv(const DispersionResult& r);
nlohmann::json dispersion_json(const DispersionResult& r);
std::string convergence_csv(const ConvergenceStudy& s);
nlohmann::json convergence_json(const ConvergenceStudy& s);
nlohmann::json identity_json(const IdentityReport& r);
nlohmann::json compatibility_json(const CompatibilityReport& r);

}  // namespace relaxmm
