#pragma once

#include "glduality/duality.hpp"
#include "glduality/outer_iteration.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glduality::cli {

enum class Model { GL3D, Scalar1D, Scalar2D };
enum class Command { Solve, Certify, Sweep, Export };
enum class Envelope { Bump, Uniform, Zero };  // Bump is selected as "paper-envelope"
enum class StartKind { Default, Random };

std::string to_string(Model m);
std::string to_string(Command c);
std::string to_string(Envelope e);
std::string to_string(StartKind s);
std::optional<Command> parse_command(const std::string &name);

struct RunConfig {
    Model model = Model::GL3D;
    Command command = Command::Solve;
    std::string out = "out";
    std::uint64_t seed = 1;

    int inner_cells = 16;  // gl3d: cells of Omega per axis
    int outer_cells = 24;  // gl3d: cells of Omega_1 per axis
    int cells = 32;        // scalar: cells of (0, 1) per axis

    GLParams params;
    bool auto_K = true;  // pick K (and K2) from the amplitude at the solved point

    double B0 = 0.0;
    Envelope envelope = Envelope::Bump;
    std::vector<double> sweep;  // B0 amplitudes for the sweep command

    StartKind start = StartKind::Default;
    double start_amplitude = 0.05;

    double load = 0.1;         // scalar: f = load * prod sin(pi x_a)
    int multistart = 4;        // scalar: random Newton starts
    double residual_tol = 0.0; // certificate residual tolerance; 0 picks the model default

    bool operator==(const RunConfig &) const = default;
};

/// Every violation found while parsing, one message per entry with its line number when known.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> problems);
    std::vector<std::string> problems;
};

/// Parses INI-style text: [section] headers, key = value, # or ; comments.
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::filesystem::path &path);
std::string serialize_config(const RunConfig &config);

/// Samples B0 amplitude * (f, f, 0) on the nodes of `grid`.
RealVectorField builtin_envelope(Envelope e, const BoxGrid &grid, double amplitude);
Envelope parse_envelope(const std::string &name);
/// Envelope (x - 3/2)^2 (y - 3/2)^2 (z - 3/2)^2 (x + 3/2)(y + 3/2)(z + 3/2) / 3^6.
double bump_envelope(double x, double y, double z);

/// Writes the plane of `field` nearest to `coordinate` along `axis` as CSV with
/// header x,y,value (the two remaining axes in order), x fastest, 17 significant digits.
void export_slice_csv(const RealScalarField &field, int axis, double coordinate, const std::filesystem::path &path);
struct SliceRow {
    double x, y, value;
};
std::vector<SliceRow> read_slice_csv(const std::filesystem::path &path);
/// Legacy ASCII structured-points file with one point-data scalar (x fastest).
void export_vtk(const RealScalarField &field, const std::string &name, const std::filesystem::path &path);
void export_vtk(const RealVectorField &field, const std::string &name, const std::filesystem::path &path);

/// Exit statuses of run_command.
enum ExitCode : int { Success = 0, Usage = 1, NotConverged = 2, CertificatePrecondition = 3 };

/// Executes config.command, writing artifacts under config.out and a short summary to `summary`.
int run_command(const RunConfig &config, std::ostream &summary);

} // namespace glduality::cli
