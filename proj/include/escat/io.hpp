#pragma once
#include <optional>
#include <string>

#include "escat/fields.hpp"
#include "escat/model.hpp"

namespace escat {

struct GenerateSpec {
    int count = 0;
    double box[4] = {0, 0, 1, 1};  // x0 y0 x1 y1
    std::vector<Shape> shapes;     // cycled over particles
    double min_separation = -1.0;  // <0 -> 10% of largest circumradius
    bool random_rotations = true;
    int sweeps = 8;
};

struct SweepSpec {
    std::vector<double> omega_values;  // empty -> config omega only
    std::vector<int> count_values;     // empty -> config particle list as-is
};

// full parsed configuration document; unknown keys are rejected
struct Config {
    SceneConfiguration scene;
    std::optional<GenerateSpec> generate;
    std::optional<FieldGridSpec> grid;
    std::optional<SweepSpec> sweep;
    std::optional<Shape> smatrix_shape;  // standalone shape for the smatrix command
    std::string raw_json;                // echoed into manifests
};

Config parse_config_text(const std::string& text);
Config load_config(const std::string& path);
std::string scene_to_json(const SceneConfiguration& scene);

// cfg.raw_json with the generate section replaced by the materialized
// particle list (grid/sweep/shape sections survive the round trip)
std::string config_with_particles_json(const Config& cfg);

// whole-file atomic write (temp file + rename)
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// versioned text format, 17 significant digits, value-exact round trip
void write_scattering_matrix(const std::string& path, const ScatteringMatrix& S, int n_pts);
std::pair<ScatteringMatrix, int> read_scattering_matrix(const std::string& path);

void write_solution(const std::string& path, const SceneConfiguration& cfg,
                    const SceneSolution& sol);
SceneSolution read_solution(const std::string& path, int expect_particles);

struct RunManifest {
    std::string config_echo;
    int threads = 1;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int iterations = 0;
    double residual = 0.0;
    double t_assembly = 0.0;
    double t_smatrix = 0.0;
    double t_solve = 0.0;
    double t_field = 0.0;
    std::optional<double> field_error;
    std::vector<std::string> artifact_paths;
};

std::string manifest_to_json(const RunManifest& m);

void write_field_csv(const std::string& path, const FieldGrid& grid);

struct BenchRow {
    double omega = 0.0;
    int count = 0;
    int n_term = 0;
    int n_pts = 0;
    int iterations = 0;
    double residual = 0.0;
    double t_smatrix = 0.0;
    double t_solve = 0.0;
    std::optional<double> field_error;
};

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

std::string format_g17(double v);

}
