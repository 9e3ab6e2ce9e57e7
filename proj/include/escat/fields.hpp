#pragma once
#include "escat/multiscatter.hpp"

namespace escat {

std::vector<Eigen::Vector2cd> incident_displacement(const IncidentField& incident,
                                                    const WaveParameters& wave,
                                                    const std::vector<Eigen::Vector2d>& targets);

// sum over particles of the analytic gradients/curls of H_n(kr) e^{in theta};
// valid for targets outside every circumscribing disk. Targets inside a disk
// annulus (outside the particle, at clearance from its boundary) are handled
// by the density fallback: a per-particle BIE solve driven by the total
// exterior field trace.
std::vector<Eigen::Vector2cd> scattered_displacement(const SceneSolution& solution,
                                                     const SceneConfiguration& cfg,
                                                     const std::vector<Eigen::Vector2d>& targets);

// ||computed - reference||_2 / ||reference||_2 over stacked complex samples
double relative_l2_error(const std::vector<Eigen::Vector2cd>& computed,
                         const std::vector<Eigen::Vector2cd>& reference);

struct FieldGridSpec {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    int nx = 2, ny = 2;
    double clearance_factor = 5.0;  // in boundary node spacings
};

struct FieldGrid {
    FieldGridSpec spec;
    std::vector<Eigen::Vector2d> points;   // row-major over the grid
    std::vector<std::uint8_t> mask;        // 1 = excluded, carries no value
    std::vector<Eigen::Vector2cd> values;  // total field at unmasked points, zero elsewhere
};

// total field = incident + scattered at unmasked points
FieldGrid evaluate_grid(const SceneConfiguration& cfg, const SceneSolution& solution,
                        const FieldGridSpec& spec, int n_threads = 1);

// seeded sample ring enclosing the scene, used for error metrics
std::vector<Eigen::Vector2d> sample_ring(const SceneConfiguration& cfg, int count,
                                         std::uint64_t seed, double margin = 1.0,
                                         double width = 5.0);

}
