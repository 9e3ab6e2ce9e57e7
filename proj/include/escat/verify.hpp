#pragma once
#include <string>
#include <vector>

#include "escat/io.hpp"

namespace escat {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;   // measured quantity
    double tol = 0.0;     // threshold it was compared against
    std::string detail;
};

// reference scenes shared by the verification suites and the benchmark paths

// ten particles (a=1, b=1/3, c alternating 3/5) in two rows, point source at
// the center of the first particle; admits the exact exterior solution -u_src
SceneConfiguration reference_scene_10(double omega, int n_term = 20, int n_pts = 200);

// seeded box scene of small particles (a=1/8, b=1/24, c alternating 3/5)
SceneConfiguration box_scene(int count, double omega, int n_term, int n_pts,
                             std::uint64_t seed, const IncidentField& incident);

// dense 3x4 cluster of mid-size particles in a plane wave, for field grids
SceneConfiguration cluster_scene(double omega, int n_term = 12, int n_pts = 150);

// suites: "disk", "example1", "properties", "smoke", "default" (= first three)
std::vector<CheckResult> run_suite(const std::string& name, int n_threads = 1);

// scattered field of the scene solution vs the analytic point-source field,
// at `count` seeded ring samples
double reference_scene_error(const SceneConfiguration& cfg, const SceneSolution& sol,
                             int count = 20);

}
