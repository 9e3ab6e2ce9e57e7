#pragma once
#include "escat/bie.hpp"

namespace escat {

// boundary data (f, g) for the incident potential J_n(k r) e^{i n theta}
// (channel 'p': a_n = 1, channel 's': b_n = 1), polar frame at the particle
// center, displacement gradient/curl evaluated analytically
std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
local_mode_trace(const BoundaryGrid& grid, int n, char channel, const WaveParameters& wave);

// c_l = (i/4) int J_l(kp |y-x_c|) e^{-i l theta(y)} alpha(y) ds(y), same for
// d_l with ks and beta; the i/4 factor makes sum c_l H_l e^{il theta} equal
// the single-layer field outside the circumscribing disk
ExpansionCoefficients multipole_from_densities(const BoundaryDensities& dens,
                                               const BoundaryGrid& grid,
                                               const WaveParameters& wave, int n_term);

struct SmatrixBuildReport {
    int n_term = 0;
    int n_pts = 0;
    double condition_estimate = 0.0;
    std::vector<double> column_residuals;
    double elapsed_seconds = 0.0;
};

// one assembly + factorization, then one solve per incoming basis column
std::pair<ScatteringMatrix, SmatrixBuildReport>
build_scattering_matrix(const ParticleGeometry& geom, const WaveParameters& wave,
                        int n_term, int n_pts, int n_threads = 1);

// S' = D(theta0) S D(theta0)^{-1}, D diagonal with e^{-i n theta0} per mode
// on both channel blocks
ScatteringMatrix rotate_scattering_matrix(const ScatteringMatrix& S, double theta0);

// one matrix per particle; particles sharing (a, b, c) share a single build
// at rotation zero and differ by the rotation conjugation
std::vector<ScatteringMatrix> build_scene_matrices(const SceneConfiguration& cfg,
                                                   int n_threads = 1);

}
