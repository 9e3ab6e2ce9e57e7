#pragma once
#include "escat/model.hpp"

namespace escat {

// per-mode 2x2 map (a_n, b_n) -> (c_n, d_n) for the rigid disk of radius R
struct ModeMatrix {
    int n = 0;
    Eigen::Matrix2cd entries;
};

ModeMatrix mode_matrix(int n, double R, const WaveParameters& wave);

// block-per-mode embedding into the flat 2(2N+1) layout
ScatteringMatrix disk_scattering_matrix(int n_term, double R, const WaveParameters& wave);

}
