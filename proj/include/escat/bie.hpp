#pragma once
#include <utility>

#include "escat/model.hpp"

namespace escat {

// Phi_k(x, y) = (i/4) H0(k|x-y|)
cplx green(double k, const Eigen::Vector2d& x, const Eigen::Vector2d& y);

// Nystrom matrix of [[-I/2 + D'_p, H'_s], [H'_p, I/2 - D'_s]]; rows/cols
// ordered alpha at all nodes then beta at all nodes
struct BoundarySystem {
    BoundaryGrid grid;
    WaveParameters wave;
    Eigen::MatrixXcd matrix;
    Eigen::PartialPivLU<Eigen::MatrixXcd> factorization;
    double rcond = 0.0;
};

BoundarySystem assemble_single_particle(const BoundaryGrid& grid, const WaveParameters& wave);

struct BoundaryDensities {
    Eigen::VectorXcd alpha;  // density of S_kp
    Eigen::VectorXcd beta;   // density of S_ks
};

// f_i = -nu_i . u_inc(x_i),  g_i = -tau_i . u_inc(x_i)
std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
boundary_data_from_incident(const BoundaryGrid& grid,
                            const std::vector<Eigen::Vector2cd>& u_inc);

BoundaryDensities solve_densities(const BoundarySystem& sys,
                                  const Eigen::VectorXcd& f, const Eigen::VectorXcd& g);

// all particles coupled in one dense system; off-diagonal blocks are the
// smooth cross-boundary kernels with plain trapezoid weights
struct CoupledDirectOperator {
    std::vector<BoundaryGrid> grids;
    WaveParameters wave;
    Eigen::MatrixXcd matrix;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
};

CoupledDirectOperator assemble_coupled_direct(const std::vector<BoundaryGrid>& grids,
                                              const WaveParameters& wave);

// largest node-to-node arc step, used as the near-boundary exclusion unit
double node_spacing(const BoundaryGrid& grid);

// u = grad S_kp alpha + curl S_ks beta, smooth quadrature; each target must be
// at least `clearance_factor` node spacings away from the boundary
std::vector<Eigen::Vector2cd>
eval_exterior_from_densities(const BoundaryDensities& dens, const BoundaryGrid& grid,
                             const WaveParameters& wave,
                             const std::vector<Eigen::Vector2d>& targets,
                             double clearance_factor = 5.0);

}
