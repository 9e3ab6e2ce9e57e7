#include "escat/bie.hpp"

#include <cmath>

#include "escat/specfun.hpp"

namespace escat {

using specfun::bessel_j;
using specfun::hankel1;

cplx green(double k, const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
    double r = (x - y).norm();
    return cplx(0.0, 0.25) * hankel1(0, k * r);
}

namespace {

// log-singularity quadrature weights for the periodic trapezoid split,
// indexed by (i - j) mod n_pts
Eigen::VectorXd kress_weights(int n_pts) {
    int n = n_pts / 2;
    Eigen::VectorXd R(n_pts);
    for (int d = 0; d < n_pts; ++d) {
        double s = 0.0;
        for (int m = 1; m < n; ++m) s += std::cos(m * d * PI / n) / m;
        R(d) = -(2.0 * PI / n) * s - (PI / (n * n)) * std::cos(d * PI);
    }
    return R;
}

double log_sin_factor(double ti, double tj) {
    double s = std::sin(0.5 * (ti - tj));
    return std::log(4.0 * s * s);
}

// single-layer matrix mapping density node values to potential node values
Eigen::MatrixXcd single_layer(const BoundaryGrid& g, double k, const Eigen::VectorXd& R) {
    int n_pts = g.n_pts;
    int n = n_pts / 2;
    Eigen::MatrixXcd A(n_pts, n_pts);
    for (int i = 0; i < n_pts; ++i) {
        for (int j = 0; j < n_pts; ++j) {
            cplx k1, k2;
            if (i == j) {
                k1 = -g.speeds[i] / (4.0 * PI);
                k2 = (cplx(0.0, 0.25) - EULER_GAMMA / (2.0 * PI)
                      - std::log(0.5 * k * g.speeds[i]) / (2.0 * PI)) * g.speeds[i];
            } else {
                double r = (g.positions[i] - g.positions[j]).norm();
                k1 = -bessel_j(0, k * r) / (4.0 * PI) * g.speeds[j];
                cplx full = cplx(0.0, 0.25) * hankel1(0, k * r) * g.speeds[j];
                k2 = full - k1 * log_sin_factor(g.params[i], g.params[j]);
            }
            int d = ((i - j) % n_pts + n_pts) % n_pts;
            A(i, j) = R(d) * k1 + (PI / n) * k2;
        }
    }
    return A;
}

// normal derivative of the single layer (principal value part)
Eigen::MatrixXcd normal_deriv_layer(const BoundaryGrid& g, double k, const Eigen::VectorXd& R) {
    int n_pts = g.n_pts;
    int n = n_pts / 2;
    Eigen::MatrixXcd A(n_pts, n_pts);
    for (int i = 0; i < n_pts; ++i) {
        for (int j = 0; j < n_pts; ++j) {
            cplx k1, k2;
            if (i == j) {
                k1 = 0.0;
                k2 = g.d2[i].dot(g.normals[i]) / (4.0 * PI * g.speeds[i]);
            } else {
                Eigen::Vector2d d = g.positions[i] - g.positions[j];
                double r = d.norm();
                double proj = d.dot(g.normals[i]) / r;
                cplx full = -cplx(0.0, 0.25) * k * hankel1(1, k * r) * proj * g.speeds[j];
                k1 = (k / (4.0 * PI)) * bessel_j(1, k * r) * proj * g.speeds[j];
                k2 = full - k1 * log_sin_factor(g.params[i], g.params[j]);
            }
            int dd = ((i - j) % n_pts + n_pts) % n_pts;
            A(i, j) = R(dd) * k1 + (PI / n) * k2;
        }
    }
    return A;
}

// d/dt on the periodic grid (even point count)
Eigen::MatrixXd trig_diff(int n_pts) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_pts, n_pts);
    for (int i = 0; i < n_pts; ++i) {
        for (int j = 0; j < n_pts; ++j) {
            if (i == j) continue;
            double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            D(i, j) = 0.5 * sgn / std::tan((i - j) * PI / n_pts);
        }
    }
    return D;
}

// tangential derivative of the single layer: spectral d/dt then arc-length scale
Eigen::MatrixXcd tangential_deriv_layer(const BoundaryGrid& g, const Eigen::MatrixXcd& S,
                                        const Eigen::MatrixXd& D) {
    Eigen::MatrixXcd H = D.cast<cplx>() * S;
    for (int i = 0; i < g.n_pts; ++i) H.row(i) /= g.speeds[i];
    return H;
}

// smooth cross-boundary kernels, plain trapezoid rule
void cross_kernels(const BoundaryGrid& tgt, const BoundaryGrid& src, double k,
                   Eigen::MatrixXcd& dps, Eigen::MatrixXcd& hps) {
    dps.resize(tgt.n_pts, src.n_pts);
    hps.resize(tgt.n_pts, src.n_pts);
    for (int i = 0; i < tgt.n_pts; ++i) {
        for (int j = 0; j < src.n_pts; ++j) {
            Eigen::Vector2d d = tgt.positions[i] - src.positions[j];
            double r = d.norm();
            cplx grad = -cplx(0.0, 0.25) * k * hankel1(1, k * r) * src.weights[j] / r;
            dps(i, j) = grad * d.dot(tgt.normals[i]);
            hps(i, j) = grad * d.dot(tgt.tangents[i]);
        }
    }
}

}  // namespace

BoundarySystem assemble_single_particle(const BoundaryGrid& grid, const WaveParameters& wave) {
    int n = grid.n_pts;
    Eigen::VectorXd R = kress_weights(n);
    Eigen::MatrixXd D = trig_diff(n);
    Eigen::MatrixXcd Sp = single_layer(grid, wave.kp, R);
    Eigen::MatrixXcd Ss = single_layer(grid, wave.ks, R);
    Eigen::MatrixXcd Dp = normal_deriv_layer(grid, wave.kp, R);
    Eigen::MatrixXcd Ds = normal_deriv_layer(grid, wave.ks, R);
    Eigen::MatrixXcd Hp = tangential_deriv_layer(grid, Sp, D);
    Eigen::MatrixXcd Hs = tangential_deriv_layer(grid, Ss, D);

    BoundarySystem sys;
    sys.grid = grid;
    sys.wave = wave;
    sys.matrix.resize(2 * n, 2 * n);
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    sys.matrix.topLeftCorner(n, n) = -0.5 * I + Dp;
    sys.matrix.topRightCorner(n, n) = Hs;
    sys.matrix.bottomLeftCorner(n, n) = Hp;
    sys.matrix.bottomRightCorner(n, n) = 0.5 * I - Ds;
    sys.factorization.compute(sys.matrix);
    sys.rcond = sys.factorization.rcond();
    return sys;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
boundary_data_from_incident(const BoundaryGrid& grid,
                            const std::vector<Eigen::Vector2cd>& u_inc) {
    if (u_inc.size() != static_cast<size_t>(grid.n_pts))
        throw ValidationError("incident trace length does not match grid");
    Eigen::VectorXcd f(grid.n_pts), g(grid.n_pts);
    for (int i = 0; i < grid.n_pts; ++i) {
        const Eigen::Vector2cd& u = u_inc[i];
        f(i) = -(grid.normals[i](0) * u(0) + grid.normals[i](1) * u(1));
        g(i) = -(grid.tangents[i](0) * u(0) + grid.tangents[i](1) * u(1));
    }
    return {f, g};
}

BoundaryDensities solve_densities(const BoundarySystem& sys,
                                  const Eigen::VectorXcd& f, const Eigen::VectorXcd& g) {
    int n = sys.grid.n_pts;
    if (f.size() != n || g.size() != n)
        throw ValidationError("boundary data length does not match grid");
    Eigen::VectorXcd rhs(2 * n);
    rhs.head(n) = f;
    rhs.tail(n) = g;
    Eigen::VectorXcd sol = sys.factorization.solve(rhs);
    BoundaryDensities dens;
    dens.alpha = sol.head(n);
    dens.beta = sol.tail(n);
    return dens;
}

CoupledDirectOperator assemble_coupled_direct(const std::vector<BoundaryGrid>& grids,
                                              const WaveParameters& wave) {
    int total = 0;
    std::vector<int> offset(grids.size());
    for (size_t m = 0; m < grids.size(); ++m) {
        offset[m] = total;
        total += 2 * grids[m].n_pts;
    }
    CoupledDirectOperator op;
    op.grids = grids;
    op.wave = wave;
    op.matrix.resize(total, total);
    for (size_t m = 0; m < grids.size(); ++m) {
        int nm = grids[m].n_pts;
        for (size_t l = 0; l < grids.size(); ++l) {
            int nl = grids[l].n_pts;
            auto blk = op.matrix.block(offset[m], offset[l], 2 * nm, 2 * nl);
            if (l == m) {
                blk = assemble_single_particle(grids[m], wave).matrix;
            } else {
                Eigen::MatrixXcd dp, hp, ds, hs;
                cross_kernels(grids[m], grids[l], wave.kp, dp, hp);
                cross_kernels(grids[m], grids[l], wave.ks, ds, hs);
                blk.topLeftCorner(nm, nl) = dp;
                blk.topRightCorner(nm, nl) = hs;
                blk.bottomLeftCorner(nm, nl) = hp;
                blk.bottomRightCorner(nm, nl) = -ds;
            }
        }
    }
    return op;
}

Eigen::VectorXcd CoupledDirectOperator::apply(const Eigen::VectorXcd& x) const {
    if (x.size() != matrix.cols()) throw ValidationError("direct operator size mismatch");
    return matrix * x;
}

double node_spacing(const BoundaryGrid& grid) {
    double h = 0.0;
    for (double w : grid.weights) h = std::max(h, w);
    return h;
}

std::vector<Eigen::Vector2cd>
eval_exterior_from_densities(const BoundaryDensities& dens, const BoundaryGrid& grid,
                             const WaveParameters& wave,
                             const std::vector<Eigen::Vector2d>& targets,
                             double clearance_factor) {
    int n = grid.n_pts;
    if (dens.alpha.size() != n || dens.beta.size() != n)
        throw ValidationError("density length does not match grid");
    double h = node_spacing(grid) * clearance_factor;
    std::vector<Eigen::Vector2cd> out(targets.size());
    for (size_t t = 0; t < targets.size(); ++t) {
        Eigen::Vector2cd u = Eigen::Vector2cd::Zero();
        for (int j = 0; j < n; ++j) {
            Eigen::Vector2d d = targets[t] - grid.positions[j];
            double r = d.norm();
            if (r < h)
                throw ValidationError("field target too close to a boundary for smooth quadrature");
            cplx gp = -cplx(0.0, 0.25) * wave.kp * hankel1(1, wave.kp * r) / r;
            cplx gs = -cplx(0.0, 0.25) * wave.ks * hankel1(1, wave.ks * r) / r;
            cplx ca = dens.alpha(j) * grid.weights[j] * gp;
            cplx cb = dens.beta(j) * grid.weights[j] * gs;
            u(0) += ca * d(0) + cb * d(1);
            u(1) += ca * d(1) - cb * d(0);
        }
        out[t] = u;
    }
    return out;
}

}  // namespace escat
