#include "escat/smatrix.hpp"

#include <chrono>
#include <cmath>

#include "escat/specfun.hpp"

namespace escat {

using specfun::Kind;
using specfun::cyl_deriv;
using specfun::bessel_j;

std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
local_mode_trace(const BoundaryGrid& grid, int n, char channel, const WaveParameters& wave) {
    if (channel != 'p' && channel != 's') throw ValidationError("channel must be 'p' or 's'");
    double k = (channel == 'p') ? wave.kp : wave.ks;
    std::vector<Eigen::Vector2cd> u(grid.n_pts);
    for (int i = 0; i < grid.n_pts; ++i) {
        Eigen::Vector2d d = grid.positions[i] - grid.geom.center;
        double r = d.norm();
        double theta = std::atan2(d(1), d(0));
        cplx phase = std::exp(cplx(0.0, n * theta));
        cplx dr = k * cyl_deriv(Kind::J, n, k * r) * phase;
        cplx dth = cplx(0.0, static_cast<double>(n)) * bessel_j(n, k * r) * phase / r;
        Eigen::Vector2d er(std::cos(theta), std::sin(theta));
        Eigen::Vector2d et(-std::sin(theta), std::cos(theta));
        Eigen::Vector2cd gradw = dr * er.cast<cplx>() + dth * et.cast<cplx>();
        if (channel == 'p') {
            u[i] = gradw;
        } else {
            // curl of a scalar is its gradient rotated by -pi/2
            u[i] = Eigen::Vector2cd(gradw(1), -gradw(0));
        }
    }
    return boundary_data_from_incident(grid, u);
}

ExpansionCoefficients multipole_from_densities(const BoundaryDensities& dens,
                                               const BoundaryGrid& grid,
                                               const WaveParameters& wave, int n_term) {
    if (dens.alpha.size() != grid.n_pts || dens.beta.size() != grid.n_pts)
        throw ValidationError("density length does not match grid");
    ExpansionCoefficients out = zero_coefficients(ExpansionKind::multipole, n_term);
    cplx quarter_i(0.0, 0.25);
    for (int j = 0; j < grid.n_pts; ++j) {
        Eigen::Vector2d d = grid.positions[j] - grid.geom.center;
        double r = d.norm();
        double theta = std::atan2(d(1), d(0));
        cplx wa = quarter_i * grid.weights[j] * dens.alpha(j);
        cplx wb = quarter_i * grid.weights[j] * dens.beta(j);
        specfun::CylinderFunctionTable tp = specfun::cyl_table(n_term, wave.kp * r);
        specfun::CylinderFunctionTable ts = specfun::cyl_table(n_term, wave.ks * r);
        for (int l = -n_term; l <= n_term; ++l) {
            int a = std::abs(l);
            double sgn = (l < 0 && (a & 1)) ? -1.0 : 1.0;
            cplx phase = std::exp(cplx(0.0, -l * theta));
            out.p(l + n_term) += sgn * tp.values_J[a] * phase * wa;
            out.s(l + n_term) += sgn * ts.values_J[a] * phase * wb;
        }
    }
    return out;
}

std::pair<ScatteringMatrix, SmatrixBuildReport>
build_scattering_matrix(const ParticleGeometry& geom, const WaveParameters& wave,
                        int n_term, int n_pts, int n_threads) {
    auto t0 = std::chrono::steady_clock::now();
    BoundaryGrid grid = discretize(geom, n_pts);
    BoundarySystem sys = assemble_single_particle(grid, wave);

    int mcount = 2 * n_term + 1;
    int dim = 2 * mcount;
    ScatteringMatrix S;
    S.n_term = n_term;
    S.wave = wave;
    S.shape = geom.shape;
    S.provenance = "bie";
    S.entries.resize(dim, dim);

    SmatrixBuildReport rep;
    rep.n_term = n_term;
    rep.n_pts = n_pts;
    rep.condition_estimate = (sys.rcond > 0.0) ? 1.0 / sys.rcond : 0.0;
    rep.column_residuals.assign(dim, 0.0);

    parallel_for(dim, n_threads, [&](int col) {
        char channel = (col < mcount) ? 'p' : 's';
        int n = (col % mcount) - n_term;
        auto [f, g] = local_mode_trace(grid, n, channel, wave);
        BoundaryDensities dens = solve_densities(sys, f, g);
        Eigen::VectorXcd rhs(2 * grid.n_pts), sol(2 * grid.n_pts);
        rhs.head(grid.n_pts) = f;
        rhs.tail(grid.n_pts) = g;
        sol.head(grid.n_pts) = dens.alpha;
        sol.tail(grid.n_pts) = dens.beta;
        double rn = rhs.norm();
        rep.column_residuals[col] = (rn > 0.0) ? (sys.matrix * sol - rhs).norm() / rn : 0.0;
        S.entries.col(col) = multipole_from_densities(dens, grid, wave, n_term).flat();
    });

    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {S, rep};
}

std::vector<ScatteringMatrix> build_scene_matrices(const SceneConfiguration& cfg,
                                                   int n_threads) {
    std::vector<ScatteringMatrix> bases;
    std::vector<int> base_of(cfg.particles.size(), -1);
    for (size_t m = 0; m < cfg.particles.size(); ++m) {
        const Shape& s = cfg.particles[m].shape;
        for (size_t k = 0; k < bases.size(); ++k) {
            const Shape& t = bases[k].shape;
            if (t.a == s.a && t.b == s.b && t.c == s.c) {
                base_of[m] = static_cast<int>(k);
                break;
            }
        }
        if (base_of[m] < 0) {
            ParticleGeometry ref;
            ref.shape = s;
            bases.push_back(
                build_scattering_matrix(ref, cfg.wave, cfg.n_term, cfg.n_pts, n_threads).first);
            base_of[m] = static_cast<int>(bases.size()) - 1;
        }
    }
    std::vector<ScatteringMatrix> out;
    out.reserve(cfg.particles.size());
    for (size_t m = 0; m < cfg.particles.size(); ++m)
        out.push_back(rotate_scattering_matrix(bases[base_of[m]], cfg.particles[m].rotation));
    return out;
}

ScatteringMatrix rotate_scattering_matrix(const ScatteringMatrix& S, double theta0) {
    int mcount = 2 * S.n_term + 1;
    Eigen::VectorXcd d(2 * mcount);
    for (int n = -S.n_term; n <= S.n_term; ++n) {
        cplx v = std::exp(cplx(0.0, -n * theta0));
        d(n + S.n_term) = v;
        d(n + S.n_term + mcount) = v;
    }
    ScatteringMatrix out = S;
    out.entries = d.asDiagonal() * S.entries * d.cwiseInverse().asDiagonal();
    return out;
}

}  // namespace escat
