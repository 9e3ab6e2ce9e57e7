#include <cmath>
#include <doctest.h>

#include "escat/fields.hpp"
#include "escat/mie.hpp"
#include "escat/smatrix.hpp"
#include "escat/specfun.hpp"

using namespace escat;

namespace {

cplx mode_scalar(int n, double k, const Eigen::Vector2d& c, const Eigen::Vector2d& x) {
    Eigen::Vector2d r = x - c;
    double rho = r.norm(), th = std::atan2(r.y(), r.x());
    return specfun::bessel_j(n, k * rho) * std::polar(1.0, n * th);
}

}  // namespace

TEST_CASE("mode traces match finite differences of the potentials") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry geom;
    geom.center = {0.7, -0.2};
    geom.rotation = 0.4;
    geom.shape = Shape{1.0, 0.25, 3};
    BoundaryGrid g = discretize(geom, 64);
    double h = 1e-6;
    for (int n : {-3, 0, 2}) {
        for (char chan : {'p', 's'}) {
            auto [f, gd] = local_mode_trace(g, n, chan, w);
            double k = chan == 'p' ? w.kp : w.ks;
            for (int i = 0; i < g.n_pts; i += 7) {
                Eigen::Vector2d x = g.positions[i], ex(h, 0.0), ey(0.0, h);
                cplx wx = (mode_scalar(n, k, geom.center, x + ex) -
                           mode_scalar(n, k, geom.center, x - ex)) / (2.0 * h);
                cplx wy = (mode_scalar(n, k, geom.center, x + ey) -
                           mode_scalar(n, k, geom.center, x - ey)) / (2.0 * h);
                Eigen::Vector2cd u = chan == 'p' ? Eigen::Vector2cd(wx, wy)
                                                 : Eigen::Vector2cd(wy, -wx);
                cplx fw = -(g.normals[i].x() * u(0) + g.normals[i].y() * u(1));
                cplx gw = -(g.tangents[i].x() * u(0) + g.tangents[i].y() * u(1));
                CHECK(std::abs(f(i) - fw) < 1e-6);
                CHECK(std::abs(gd(i) - gw) < 1e-6);
            }
        }
    }
}

TEST_CASE("zero densities give zero multipole coefficients") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    BoundaryGrid g = discretize(ParticleGeometry{}, 32);
    BoundaryDensities dens;
    dens.alpha = Eigen::VectorXcd::Zero(32);
    dens.beta = Eigen::VectorXcd::Zero(32);
    ExpansionCoefficients c = multipole_from_densities(dens, g, w, 4);
    CHECK(c.kind == ExpansionKind::multipole);
    CHECK(c.p.norm() == 0.0);
    CHECK(c.s.norm() == 0.0);
}

TEST_CASE("numeric disk matrix agrees with the analytic one") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry disk;
    disk.shape = Shape{1.0, 0.0, 3};
    auto [S, rep] = build_scattering_matrix(disk, w, 6, 96);
    ScatteringMatrix exact = disk_scattering_matrix(6, 1.0, w);
    CHECK((S.entries - exact.entries).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(S.provenance == "bie");
    CHECK(rep.condition_estimate > 0.0);
    double worst = 0.0;
    for (double r : rep.column_residuals) worst = std::max(worst, r);
    CHECK(worst < 1e-10);
}

TEST_CASE("extracted multipoles reproduce the quadrature field") {
    WaveParameters w = compute_wavenumbers(2.0, 3.88, 2.56);
    ParticleGeometry geom;
    geom.shape = Shape{0.8, 0.2, 4};
    geom.rotation = 0.3;
    BoundaryGrid g = discretize(geom, 160);
    BoundarySystem sys = assemble_single_particle(g, w);
    IncidentField inc;
    inc.kind = IncidentField::Kind::plane;
    inc.direction = 0.7;
    auto u_inc = incident_displacement(inc, w, g.positions);
    auto [f, h] = boundary_data_from_incident(g, u_inc);
    BoundaryDensities dens = solve_densities(sys, f, h);

    int N = 20;
    SceneConfiguration cfg;
    cfg.wave = w;
    cfg.particles = {geom};
    cfg.n_term = N;
    cfg.incident = inc;
    SceneSolution sol;
    sol.outgoing = {multipole_from_densities(dens, g, w, N)};

    std::vector<Eigen::Vector2d> targets = {{3.4, 0.3}, {-2.8, 1.9}, {0.1, -3.2}, {4.0, 2.0}};
    auto direct = eval_exterior_from_densities(dens, g, w, targets);
    auto series = scattered_displacement(sol, cfg, targets);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < targets.size(); ++i) {
        num += (direct[i] - series[i]).squaredNorm();
        den += direct[i].squaredNorm();
    }
    CHECK(std::sqrt(num / den) < 1e-9);
}

TEST_CASE("zero truncation still produces the two-column matrix") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry disk;
    disk.shape = Shape{0.6, 0.0, 3};
    auto [S, rep] = build_scattering_matrix(disk, w, 0, 64);
    REQUIRE(S.entries.rows() == 2);
    ScatteringMatrix exact = disk_scattering_matrix(0, 0.6, w);
    CHECK((S.entries - exact.entries).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rebuilds are bitwise reproducible, also across thread counts") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry geom;
    geom.shape = Shape{0.7, 0.2, 5};
    auto [s1, r1] = build_scattering_matrix(geom, w, 5, 64, 1);
    auto [s2, r2] = build_scattering_matrix(geom, w, 5, 64, 1);
    auto [s3, r3] = build_scattering_matrix(geom, w, 5, 64, 3);
    CHECK((s1.entries - s2.entries).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s1.entries - s3.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary resolution changes the matrix only at roundoff scale") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry geom;
    geom.shape = Shape{1.0, 1.0 / 3.0, 3};
    auto [coarse, rc] = build_scattering_matrix(geom, w, 6, 100);
    auto [fine, rf] = build_scattering_matrix(geom, w, 6, 200);
    CHECK((coarse.entries - fine.entries).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("rotation conjugation tracks a rebuilt rotated particle") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry geom;
    geom.shape = Shape{1.0, 0.25, 3};
    auto [S0, r0] = build_scattering_matrix(geom, w, 8, 128);

    ScatteringMatrix same = rotate_scattering_matrix(S0, 0.0);
    CHECK((same.entries - S0.entries).cwiseAbs().maxCoeff() == 0.0);

    double theta = 0.9;
    ParticleGeometry rotated = geom;
    rotated.rotation = theta;
    auto [S1, r1] = build_scattering_matrix(rotated, w, 8, 128);
    ScatteringMatrix conj = rotate_scattering_matrix(S0, theta);
    CHECK((S1.entries - conj.entries).cwiseAbs().maxCoeff() < 1e-8);

    ParticleGeometry disk;
    disk.shape = Shape{0.8, 0.0, 3};
    auto [D0, q0] = build_scattering_matrix(disk, w, 6, 96);
    ScatteringMatrix Dr = rotate_scattering_matrix(D0, 1.234);
    CHECK((Dr.entries - D0.entries).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scene matrices share builds across identical shapes") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    cfg.n_term = 6;
    cfg.n_pts = 96;
    ParticleGeometry p1, p2, p3;
    p1.shape = Shape{0.5, 0.1, 3};
    p1.rotation = 0.2;
    p2 = p1;
    p2.center = {2.0, 0.0};
    p2.rotation = 1.5;
    p3.shape = Shape{0.5, 0.0, 3};
    p3.center = {0.0, 2.0};
    cfg.particles = {p1, p2, p3};

    std::vector<ScatteringMatrix> mats = build_scene_matrices(cfg);
    REQUIRE(mats.size() == 3);

    auto [d1, rr1] = build_scattering_matrix(p1, cfg.wave, 6, 96);
    CHECK((mats[0].entries - d1.entries).cwiseAbs().maxCoeff() < 1e-8);

    ScatteringMatrix hop = rotate_scattering_matrix(mats[0], p2.rotation - p1.rotation);
    CHECK((mats[1].entries - hop.entries).cwiseAbs().maxCoeff() < 1e-12);

    ScatteringMatrix exact = disk_scattering_matrix(6, 0.5, cfg.wave);
    CHECK((mats[2].entries - exact.entries).cwiseAbs().maxCoeff() < 1e-8);
}
