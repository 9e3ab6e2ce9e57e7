#include <cmath>
#include <doctest.h>

#include "escat/fields.hpp"
#include "escat/mie.hpp"
#include "escat/smatrix.hpp"
#include "escat/specfun.hpp"

using namespace escat;

namespace {

Eigen::Vector2cd one_point(const IncidentField& inc, const WaveParameters& w,
                           const Eigen::Vector2d& x) {
    return incident_displacement(inc, w, {x})[0];
}

}  // namespace

TEST_CASE("plane kinds combine and match the closed forms") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    IncidentField pp, ps, both;
    pp.kind = IncidentField::Kind::plane_p;
    ps.kind = IncidentField::Kind::plane_s;
    both.kind = IncidentField::Kind::plane;
    pp.direction = ps.direction = both.direction = 0.7;
    Eigen::Vector2d d(std::cos(0.7), std::sin(0.7)), dp(-d.y(), d.x());

    for (int q = 0; q < 4; ++q) {
        Eigen::Vector2d x(0.8 * q - 1.0, 0.5 * q);
        Eigen::Vector2cd up = one_point(pp, w, x);
        Eigen::Vector2cd us = one_point(ps, w, x);
        Eigen::Vector2cd ub = one_point(both, w, x);
        cplx ep = std::exp(cplx(0.0, w.kp * x.dot(d)));
        cplx es = std::exp(cplx(0.0, w.ks * x.dot(d)));
        CHECK((up - (d.cast<cplx>() * ep).eval()).norm() < 1e-14);
        CHECK((us - (dp.cast<cplx>() * es).eval()).norm() < 1e-14);
        CHECK((ub - (up + us).eval()).norm() < 1e-14);
    }
}

TEST_CASE("plane parts are curl-free and divergence-free respectively") {
    WaveParameters w = compute_wavenumbers(2.0, 3.88, 2.56);
    IncidentField pp, ps;
    pp.kind = IncidentField::Kind::plane_p;
    ps.kind = IncidentField::Kind::plane_s;
    pp.direction = ps.direction = 1.1;
    double h = 1e-6;
    Eigen::Vector2d x(0.35, -0.8), ex(h, 0.0), ey(0.0, h);
    auto curl = [&](const IncidentField& f) {
        cplx dxu2 = (one_point(f, w, x + ex)(1) - one_point(f, w, x - ex)(1)) / (2 * h);
        cplx dyu1 = (one_point(f, w, x + ey)(0) - one_point(f, w, x - ey)(0)) / (2 * h);
        return std::abs(dxu2 - dyu1);
    };
    auto divg = [&](const IncidentField& f) {
        cplx dxu1 = (one_point(f, w, x + ex)(0) - one_point(f, w, x - ex)(0)) / (2 * h);
        cplx dyu2 = (one_point(f, w, x + ey)(1) - one_point(f, w, x - ey)(1)) / (2 * h);
        return std::abs(dxu1 + dyu2);
    };
    CHECK(curl(pp) < 1e-6);
    CHECK(divg(ps) < 1e-6);
    CHECK(curl(ps) > 1e-2);
    CHECK(divg(pp) > 1e-2);
}

TEST_CASE("point-source displacement is the derivative of its potentials") {
    WaveParameters w = compute_wavenumbers(PI, 3.88, 2.56);
    IncidentField src;
    src.kind = IncidentField::Kind::point_source;
    src.source = {0.5, -0.3};
    auto pot = [&](double k, const Eigen::Vector2d& x) {
        return specfun::hankel1(0, k * (x - src.source).norm());
    };
    double h = 1e-6;
    for (int q = 0; q < 4; ++q) {
        Eigen::Vector2d x = src.source + (1.2 + 0.7 * q) * Eigen::Vector2d(std::cos(0.9 * q),
                                                                           std::sin(0.9 * q));
        Eigen::Vector2d ex(h, 0.0), ey(0.0, h);
        cplx dpx = (pot(w.kp, x + ex) - pot(w.kp, x - ex)) / (2 * h);
        cplx dpy = (pot(w.kp, x + ey) - pot(w.kp, x - ey)) / (2 * h);
        cplx dsx = (pot(w.ks, x + ex) - pot(w.ks, x - ex)) / (2 * h);
        cplx dsy = (pot(w.ks, x + ey) - pot(w.ks, x - ey)) / (2 * h);
        Eigen::Vector2cd want(dpx + dsy, dpy - dsx);
        CHECK((one_point(src, w, x) - want).norm() < 1e-7);
    }
    CHECK_THROWS_AS(one_point(src, w, src.source), ValidationError);
}

TEST_CASE("error metric handles the boundary cases") {
    using V = std::vector<Eigen::Vector2cd>;
    Eigen::Vector2cd a(cplx(1, 2), cplx(-1, 0));
    V ref = {a, 2.0 * a};
    CHECK(relative_l2_error(ref, ref) == 0.0);
    V twice = {2.0 * a, 4.0 * a};
    CHECK(relative_l2_error(twice, ref) == doctest::Approx(1.0).epsilon(1e-14));
    V zero = {Eigen::Vector2cd::Zero(), Eigen::Vector2cd::Zero()};
    CHECK(relative_l2_error(zero, zero) == 0.0);
    CHECK(std::isinf(relative_l2_error(ref, zero)));
}

TEST_CASE("zero outgoing coefficients scatter nothing") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    cfg.n_term = 5;
    ParticleGeometry p;
    p.shape = Shape{0.5, 0.0, 3};
    cfg.particles = {p};
    SceneSolution sol;
    sol.outgoing = {zero_coefficients(ExpansionKind::multipole, 5)};
    auto u = scattered_displacement(sol, cfg, {{2.0, 1.0}, {-1.5, 0.2}});
    CHECK(u[0].norm() == 0.0);
    CHECK(u[1].norm() == 0.0);
}

TEST_CASE("engulfed point source is cancelled, including in the annulus") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    cfg.n_term = 20;
    cfg.n_pts = 200;
    ParticleGeometry p;
    p.shape = Shape{1.0, 1.0 / 3.0, 3};
    p.rotation = 0.3;
    cfg.particles = {p};
    cfg.incident.kind = IncidentField::Kind::point_source;
    cfg.incident.source = p.center;

    std::vector<ScatteringMatrix> mats = build_scene_matrices(cfg);
    SceneSolution sol = solve_scene(cfg, {&mats[0]});

    double ang = PI / 3.0 + 0.3;  // narrow lobe of the body, inside the circumdisk
    std::vector<Eigen::Vector2d> targets = {
        {std::cos(ang), std::sin(ang)},
        {4.0, 0.5},
        {-3.0, 2.0},
    };
    auto scat = scattered_displacement(sol, cfg, targets);
    auto inc = incident_displacement(cfg.incident, cfg.wave, targets);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < targets.size(); ++i) {
        num += (scat[i] + inc[i]).squaredNorm();
        den += inc[i].squaredNorm();
    }
    CHECK(std::sqrt(num / den) < 1e-6);

    CHECK_THROWS_AS(scattered_displacement(sol, cfg, {{0.1, 0.1}}), ValidationError);
}

TEST_CASE("scattered field decays like an outgoing cylindrical wave") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    cfg.n_term = 10;
    cfg.n_pts = 100;
    ParticleGeometry p;
    p.shape = Shape{1.0, 0.0, 3};
    cfg.particles = {p};
    cfg.incident.kind = IncidentField::Kind::plane;
    cfg.incident.direction = 0.0;
    ScatteringMatrix S = disk_scattering_matrix(10, 1.0, cfg.wave);
    SceneSolution sol = solve_scene(cfg, {&S});
    Eigen::Vector2d dir(std::cos(0.4), std::sin(0.4));
    auto u = scattered_displacement(sol, cfg, {60.0 * dir, 120.0 * dir});
    double ratio = u[1].norm() / u[0].norm();
    CHECK(ratio > 0.55);
    CHECK(ratio < 0.85);
}

TEST_CASE("field grid composes incident and scattered parts") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    cfg.n_term = 8;
    cfg.n_pts = 64;
    ParticleGeometry p;
    p.shape = Shape{0.5, 0.0, 3};
    cfg.particles = {p};
    cfg.incident.kind = IncidentField::Kind::plane;
    cfg.incident.direction = 0.2;
    ScatteringMatrix S = disk_scattering_matrix(8, 0.5, cfg.wave);
    SceneSolution sol = solve_scene(cfg, {&S});

    FieldGridSpec spec;
    spec.xmin = 2.0;
    spec.xmax = 3.0;
    spec.ymin = -0.5;
    spec.ymax = 0.5;
    spec.nx = 3;
    spec.ny = 2;
    FieldGrid grid = evaluate_grid(cfg, sol, spec);
    REQUIRE(grid.points.size() == 6);
    CHECK(grid.points[1].x() == doctest::Approx(2.5));
    CHECK(grid.points[1].y() == doctest::Approx(-0.5));
    CHECK(grid.points[3].x() == doctest::Approx(2.0));
    CHECK(grid.points[3].y() == doctest::Approx(0.5));
    for (size_t t = 0; t < grid.points.size(); ++t) {
        CHECK(grid.mask[t] == 0);
        Eigen::Vector2cd want =
            incident_displacement(cfg.incident, cfg.wave, {grid.points[t]})[0] +
            scattered_displacement(sol, cfg, {grid.points[t]})[0];
        CHECK((grid.values[t] - want).norm() < 1e-13);
    }
}

TEST_CASE("grid masking covers bodies and the near-boundary band") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    cfg.n_term = 5;
    cfg.n_pts = 100;
    ParticleGeometry p;
    p.shape = Shape{1.0, 0.0, 3};
    cfg.particles = {p};
    SceneSolution sol;
    sol.outgoing = {zero_coefficients(ExpansionKind::multipole, 5)};

    FieldGridSpec inside;
    inside.xmin = -0.3;
    inside.xmax = 0.3;
    inside.ymin = -0.3;
    inside.ymax = 0.3;
    FieldGrid gi = evaluate_grid(cfg, sol, inside);
    for (size_t t = 0; t < gi.points.size(); ++t) {
        CHECK(gi.mask[t] == 1);
        CHECK(gi.values[t].norm() == 0.0);
    }

    FieldGridSpec band;
    band.xmin = 1.05;
    band.xmax = 1.1;
    band.ymin = 0.0;
    band.ymax = 0.05;
    FieldGrid gb = evaluate_grid(cfg, sol, band);
    for (size_t t = 0; t < gb.points.size(); ++t) CHECK(gb.mask[t] == 1);

    FieldGridSpec far;
    far.xmin = 3.0;
    far.xmax = 3.5;
    far.ymin = 0.0;
    far.ymax = 0.5;
    FieldGrid gf = evaluate_grid(cfg, sol, far);
    for (size_t t = 0; t < gf.points.size(); ++t) CHECK(gf.mask[t] == 0);
}

TEST_CASE("ring samples are deterministic and enclose the scene") {
    SceneConfiguration cfg;
    cfg.wave = compute_wavenumbers(PI, 3.88, 2.56);
    ParticleGeometry p1, p2;
    p1.shape = Shape{1.0, 0.0, 3};
    p2.shape = Shape{0.5, 0.0, 3};
    p2.center = {4.0, 1.0};
    cfg.particles = {p1, p2};

    auto a = sample_ring(cfg, 20, 77);
    auto b = sample_ring(cfg, 20, 77);
    auto c = sample_ring(cfg, 20, 78);
    REQUIRE(a.size() == 20);
    bool identical = true, differs = false;
    for (int i = 0; i < 20; ++i) {
        identical = identical && a[i] == b[i];
        differs = differs || a[i] != c[i];
    }
    CHECK(identical);
    CHECK(differs);

    Eigen::Vector2d centroid = 0.5 * (p1.center + p2.center);
    double rin = std::max((p1.center - centroid).norm() + 1.0,
                          (p2.center - centroid).norm() + 0.5) + 1.0;
    for (const auto& x : a) {
        double r = (x - centroid).norm();
        CHECK(r >= rin - 1e-12);
        CHECK(r <= rin + 5.0 + 1e-12);
    }
}
