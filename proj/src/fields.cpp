#include "escat/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "escat/bie.hpp"
#include "escat/smatrix.hpp"
#include "escat/specfun.hpp"

namespace escat {

namespace {

Eigen::Vector2cd plane_term(double k, const Eigen::Vector2d& dir, const Eigen::Vector2d& x,
                            bool shear) {
    cplx ph = std::exp(cplx(0.0, k * x.dot(dir)));
    Eigen::Vector2d pol = shear ? Eigen::Vector2d(-dir(1), dir(0)) : dir;
    return pol.cast<cplx>() * ph;
}

Eigen::Vector2cd point_source_term(const WaveParameters& wave, const Eigen::Vector2d& source,
                                   const Eigen::Vector2d& x) {
    Eigen::Vector2d d = x - source;
    double r = d.norm();
    if (!(r > 0.0)) throw ValidationError("field target coincides with the point source");
    cplx gp = -wave.kp * specfun::hankel1(1, wave.kp * r) / r;
    cplx gs = -wave.ks * specfun::hankel1(1, wave.ks * r) / r;
    // grad of the compressional potential plus curl of the shear potential
    return Eigen::Vector2cd(gp * d(0) + gs * d(1), gp * d(1) - gs * d(0));
}

// displacement of the outgoing expansion (gradient of the p block, curl of
// the s block) at one exterior point
Eigen::Vector2cd expansion_field(const ExpansionCoefficients& c, const Eigen::Vector2d& center,
                                 const WaveParameters& wave, const Eigen::Vector2d& x) {
    Eigen::Vector2d d = x - center;
    double r = d.norm();
    double theta = std::atan2(d(1), d(0));
    int N = c.n_term;

    specfun::CylinderFunctionTable tp = specfun::cyl_table(N + 1, wave.kp * r);
    specfun::CylinderFunctionTable ts = specfun::cyl_table(N + 1, wave.ks * r);
    Eigen::Vector2cd er(std::cos(theta), std::sin(theta));
    Eigen::Vector2cd et(-std::sin(theta), std::cos(theta));

    Eigen::Vector2cd u = Eigen::Vector2cd::Zero();
    for (int n = -N; n <= N; ++n) {
        int a = std::abs(n);
        double sgn = (n < 0 && (a & 1)) ? -1.0 : 1.0;
        cplx hp(tp.values_J[a], tp.values_Y[a]);
        cplx hs(ts.values_J[a], ts.values_Y[a]);
        cplx hp1(tp.values_J[a + 1], tp.values_Y[a + 1]);
        cplx hs1(ts.values_J[a + 1], ts.values_Y[a + 1]);
        // C'_n = C_{n-1} - (n/x) C_n, with C_{a+1} giving C_{a-1} via the
        // recurrence; reflection handles n < 0
        cplx dhp = sgn * (a / (wave.kp * r) * hp - hp1);
        cplx dhs = sgn * (a / (wave.ks * r) * hs - hs1);
        hp *= sgn;
        hs *= sgn;
        cplx ph = std::exp(cplx(0.0, n * theta));
        cplx cp = c.p(n + N), cs = c.s(n + N);
        Eigen::Vector2cd gp = wave.kp * dhp * ph * er + cplx(0.0, n) * hp * ph / r * et;
        Eigen::Vector2cd gs = wave.ks * dhs * ph * er + cplx(0.0, n) * hs * ph / r * et;
        u += cp * gp + cs * Eigen::Vector2cd(gs(1), -gs(0));
    }
    return u;
}

// total scattered field; owner-annulus targets go through a per-particle
// boundary solve, everything else sums the outgoing expansions directly
std::vector<Eigen::Vector2cd> scattered_core(const SceneSolution& solution,
                                             const SceneConfiguration& cfg,
                                             const std::vector<Eigen::Vector2d>& targets,
                                             double clearance_factor, int n_threads) {
    size_t M = cfg.particles.size();
    if (solution.outgoing.size() != M)
        throw ValidationError("solution does not match the scene");

    std::vector<int> owner(targets.size(), -1);
    for (size_t t = 0; t < targets.size(); ++t) {
        for (size_t m = 0; m < M; ++m) {
            const ParticleGeometry& g = cfg.particles[m];
            if ((targets[t] - g.center).norm() < circumradius(g.shape)) {
                if (point_in_particle(g, targets[t]))
                    throw ValidationError("field target inside a particle");
                owner[t] = static_cast<int>(m);
                break;
            }
        }
    }

    std::vector<Eigen::Vector2cd> own(targets.size(), Eigen::Vector2cd::Zero());
    for (size_t m = 0; m < M; ++m) {
        std::vector<size_t> mine;
        for (size_t t = 0; t < targets.size(); ++t)
            if (owner[t] == static_cast<int>(m)) mine.push_back(t);
        if (mine.empty()) continue;

        BoundaryGrid grid = discretize(cfg.particles[m], cfg.n_pts);
        BoundarySystem sys = assemble_single_particle(grid, cfg.wave);
        std::vector<Eigen::Vector2cd> trace =
            incident_displacement(cfg.incident, cfg.wave, grid.positions);
        for (int i = 0; i < grid.n_pts; ++i)
            for (size_t l = 0; l < M; ++l)
                if (l != m)
                    trace[i] += expansion_field(solution.outgoing[l], cfg.particles[l].center,
                                                cfg.wave, grid.positions[i]);
        auto [f, g] = boundary_data_from_incident(grid, trace);
        BoundaryDensities dens = solve_densities(sys, f, g);
        std::vector<Eigen::Vector2d> pts(mine.size());
        for (size_t i = 0; i < mine.size(); ++i) pts[i] = targets[mine[i]];
        std::vector<Eigen::Vector2cd> vals =
            eval_exterior_from_densities(dens, grid, cfg.wave, pts, clearance_factor);
        for (size_t i = 0; i < mine.size(); ++i) own[mine[i]] = vals[i];
    }

    std::vector<Eigen::Vector2cd> out(targets.size());
    parallel_for(static_cast<int>(targets.size()), n_threads, [&](int t) {
        Eigen::Vector2cd u = own[t];
        for (size_t l = 0; l < M; ++l) {
            if (owner[t] == static_cast<int>(l)) continue;
            u += expansion_field(solution.outgoing[l], cfg.particles[l].center, cfg.wave,
                                 targets[t]);
        }
        out[t] = u;
    });
    return out;
}

}  // namespace

std::vector<Eigen::Vector2cd> incident_displacement(const IncidentField& incident,
                                                    const WaveParameters& wave,
                                                    const std::vector<Eigen::Vector2d>& targets) {
    std::vector<Eigen::Vector2cd> out(targets.size());
    Eigen::Vector2d dir(std::cos(incident.direction), std::sin(incident.direction));
    for (size_t t = 0; t < targets.size(); ++t) {
        switch (incident.kind) {
            case IncidentField::Kind::plane:
                out[t] = plane_term(wave.kp, dir, targets[t], false) +
                         plane_term(wave.ks, dir, targets[t], true);
                break;
            case IncidentField::Kind::plane_p:
                out[t] = plane_term(wave.kp, dir, targets[t], false);
                break;
            case IncidentField::Kind::plane_s:
                out[t] = plane_term(wave.ks, dir, targets[t], true);
                break;
            case IncidentField::Kind::point_source:
                out[t] = point_source_term(wave, incident.source, targets[t]);
                break;
        }
    }
    return out;
}

std::vector<Eigen::Vector2cd> scattered_displacement(const SceneSolution& solution,
                                                     const SceneConfiguration& cfg,
                                                     const std::vector<Eigen::Vector2d>& targets) {
    return scattered_core(solution, cfg, targets, 5.0, 1);
}

double relative_l2_error(const std::vector<Eigen::Vector2cd>& computed,
                         const std::vector<Eigen::Vector2cd>& reference) {
    if (computed.size() != reference.size())
        throw ValidationError("sample vectors must have equal length");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < computed.size(); ++i) {
        num += (computed[i] - reference[i]).squaredNorm();
        den += reference[i].squaredNorm();
    }
    if (den == 0.0)
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

FieldGrid evaluate_grid(const SceneConfiguration& cfg, const SceneSolution& solution,
                        const FieldGridSpec& spec, int n_threads) {
    if (spec.nx < 1 || spec.ny < 1) throw ValidationError("grid needs nx, ny >= 1");
    if (!(spec.xmax >= spec.xmin) || !(spec.ymax >= spec.ymin))
        throw ValidationError("grid bounds are reversed");

    FieldGrid grid;
    grid.spec = spec;
    grid.points.resize(static_cast<size_t>(spec.nx) * spec.ny);
    double dx = spec.nx > 1 ? (spec.xmax - spec.xmin) / (spec.nx - 1) : 0.0;
    double dy = spec.ny > 1 ? (spec.ymax - spec.ymin) / (spec.ny - 1) : 0.0;
    for (int iy = 0; iy < spec.ny; ++iy)
        for (int ix = 0; ix < spec.nx; ++ix)
            grid.points[static_cast<size_t>(iy) * spec.nx + ix] =
                Eigen::Vector2d(spec.xmin + ix * dx, spec.ymin + iy * dy);

    std::vector<BoundaryGrid> bounds;
    bounds.reserve(cfg.particles.size());
    for (const auto& p : cfg.particles) bounds.push_back(discretize(p, cfg.n_pts));

    grid.mask.assign(grid.points.size(), 0);
    parallel_for(static_cast<int>(grid.points.size()), n_threads, [&](int t) {
        const Eigen::Vector2d& x = grid.points[t];
        for (const BoundaryGrid& b : bounds) {
            if (point_in_particle(b.geom, x)) {
                grid.mask[t] = 1;
                return;
            }
            double keep = spec.clearance_factor * node_spacing(b);
            if ((x - b.geom.center).norm() > circumradius(b.geom.shape) + keep) continue;
            for (const Eigen::Vector2d& y : b.positions) {
                if ((x - y).norm() < keep) {
                    grid.mask[t] = 1;
                    return;
                }
            }
        }
    });

    std::vector<Eigen::Vector2d> live;
    std::vector<size_t> where;
    for (size_t t = 0; t < grid.points.size(); ++t)
        if (!grid.mask[t]) {
            live.push_back(grid.points[t]);
            where.push_back(t);
        }

    grid.values.assign(grid.points.size(), Eigen::Vector2cd::Zero());
    std::vector<Eigen::Vector2cd> scat =
        scattered_core(solution, cfg, live, spec.clearance_factor, n_threads);
    std::vector<Eigen::Vector2cd> inc = incident_displacement(cfg.incident, cfg.wave, live);
    for (size_t i = 0; i < live.size(); ++i) grid.values[where[i]] = inc[i] + scat[i];
    return grid;
}

std::vector<Eigen::Vector2d> sample_ring(const SceneConfiguration& cfg, int count,
                                         std::uint64_t seed, double margin, double width) {
    if (count < 1) throw ValidationError("sample count must be positive");
    if (cfg.particles.empty()) throw ValidationError("scene has no particles");
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : cfg.particles) centroid += p.center;
    centroid /= static_cast<double>(cfg.particles.size());
    double rin = 0.0;
    for (const auto& p : cfg.particles)
        rin = std::max(rin, (p.center - centroid).norm() + circumradius(p.shape));
    rin += margin;

    Rng64 rng(seed);
    std::vector<Eigen::Vector2d> pts(count);
    for (int i = 0; i < count; ++i) {
        double r = rin + width * rng.uniform();
        double th = 2.0 * PI * rng.uniform();
        pts[i] = centroid + r * Eigen::Vector2d(std::cos(th), std::sin(th));
    }
    return pts;
}

}  // namespace escat
