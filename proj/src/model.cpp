#include "escat/model.hpp"

#include <cmath>

namespace escat {

WaveParameters compute_wavenumbers(double omega, double lambda, double mu) {
    if (!(omega > 0.0)) throw ValidationError("omega must be positive");
    if (!(mu > 0.0)) throw ValidationError("mu must be positive");
    if (!(lambda + mu > 0.0)) throw ValidationError("lambda + mu must be positive");
    WaveParameters w;
    w.omega = omega;
    w.lambda = lambda;
    w.mu = mu;
    w.kp = omega / std::sqrt(lambda + 2.0 * mu);
    w.ks = omega / std::sqrt(mu);
    return w;
}

static void validate_shape(const Shape& s) {
    if (!(s.a > 0.0)) throw ValidationError("shape parameter a must be positive");
    if (!(s.b >= 0.0) || !(s.b < s.a)) throw ValidationError("shape parameter b must satisfy 0 <= b < a");
    if (s.c < 1) throw ValidationError("shape parameter c must be >= 1");
}

BoundaryGrid discretize(const ParticleGeometry& geom, int n_pts) {
    validate_shape(geom.shape);
    if (n_pts < 16 || n_pts % 2 != 0) throw ValidationError("n_pts must be even and >= 16");

    BoundaryGrid g;
    g.geom = geom;
    g.n_pts = n_pts;
    g.params.resize(n_pts);
    g.positions.resize(n_pts);
    g.d1.resize(n_pts);
    g.d2.resize(n_pts);
    g.speeds.resize(n_pts);
    g.normals.resize(n_pts);
    g.tangents.resize(n_pts);
    g.weights.resize(n_pts);

    const double a = geom.shape.a, b = geom.shape.b;
    const double c = static_cast<double>(geom.shape.c);
    Eigen::Matrix2d Q;
    Q << std::cos(geom.rotation), -std::sin(geom.rotation),
         std::sin(geom.rotation),  std::cos(geom.rotation);

    for (int i = 0; i < n_pts; ++i) {
        double t = 2.0 * PI * i / n_pts;
        g.params[i] = t;
        double rho = a + b * std::cos(c * t);
        double rho1 = -b * c * std::sin(c * t);
        double rho2 = -b * c * c * std::cos(c * t);
        Eigen::Vector2d er(std::cos(t), std::sin(t));
        Eigen::Vector2d et(-std::sin(t), std::cos(t));
        Eigen::Vector2d x = rho * er;
        Eigen::Vector2d xp = rho1 * er + rho * et;
        Eigen::Vector2d xpp = (rho2 - rho) * er + 2.0 * rho1 * et;
        g.positions[i] = Q * x + geom.center;
        g.d1[i] = Q * xp;
        g.d2[i] = Q * xpp;
        double sp = g.d1[i].norm();
        g.speeds[i] = sp;
        // counterclockwise curve: outward normal is x' rotated by -pi/2
        g.normals[i] = Eigen::Vector2d(g.d1[i](1), -g.d1[i](0)) / sp;
        g.tangents[i] = Eigen::Vector2d(-g.normals[i](1), g.normals[i](0));
        g.weights[i] = (2.0 * PI / n_pts) * sp;
    }
    return g;
}

Eigen::VectorXcd ExpansionCoefficients::flat() const {
    Eigen::VectorXcd v(2 * (2 * n_term + 1));
    v.head(2 * n_term + 1) = p;
    v.tail(2 * n_term + 1) = s;
    return v;
}

ExpansionCoefficients ExpansionCoefficients::unflatten(ExpansionKind kind, int n_term,
                                                       const Eigen::VectorXcd& v) {
    int m = 2 * n_term + 1;
    if (v.size() != 2 * m) throw ValidationError("flat coefficient vector has wrong length");
    ExpansionCoefficients e;
    e.kind = kind;
    e.n_term = n_term;
    e.p = v.head(m);
    e.s = v.tail(m);
    return e;
}

ExpansionCoefficients zero_coefficients(ExpansionKind kind, int n_term) {
    if (n_term < 0) throw ValidationError("n_term must be nonnegative");
    ExpansionCoefficients e;
    e.kind = kind;
    e.n_term = n_term;
    e.p = Eigen::VectorXcd::Zero(2 * n_term + 1);
    e.s = Eigen::VectorXcd::Zero(2 * n_term + 1);
    return e;
}

double effective_min_separation(const SceneConfiguration& cfg) {
    if (cfg.min_separation > 0.0) return cfg.min_separation;
    double rmax = 0.0;
    for (const auto& p : cfg.particles) rmax = std::max(rmax, circumradius(p.shape));
    return 0.1 * rmax;
}

void validate_scene(const SceneConfiguration& cfg) {
    if (cfg.particles.empty()) throw ValidationError("scene has no particles");
    if (cfg.n_term < 0) throw ValidationError("n_term must be nonnegative");
    if (cfg.n_pts < 16 || cfg.n_pts % 2 != 0) throw ValidationError("n_pts must be even and >= 16");
    if (!(cfg.gmres_tol > 0.0)) throw ValidationError("gmres_tol must be positive");
    if (!(cfg.wave.omega > 0.0)) throw ValidationError("omega must be positive");
    for (const auto& p : cfg.particles) validate_shape(p.shape);
    double gap = effective_min_separation(cfg);
    for (size_t i = 0; i < cfg.particles.size(); ++i) {
        for (size_t j = i + 1; j < cfg.particles.size(); ++j) {
            double dist = (cfg.particles[i].center - cfg.particles[j].center).norm();
            double need = circumradius(cfg.particles[i].shape) +
                          circumradius(cfg.particles[j].shape) + gap;
            if (dist < need) throw ValidationError("particles too close: circumscribing disks must be separated");
        }
    }
}

bool point_in_particle(const ParticleGeometry& geom, const Eigen::Vector2d& p) {
    Eigen::Vector2d d = p - geom.center;
    double r = d.norm();
    if (r >= circumradius(geom.shape)) return false;
    if (r == 0.0) return true;
    double theta = std::atan2(d(1), d(0)) - geom.rotation;
    double rho = geom.shape.a + geom.shape.b * std::cos(geom.shape.c * theta);
    return r < rho;
}

}  // namespace escat
