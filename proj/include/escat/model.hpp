#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "escat/util.hpp"

namespace escat {

struct WaveParameters {
    double omega = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double kp = 0.0;  // omega / sqrt(lambda + 2 mu)
    double ks = 0.0;  // omega / sqrt(mu)
};

WaveParameters compute_wavenumbers(double omega, double lambda, double mu);

// radial profile rho(theta) = a + b cos(c theta), applied in the body frame,
// then rotated and shifted
struct Shape {
    double a = 1.0;
    double b = 0.0;
    int c = 3;
};

struct ParticleGeometry {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double rotation = 0.0;
    Shape shape;
};

inline double circumradius(const Shape& s) { return s.a + s.b; }

struct BoundaryGrid {
    ParticleGeometry geom;
    int n_pts = 0;
    std::vector<double> params;                  // t_i, equispaced in [0, 2pi)
    std::vector<Eigen::Vector2d> positions;      // x(t_i)
    std::vector<Eigen::Vector2d> d1;             // x'(t_i)
    std::vector<Eigen::Vector2d> d2;             // x''(t_i)
    std::vector<double> speeds;                  // |x'(t_i)|
    std::vector<Eigen::Vector2d> normals;        // outward unit
    std::vector<Eigen::Vector2d> tangents;       // (-nu2, nu1)
    std::vector<double> weights;                 // (2pi/n) |x'(t_i)|
};

// analytic parametrization derivatives; n_pts even, >= 16
BoundaryGrid discretize(const ParticleGeometry& geom, int n_pts);

enum class ExpansionKind { local, multipole };

// per-channel coefficient vectors indexed n = -N..N at slot n+N;
// flat layout is the p block followed by the s block
struct ExpansionCoefficients {
    ExpansionKind kind = ExpansionKind::local;
    int n_term = 0;
    Eigen::VectorXcd p;
    Eigen::VectorXcd s;

    Eigen::VectorXcd flat() const;
    static ExpansionCoefficients unflatten(ExpansionKind kind, int n_term,
                                           const Eigen::VectorXcd& v);
};

ExpansionCoefficients zero_coefficients(ExpansionKind kind, int n_term);

struct ScatteringMatrix {
    int n_term = 0;
    Eigen::MatrixXcd entries;  // 2(2N+1) square, flat-layout ordering
    std::string provenance;    // "disk-analytic" or "bie"
    WaveParameters wave;
    Shape shape;
};

struct IncidentField {
    enum class Kind { plane, plane_p, plane_s, point_source };
    Kind kind = Kind::plane;
    double direction = 0.0;                       // plane kinds
    Eigen::Vector2d source = Eigen::Vector2d::Zero();  // point source
};

struct SceneConfiguration {
    WaveParameters wave;
    std::vector<ParticleGeometry> particles;
    int n_term = 20;
    int n_pts = 200;
    double gmres_tol = 1e-9;
    IncidentField incident;
    double min_separation = 0.0;  // 0 -> default 10% of largest circumradius
    std::uint64_t seed = 0;
};

double effective_min_separation(const SceneConfiguration& cfg);

// circumscribing disks pairwise disjoint with gap >= min_separation
void validate_scene(const SceneConfiguration& cfg);

// r < rho(theta) in the body frame
bool point_in_particle(const ParticleGeometry& geom, const Eigen::Vector2d& p);

}
