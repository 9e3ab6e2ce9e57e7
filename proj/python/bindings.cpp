#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "escat/generate.hpp"
#include "escat/io.hpp"
#include "escat/mie.hpp"
#include "escat/smatrix.hpp"
#include "escat/specfun.hpp"
#include "escat/verify.hpp"

namespace py = pybind11;
using namespace escat;

namespace {

std::vector<const ScatteringMatrix*> as_pointers(const std::vector<ScatteringMatrix>& v) {
    std::vector<const ScatteringMatrix*> p;
    p.reserve(v.size());
    for (const auto& s : v) p.push_back(&s);
    return p;
}

Config config_with_particles(const std::string& config_json) {
    Config cfg = parse_config_text(config_json);
    if (cfg.scene.particles.empty() && cfg.generate)
        cfg.scene.particles = generate_particles(*cfg.generate, cfg.scene.seed);
    validate_scene(cfg.scene);
    return cfg;
}

std::vector<Eigen::Vector2d> rows_to_points(const Eigen::MatrixXd& pts) {
    std::vector<Eigen::Vector2d> targets(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) targets[i] = pts.row(i).transpose();
    return targets;
}

}  // namespace

PYBIND11_MODULE(escat, m) {
    m.doc() = "2D elastic multi-particle scattering (Helmholtz decomposition, "
              "boundary integral scattering matrices, translation operators)";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<IoError>(m, "IoError");

    m.def(
        "wavenumbers",
        [](double omega, double lambda, double mu) {
            WaveParameters w = compute_wavenumbers(omega, lambda, mu);
            return py::make_tuple(w.kp, w.ks);
        },
        py::arg("omega"), py::arg("lambda_"), py::arg("mu"),
        "compressional and shear wavenumbers (kp, ks)");

    m.def("bessel_j", &specfun::bessel_j, py::arg("n"), py::arg("x"));
    m.def("bessel_y", &specfun::bessel_y, py::arg("n"), py::arg("x"));
    m.def("hankel1", &specfun::hankel1, py::arg("n"), py::arg("x"));

    m.def(
        "disk_matrix",
        [](double radius, double omega, double lambda, double mu, int n_term) {
            WaveParameters w = compute_wavenumbers(omega, lambda, mu);
            return disk_scattering_matrix(n_term, radius, w).entries;
        },
        py::arg("radius"), py::arg("omega"), py::arg("lambda_"), py::arg("mu"),
        py::arg("n_term"), "mode-by-mode scattering matrix of a rigid disk");

    m.def(
        "particle_matrix",
        [](double a, double b, int c, double rotation, double omega, double lambda,
           double mu, int n_term, int n_pts, int threads) {
            ParticleGeometry geom;
            geom.rotation = rotation;
            geom.shape = Shape{a, b, c};
            WaveParameters w = compute_wavenumbers(omega, lambda, mu);
            auto [S, rep] = build_scattering_matrix(geom, w, n_term, n_pts, threads);
            return py::make_tuple(S.entries, rep.condition_estimate);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("rotation"), py::arg("omega"),
        py::arg("lambda_"), py::arg("mu"), py::arg("n_term"), py::arg("n_pts"),
        py::arg("threads") = 1,
        "scattering matrix of one boundary-discretized particle and the condition "
        "estimate of its boundary system");

    m.def(
        "solve",
        [](const std::string& config_json, int threads) {
            Config cfg = config_with_particles(config_json);
            std::vector<ScatteringMatrix> mats = build_scene_matrices(cfg.scene, threads);
            SceneSolution sol = solve_scene(cfg.scene, as_pointers(mats), threads);
            py::list coeffs;
            for (const auto& c : sol.outgoing) coeffs.append(c.flat());
            py::dict out;
            out["iterations"] = sol.iterations;
            out["residual"] = sol.residual;
            out["n_term"] = cfg.scene.n_term;
            out["coefficients"] = coeffs;
            return out;
        },
        py::arg("config_json"), py::arg("threads") = 1,
        "solve a scene described by a JSON config string; returns the outgoing "
        "multipole coefficients per particle (flat p-block then s-block)");

    m.def(
        "total_field",
        [](const std::string& config_json, const std::vector<Eigen::VectorXcd>& coefficients,
           const Eigen::MatrixXd& points, int threads) {
            (void)threads;
            Config cfg = config_with_particles(config_json);
            if (coefficients.size() != cfg.scene.particles.size())
                throw ValidationError("one coefficient vector per particle required");
            SceneSolution sol;
            for (const auto& v : coefficients)
                sol.outgoing.push_back(ExpansionCoefficients::unflatten(
                    ExpansionKind::multipole, cfg.scene.n_term, v));
            if (points.cols() != 2) throw ValidationError("points must be (n, 2)");
            auto targets = rows_to_points(points);
            auto inc = incident_displacement(cfg.scene.incident, cfg.scene.wave, targets);
            auto sca = scattered_displacement(sol, cfg.scene, targets);
            Eigen::MatrixXcd out(points.rows(), 2);
            for (Eigen::Index i = 0; i < points.rows(); ++i)
                out.row(i) = (inc[i] + sca[i]).transpose();
            return out;
        },
        py::arg("config_json"), py::arg("coefficients"), py::arg("points"),
        py::arg("threads") = 1,
        "incident + scattered displacement at exterior points, rows (u1, u2)");

    m.def(
        "generate_config",
        [](const std::string& config_json, long long seed) {
            Config cfg = parse_config_text(config_json);
            if (!cfg.generate) throw ValidationError("config has no 'generate' section");
            if (seed >= 0) cfg.scene.seed = static_cast<std::uint64_t>(seed);
            cfg.scene.particles = generate_particles(*cfg.generate, cfg.scene.seed);
            validate_scene(cfg.scene);
            return config_with_particles_json(cfg);
        },
        py::arg("config_json"), py::arg("seed") = -1,
        "place particles deterministically and return the expanded config JSON");

    m.def(
        "verify",
        [](const std::string& suite, int threads) {
            py::list out;
            for (const auto& c : run_suite(suite, threads)) {
                py::dict d;
                d["name"] = c.name;
                d["pass"] = c.pass;
                d["value"] = c.value;
                d["tol"] = c.tol;
                out.append(d);
            }
            return out;
        },
        py::arg("suite") = "smoke", py::arg("threads") = 1,
        "run a named verification suite and return its check results");
}
