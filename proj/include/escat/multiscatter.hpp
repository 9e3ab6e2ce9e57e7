#pragma once
#include <functional>

#include "escat/model.hpp"

namespace escat {

// converts the multipole expansion about x_l into a local expansion about
// x_m; entries depend on i-j only, so each wavenumber block is stored as its
// Toeplitz generator g[d], d = -2N..2N
struct TranslationOperator {
    int l = 0;
    int m = 0;
    int n_term = 0;
    Eigen::VectorXcd gen_p;  // length 4N+1, slot d+2N
    Eigen::VectorXcd gen_s;

    cplx entry_p(int i, int j) const { return gen_p(i - j + 2 * n_term); }
    cplx entry_s(int i, int j) const { return gen_s(i - j + 2 * n_term); }
    Eigen::MatrixXcd dense_p() const;
    Eigen::MatrixXcd dense_s() const;

    // y += T x per channel
    void accumulate(const Eigen::Ref<const Eigen::VectorXcd>& x_p,
                    const Eigen::Ref<const Eigen::VectorXcd>& x_s,
                    Eigen::Ref<Eigen::VectorXcd> y_p,
                    Eigen::Ref<Eigen::VectorXcd> y_s) const;
};

TranslationOperator translation_operator(const Eigen::Vector2d& x_l,
                                         const Eigen::Vector2d& x_m,
                                         int n_term, const WaveParameters& wave);

// coefficients of the scalar e^{ik x.d} about `center` (Jacobi-Anger)
Eigen::VectorXcd plane_scalar_local_coefficients(double k, double direction,
                                                 const Eigen::Vector2d& center, int n_term);

// local expansion of the incident potentials about the particle center;
// plane kinds carry the potential normalizations 1/(i kp) and i/ks so the
// induced displacement matches the plane waves; a point source outside the
// particle's disk re-expands its H_0 potentials directly
ExpansionCoefficients incoming_from_incident(const IncidentField& incident,
                                             const ParticleGeometry& particle,
                                             int n_term, const WaveParameters& wave);

struct SceneOperators {
    std::vector<const ScatteringMatrix*> S;          // one per particle
    std::vector<std::vector<TranslationOperator>> T;  // T[m] over sources l != m, ascending l
    int n_term = 0;
};

SceneOperators build_scene_operators(const std::vector<Eigen::Vector2d>& centers,
                                     const std::vector<const ScatteringMatrix*>& S,
                                     int n_term, const WaveParameters& wave);

// y_m = x_m - S_m sum_{l != m} T^{ml} x_l  (outgoing balance: the scattered
// response of particle m to the fields radiated by all others)
Eigen::VectorXcd apply_preconditioned(const SceneOperators& ops, const Eigen::VectorXcd& x);

struct GmresResult {
    Eigen::VectorXcd x;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// full (non-restarted) GMRES, modified Gram-Schmidt + Givens rotations
GmresResult gmres_solve(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                        const Eigen::VectorXcd& rhs, double tol, int max_iter);

struct SceneSolution {
    std::vector<ExpansionCoefficients> outgoing;  // multipole, per particle
    int iterations = 0;
    double residual = 0.0;
};

// rhs_m = S_m . incoming_m; a point source inside particle j switches that
// particle's rhs to the boundary-data route (BIE solve on its boundary with
// the analytic source trace)
SceneSolution solve_scene(const SceneConfiguration& cfg,
                          const std::vector<const ScatteringMatrix*>& matrices,
                          int n_threads = 1);

}
