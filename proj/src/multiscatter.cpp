#include "escat/multiscatter.hpp"

#include <cmath>

#include "escat/bie.hpp"
#include "escat/fields.hpp"
#include "escat/smatrix.hpp"
#include "escat/specfun.hpp"

namespace escat {

namespace {

// H_d for d = 0..dmax as one table pass; negative orders by (-1)^d symmetry
Eigen::VectorXcd hankel_row(int dmax, double x) {
    specfun::CylinderFunctionTable t = specfun::cyl_table(dmax, x);
    Eigen::VectorXcd h(dmax + 1);
    for (int d = 0; d <= dmax; ++d) h(d) = cplx(t.values_J[d], t.values_Y[d]);
    return h;
}

Eigen::VectorXcd translation_generator(double k, double rho, double phi, int n_term) {
    Eigen::VectorXcd h = hankel_row(2 * n_term, k * rho);
    Eigen::VectorXcd gen(4 * n_term + 1);
    for (int d = -2 * n_term; d <= 2 * n_term; ++d) {
        cplx hd = h(std::abs(d));
        if (d < 0 && (d & 1)) hd = -hd;
        gen(d + 2 * n_term) = hd * std::exp(cplx(0.0, -d * phi));
    }
    return gen;
}

}  // namespace

Eigen::MatrixXcd TranslationOperator::dense_p() const {
    int m = 2 * n_term + 1;
    Eigen::MatrixXcd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = entry_p(i - n_term, j - n_term);
    return A;
}

Eigen::MatrixXcd TranslationOperator::dense_s() const {
    int m = 2 * n_term + 1;
    Eigen::MatrixXcd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = entry_s(i - n_term, j - n_term);
    return A;
}

void TranslationOperator::accumulate(const Eigen::Ref<const Eigen::VectorXcd>& x_p,
                                     const Eigen::Ref<const Eigen::VectorXcd>& x_s,
                                     Eigen::Ref<Eigen::VectorXcd> y_p,
                                     Eigen::Ref<Eigen::VectorXcd> y_s) const {
    int m = 2 * n_term + 1;
    for (int i = 0; i < m; ++i) {
        cplx ap = 0.0, as = 0.0;
        for (int j = 0; j < m; ++j) {
            ap += gen_p(i - j + 2 * n_term) * x_p(j);
            as += gen_s(i - j + 2 * n_term) * x_s(j);
        }
        y_p(i) += ap;
        y_s(i) += as;
    }
}

TranslationOperator translation_operator(const Eigen::Vector2d& x_l,
                                         const Eigen::Vector2d& x_m,
                                         int n_term, const WaveParameters& wave) {
    if (2 * n_term > specfun::MAX_ORDER)
        throw ValidationError("n_term too large for the translation operator");
    Eigen::Vector2d d = x_l - x_m;
    double rho = d.norm();
    if (!(rho > 0.0)) throw ValidationError("translation requires distinct centers");
    double phi = std::atan2(d(1), d(0));
    TranslationOperator T;
    T.n_term = n_term;
    T.gen_p = translation_generator(wave.kp, rho, phi, n_term);
    T.gen_s = translation_generator(wave.ks, rho, phi, n_term);
    return T;
}

Eigen::VectorXcd plane_scalar_local_coefficients(double k, double direction,
                                                 const Eigen::Vector2d& center, int n_term) {
    Eigen::Vector2d d(std::cos(direction), std::sin(direction));
    cplx carrier = std::exp(cplx(0.0, k * center.dot(d)));
    Eigen::VectorXcd a(2 * n_term + 1);
    for (int n = -n_term; n <= n_term; ++n)
        a(n + n_term) = std::exp(cplx(0.0, n * (0.5 * PI - direction))) * carrier;
    return a;
}

ExpansionCoefficients incoming_from_incident(const IncidentField& incident,
                                             const ParticleGeometry& particle,
                                             int n_term, const WaveParameters& wave) {
    ExpansionCoefficients e = zero_coefficients(ExpansionKind::local, n_term);
    switch (incident.kind) {
        case IncidentField::Kind::plane:
            e.p = plane_scalar_local_coefficients(wave.kp, incident.direction, particle.center,
                                                  n_term) / cplx(0.0, wave.kp);
            e.s = plane_scalar_local_coefficients(wave.ks, incident.direction, particle.center,
                                                  n_term) * cplx(0.0, 1.0 / wave.ks);
            break;
        case IncidentField::Kind::plane_p:
            e.p = plane_scalar_local_coefficients(wave.kp, incident.direction, particle.center,
                                                  n_term) / cplx(0.0, wave.kp);
            break;
        case IncidentField::Kind::plane_s:
            e.s = plane_scalar_local_coefficients(wave.ks, incident.direction, particle.center,
                                                  n_term) * cplx(0.0, 1.0 / wave.ks);
            break;
        case IncidentField::Kind::point_source: {
            Eigen::Vector2d d = incident.source - particle.center;
            double rho = d.norm();
            if (rho <= circumradius(particle.shape))
                throw ValidationError("point source inside a circumscribing disk has no local expansion");
            double phi = std::atan2(d(1), d(0));
            Eigen::VectorXcd hp = hankel_row(n_term, wave.kp * rho);
            Eigen::VectorXcd hs = hankel_row(n_term, wave.ks * rho);
            for (int n = -n_term; n <= n_term; ++n) {
                cplx ph = std::exp(cplx(0.0, -n * phi));
                cplx vp = hp(std::abs(n)), vs = hs(std::abs(n));
                if (n < 0 && (n & 1)) { vp = -vp; vs = -vs; }
                e.p(n + n_term) = vp * ph;
                e.s(n + n_term) = vs * ph;
            }
            break;
        }
    }
    return e;
}

SceneOperators build_scene_operators(const std::vector<Eigen::Vector2d>& centers,
                                     const std::vector<const ScatteringMatrix*>& S,
                                     int n_term, const WaveParameters& wave) {
    if (centers.size() != S.size()) throw ValidationError("one scattering matrix per particle required");
    for (const auto* s : S)
        if (!s || s->n_term != n_term)
            throw ValidationError("scattering matrix truncation does not match the scene");
    SceneOperators ops;
    ops.S = S;
    ops.n_term = n_term;
    ops.T.resize(centers.size());
    for (size_t m = 0; m < centers.size(); ++m) {
        ops.T[m].reserve(centers.size() - 1);
        for (size_t l = 0; l < centers.size(); ++l) {
            if (l == m) continue;
            TranslationOperator t = translation_operator(centers[l], centers[m], n_term, wave);
            t.l = static_cast<int>(l);
            t.m = static_cast<int>(m);
            ops.T[m].push_back(std::move(t));
        }
    }
    return ops;
}

Eigen::VectorXcd apply_preconditioned(const SceneOperators& ops, const Eigen::VectorXcd& x) {
    int mcount = 2 * ops.n_term + 1;
    int blk = 2 * mcount;
    int M = static_cast<int>(ops.S.size());
    if (x.size() != static_cast<Eigen::Index>(M) * blk)
        throw ValidationError("coefficient vector length does not match the scene");
    Eigen::VectorXcd y(x.size());
    Eigen::VectorXcd acc(blk);
    for (int m = 0; m < M; ++m) {
        acc.setZero();
        for (const TranslationOperator& t : ops.T[m]) {
            int off = t.l * blk;
            t.accumulate(x.segment(off, mcount), x.segment(off + mcount, mcount),
                         acc.head(mcount), acc.tail(mcount));
        }
        y.segment(m * blk, blk) = x.segment(m * blk, blk) - ops.S[m]->entries * acc;
    }
    return y;
}

GmresResult gmres_solve(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                        const Eigen::VectorXcd& rhs, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ValidationError("gmres tolerance must be positive");
    if (max_iter < 1) throw ValidationError("gmres max_iter must be positive");
    GmresResult out;
    double beta = rhs.norm();
    if (beta == 0.0) {
        out.x = Eigen::VectorXcd::Zero(rhs.size());
        out.converged = true;
        return out;
    }
    std::vector<Eigen::VectorXcd> V;
    V.push_back(rhs / beta);
    std::vector<Eigen::VectorXcd> Hcols;  // column j holds rows 0..j+1
    std::vector<cplx> cs, g;
    std::vector<double> sn;
    g.push_back(cplx(beta, 0.0));
    double res = 1.0;
    int cols = 0;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXcd w = apply(V[j]);
        Eigen::VectorXcd h = Eigen::VectorXcd::Zero(j + 2);
        for (int i = 0; i <= j; ++i) {
            h(i) = V[i].dot(w);
            w -= h(i) * V[i];
        }
        double wn = w.norm();
        h(j + 1) = wn;
        bool breakdown = (wn == 0.0);
        if (!breakdown) V.push_back(w / wn);
        for (int i = 0; i < j; ++i) {
            cplx a = h(i), b = h(i + 1);
            h(i) = std::conj(cs[i]) * a + sn[i] * b;
            h(i + 1) = -sn[i] * a + cs[i] * b;
        }
        cplx a = h(j);
        double b = h(j + 1).real();
        double t = std::sqrt(std::norm(a) + b * b);
        cplx cj = (t == 0.0) ? cplx(1.0, 0.0) : a / t;
        double sj = (t == 0.0) ? 0.0 : b / t;
        h(j) = t;
        h(j + 1) = 0.0;
        g.push_back(-sj * g[j]);
        g[j] = std::conj(cj) * g[j];
        cs.push_back(cj);
        sn.push_back(sj);
        Hcols.push_back(h);
        cols = j + 1;
        res = std::abs(g[j + 1]) / beta;
        if (res <= tol || breakdown) break;
    }
    // back substitution on the rotated Hessenberg, then assemble from the basis
    Eigen::VectorXcd y(cols);
    for (int i = cols - 1; i >= 0; --i) {
        cplx s = g[i];
        for (int c = i + 1; c < cols; ++c) s -= Hcols[c](i) * y(c);
        y(i) = s / Hcols[i](i);
    }
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(rhs.size());
    for (int i = 0; i < cols; ++i) x += y(i) * V[i];
    out.x = x;
    out.iterations = cols;
    out.residual = res;
    out.converged = (res <= tol);
    return out;
}

SceneSolution solve_scene(const SceneConfiguration& cfg,
                          const std::vector<const ScatteringMatrix*>& matrices,
                          int n_threads) {
    validate_scene(cfg);
    size_t M = cfg.particles.size();
    if (matrices.size() != M) throw ValidationError("one scattering matrix per particle required");

    std::vector<Eigen::Vector2d> centers(M);
    for (size_t m = 0; m < M; ++m) centers[m] = cfg.particles[m].center;
    SceneOperators ops = build_scene_operators(centers, matrices, cfg.n_term, cfg.wave);

    int blk = 2 * (2 * cfg.n_term + 1);
    Eigen::VectorXcd b(static_cast<Eigen::Index>(M) * blk);
    for (size_t m = 0; m < M; ++m) {
        const ParticleGeometry& part = cfg.particles[m];
        bool engulfs_source =
            cfg.incident.kind == IncidentField::Kind::point_source &&
            (cfg.incident.source - part.center).norm() <= circumradius(part.shape);
        Eigen::Index off = static_cast<Eigen::Index>(m) * blk;
        if (engulfs_source) {
            // no convergent local expansion; get the response by solving the
            // particle's own boundary problem with the analytic source trace
            BoundaryGrid grid = discretize(part, cfg.n_pts);
            BoundarySystem sys = assemble_single_particle(grid, cfg.wave);
            std::vector<Eigen::Vector2cd> trace =
                incident_displacement(cfg.incident, cfg.wave, grid.positions);
            auto [f, g] = boundary_data_from_incident(grid, trace);
            BoundaryDensities dens = solve_densities(sys, f, g);
            b.segment(off, blk) =
                multipole_from_densities(dens, grid, cfg.wave, cfg.n_term).flat();
        } else {
            ExpansionCoefficients in =
                incoming_from_incident(cfg.incident, part, cfg.n_term, cfg.wave);
            b.segment(off, blk) = matrices[m]->entries * in.flat();
        }
    }

    (void)n_threads;
    auto apply = [&ops](const Eigen::VectorXcd& x) { return apply_preconditioned(ops, x); };
    GmresResult gm = gmres_solve(apply, b, cfg.gmres_tol, 3000);
    if (!gm.converged)
        throw SolverError("scene iteration did not reach the requested tolerance");

    SceneSolution sol;
    sol.iterations = gm.iterations;
    sol.residual = gm.residual;
    sol.outgoing.reserve(M);
    for (size_t m = 0; m < M; ++m)
        sol.outgoing.push_back(ExpansionCoefficients::unflatten(
            ExpansionKind::multipole, cfg.n_term,
            gm.x.segment(static_cast<Eigen::Index>(m) * blk, blk)));
    return sol;
}

}  // namespace escat
