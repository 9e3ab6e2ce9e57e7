#include "escat/mie.hpp"

#include <cmath>

#include "escat/specfun.hpp"

namespace escat {

using specfun::Kind;
using specfun::cyl_deriv;
using specfun::bessel_j;
using specfun::hankel1;

ModeMatrix mode_matrix(int n, double R, const WaveParameters& wave) {
    if (!(R > 0.0)) throw ValidationError("disk radius must be positive");
    double xp = wave.kp * R, xs = wave.ks * R;
    cplx in_over_R = cplx(0.0, static_cast<double>(n) / R);

    Eigen::Matrix2cd A, B;
    A(0, 0) = wave.kp * cyl_deriv(Kind::H1, n, xp);
    A(0, 1) = in_over_R * hankel1(n, xs);
    A(1, 0) = in_over_R * hankel1(n, xp);
    A(1, 1) = -wave.ks * cyl_deriv(Kind::H1, n, xs);
    B(0, 0) = wave.kp * cyl_deriv(Kind::J, n, xp);
    B(0, 1) = in_over_R * bessel_j(n, xs);
    B(1, 0) = in_over_R * bessel_j(n, xp);
    B(1, 1) = -wave.ks * cyl_deriv(Kind::J, n, xs);

    ModeMatrix m;
    m.n = n;
    m.entries = -A.inverse() * B;
    return m;
}

ScatteringMatrix disk_scattering_matrix(int n_term, double R, const WaveParameters& wave) {
    if (n_term < 0) throw ValidationError("n_term must be nonnegative");
    int mcount = 2 * n_term + 1;
    ScatteringMatrix S;
    S.n_term = n_term;
    S.wave = wave;
    S.shape = Shape{R, 0.0, 1};
    S.provenance = "disk-analytic";
    S.entries = Eigen::MatrixXcd::Zero(2 * mcount, 2 * mcount);
    for (int n = -n_term; n <= n_term; ++n) {
        Eigen::Matrix2cd m = mode_matrix(n, R, wave).entries;
        int k = n + n_term;
        // drop denormal-scale residue from the high-order modes
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                if (std::abs(m(r, c)) < 1e-280) m(r, c) = 0.0;
        S.entries(k, k) = m(0, 0);
        S.entries(k, k + mcount) = m(0, 1);
        S.entries(k + mcount, k) = m(1, 0);
        S.entries(k + mcount, k + mcount) = m(1, 1);
    }
    return S;
}

}  // namespace escat
