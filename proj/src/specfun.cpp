#include "escat/specfun.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace escat::specfun {

namespace {

constexpr double RESCALE = 1e250;
constexpr double INV_RESCALE = 1e-250;

void check_order(int order) {
    if (std::abs(order) > MAX_ORDER)
        throw std::domain_error("cylinder function order out of supported range");
}

void check_arg(double x, bool strictly_positive) {
    if (std::isnan(x) || x < 0.0 || x > MAX_ARGUMENT)
        throw std::domain_error("cylinder function argument out of supported range");
    if (strictly_positive && x == 0.0)
        throw std::domain_error("cylinder function argument must be positive");
}

// downward recurrence with normalization J_0 + 2 sum J_{2k} = 1;
// fills J[0..nmax], nmax >= 0, x > 0
void fill_j(int nmax, double x, double* J) {
    for (int i = 0; i <= nmax; ++i) J[i] = 0.0;
    int base = std::max(nmax, static_cast<int>(std::ceil(x)));
    int start = base + 15 + static_cast<int>(7.0 * std::sqrt(static_cast<double>(base + 1)));
    double fp = 0.0, f = 1e-30, sum = 0.0;
    for (int m = start; m >= 1; --m) {
        double fm = (2.0 * m / x) * f - fp;
        fp = f;
        f = fm;
        if (std::abs(f) > RESCALE) {
            f *= INV_RESCALE;
            fp *= INV_RESCALE;
            sum *= INV_RESCALE;
            for (int i = m; i <= nmax; ++i) J[i] *= INV_RESCALE;
        }
        int idx = m - 1;
        if (idx <= nmax) J[idx] = f;
        if (idx > 0 && (idx & 1) == 0) sum += 2.0 * f;
    }
    sum += f;  // the order-zero term
    double norm = 1.0 / sum;
    for (int i = 0; i <= nmax; ++i) J[i] *= norm;
}

// power series for Y_0, Y_1, accurate for x < 2
void y01_series(double x, double j0, double j1, double& y0, double& y1) {
    double t = 0.25 * x * x;
    double lg = std::log(0.5 * x) + EULER_GAMMA;
    double s0 = 0.0, hk = 0.0, term = 1.0;
    for (int k = 1; k < 40; ++k) {
        hk += 1.0 / k;
        term *= -t / (static_cast<double>(k) * k);
        double add = -term * hk;  // (-1)^{k+1} H_k t^k / (k!)^2
        s0 += add;
        if (std::abs(add) < 1e-18 * (std::abs(s0) + 1e-30)) break;
    }
    y0 = (2.0 / PI) * (lg * j0 + s0);
    double s1 = 1.0;  // k = 0: (H_0 + H_1) t^0 / (0! 1!) = 1
    double hk1 = 1.0;
    hk = 0.0;
    term = 1.0;
    for (int k = 1; k < 40; ++k) {
        hk += 1.0 / k;
        hk1 += 1.0 / (k + 1);
        term *= -t / (static_cast<double>(k) * (k + 1));
        double add = term * (hk + hk1);
        s1 += add;
        if (std::abs(add) < 1e-18 * (std::abs(s1) + 1e-30)) break;
    }
    y1 = (2.0 / PI) * (lg * j1 - 1.0 / x - 0.25 * x * s1);
}

// Steed continued fraction for the ratio functions of order zero at x >= 2;
// J0, J1 supply the logarithmic-derivative seed
void y01_steed(double x, double j0, double j1, double& y0, double& y1) {
    constexpr double EPS = 1e-16;
    constexpr double FPMIN = 1e-300;
    double f = -j1 / j0;
    double a = 0.25;
    double p = -0.5 / x, q = 1.0;
    double br = 2.0 * x, bi = 2.0;
    double fact = a / (x * (p * p + q * q));
    double cr = br + q * fact;
    double ci = bi + p * fact;
    double den = br * br + bi * bi;
    double dr = br / den, di = -bi / den;
    double dlr = cr * dr - ci * di, dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for (int i = 2; i <= 100000; ++i) {
        a += 2 * (i - 1);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if (std::abs(dr) + std::abs(di) < FPMIN) dr = FPMIN;
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if (std::abs(cr) + std::abs(ci) < FPMIN) cr = FPMIN;
        den = dr * dr + di * di;
        dr = dr / den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (std::abs(dlr - 1.0) + std::abs(dli) < EPS) break;
    }
    double w = 2.0 / (PI * x);
    double gam = (p - f) / q;
    double rjmu = std::sqrt(w / ((p - f) * gam + q));
    rjmu = std::copysign(rjmu, j0);
    y0 = gam * rjmu;
    double y0p = y0 * (p + q / gam);
    y1 = -y0p;
}

// fills Y[0..nmax] by upward recurrence; saturates to -inf on overflow
void fill_y(int nmax, double x, double j0, double j1, double* Y) {
    double y0, y1;
    if (x < 2.0)
        y01_series(x, j0, j1, y0, y1);
    else
        y01_steed(x, j0, j1, y0, y1);
    Y[0] = y0;
    if (nmax >= 1) Y[1] = y1;
    for (int n = 1; n < nmax; ++n) {
        double next = (2.0 * n / x) * Y[n] - Y[n - 1];
        if (!std::isfinite(next)) {
            for (int i = n + 1; i <= nmax; ++i) Y[i] = -std::numeric_limits<double>::infinity();
            return;
        }
        Y[n + 1] = next;
    }
}

constexpr int BUF = MAX_ORDER + 2;

}  // namespace

double bessel_j(int order, double x) {
    check_order(order);
    check_arg(x, false);
    int n = std::abs(order);
    double sign = (order < 0 && (n & 1)) ? -1.0 : 1.0;
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    double J[BUF];
    fill_j(n, x, J);
    return sign * J[n];
}

double bessel_y(int order, double x) {
    check_order(order);
    check_arg(x, true);
    int n = std::abs(order);
    double sign = (order < 0 && (n & 1)) ? -1.0 : 1.0;
    double J[BUF], Y[BUF];
    fill_j(std::max(n, 1), x, J);
    fill_y(n, x, J[0], J[1], Y);
    return sign * Y[n];
}

cplx hankel1(int order, double x) {
    check_order(order);
    check_arg(x, true);
    int n = std::abs(order);
    double sign = (order < 0 && (n & 1)) ? -1.0 : 1.0;
    double J[BUF], Y[BUF];
    fill_j(std::max(n, 1), x, J);
    fill_y(n, x, J[0], J[1], Y);
    return sign * cplx(J[n], Y[n]);
}

cplx cyl_deriv(Kind kind, int order, double x) {
    check_order(order);
    check_arg(x, kind == Kind::H1);
    int n = std::abs(order);
    // f'_{-n} = (-1)^n f'_n, same reflection as the functions themselves
    double sign = (order < 0 && (n & 1)) ? -1.0 : 1.0;
    if (kind == Kind::J && x == 0.0) {
        if (n == 0) return 0.0;
        if (n == 1) return 0.5;
        return 0.0;
    }
    double J[BUF], Y[BUF];
    fill_j(n + 1, x, J);
    double jm = (n == 0) ? -J[1] : 0.5 * (J[n - 1] - J[n + 1]);
    if (kind == Kind::J) return sign * cplx(jm, 0.0);
    fill_y(n + 1, x, J[0], J[1], Y);
    double ym = (n == 0) ? -Y[1] : 0.5 * (Y[n - 1] - Y[n + 1]);
    return sign * cplx(jm, ym);
}

CylinderFunctionTable cyl_table(int max_order, double x) {
    if (max_order < 0) throw std::domain_error("table order must be nonnegative");
    check_order(max_order);
    check_arg(x, true);
    CylinderFunctionTable t;
    t.max_order = max_order;
    t.argument = x;
    t.values_J.resize(max_order + 1);
    t.values_Y.resize(max_order + 1);
    double J[BUF], Y[BUF];
    fill_j(std::max(max_order, 1), x, J);
    fill_y(max_order, x, J[0], J[1], Y);
    for (int i = 0; i <= max_order; ++i) {
        t.values_J[i] = J[i];
        t.values_Y[i] = Y[i];
    }
    return t;
}

}  // namespace escat::specfun
