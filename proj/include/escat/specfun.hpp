#pragma once
#include <vector>

#include "escat/util.hpp"

namespace escat::specfun {

inline constexpr int MAX_ORDER = 200;
inline constexpr double MAX_ARGUMENT = 1.0e4;

// J_n(x); integer order, |order| <= 200, 0 <= x <= 1e4
double bessel_j(int order, double x);

// Y_n(x); x > 0; saturates to -inf once the upward recurrence overflows
double bessel_y(int order, double x);

// H^(1)_n(x) = J_n(x) + i Y_n(x); x > 0
cplx hankel1(int order, double x);

enum class Kind { J, H1 };

// f'_n(x) = (f_{n-1}(x) - f_{n+1}(x)) / 2
cplx cyl_deriv(Kind kind, int order, double x);

struct CylinderFunctionTable {
    int max_order = 0;
    double argument = 0.0;
    std::vector<double> values_J;  // J_0..J_max
    std::vector<double> values_Y;  // Y_0..Y_max
};

// one downward-recurrence pass for J plus one upward pass for Y
CylinderFunctionTable cyl_table(int max_order, double x);

}
