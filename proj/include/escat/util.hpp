#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

namespace escat {

using cplx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr double EULER_GAMMA = 0.577215664901532860606512090082402431;

// exit-code mapping: ValidationError -> 1, SolverError -> 2, IoError -> 3
struct ValidationError : std::runtime_error { using std::runtime_error::runtime_error; };
struct SolverError : std::runtime_error { using std::runtime_error::runtime_error; };
struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };

// deterministic uniforms on top of the fully specified 64-bit Mersenne engine;
// avoids std::uniform_real_distribution, whose output is implementation-defined
class Rng64 {
public:
    explicit Rng64(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// static partition over [0, n); results must be written by index so the
// outcome is independent of the thread count
void parallel_for(int n, int n_threads, const std::function<void(int)>& body);

}
