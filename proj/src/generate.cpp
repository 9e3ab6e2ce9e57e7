#include "escat/generate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace escat {

std::vector<ParticleGeometry> generate_particles(const GenerateSpec& spec, std::uint64_t seed) {
    if (spec.count < 1) throw ValidationError("generate count must be >= 1");
    if (spec.shapes.empty()) throw ValidationError("generate needs at least one shape");
    if (spec.sweeps < 0) throw ValidationError("generate sweeps must be nonnegative");
    double W = spec.box[2] - spec.box[0];
    double H = spec.box[3] - spec.box[1];
    if (!(W > 0.0) || !(H > 0.0)) throw ValidationError("generate box must have positive extent");

    double R = 0.0;
    for (const Shape& s : spec.shapes) R = std::max(R, circumradius(s));
    double gap = spec.min_separation >= 0.0 ? spec.min_separation : 0.1 * R;
    double cell = 2.0 * R + gap;  // minimal center-to-center distance

    // centers live in the box inset by the circumradius
    double ux0 = spec.box[0] + R, ux1 = spec.box[2] - R;
    double uy0 = spec.box[1] + R, uy1 = spec.box[3] - R;
    double uw = ux1 - ux0, uh = uy1 - uy0;
    int cap_x = (uw >= 0.0) ? static_cast<int>(std::floor(uw / cell)) + 1 : 0;
    int cap_y = (uh >= 0.0) ? static_cast<int>(std::floor(uh / cell)) + 1 : 0;
    long long capacity = static_cast<long long>(cap_x) * cap_y;
    if (capacity < spec.count)
        throw ValidationError(
            "cannot place " + std::to_string(spec.count) + " disks of radius " +
            std::to_string(R) + " with separation " + std::to_string(gap) + " in a " +
            std::to_string(W) + " x " + std::to_string(H) + " box (grid capacity " +
            std::to_string(capacity) + ")");

    // regular-grid start, spread across the usable rectangle
    long long want = static_cast<long long>(
        std::ceil(std::sqrt(spec.count * (uw > 0 && uh > 0 ? uw / uh : 1.0))));
    int ncols = static_cast<int>(std::clamp<long long>(want, 1, cap_x));
    int nrows = (spec.count + ncols - 1) / ncols;
    if (nrows > cap_y) {
        nrows = cap_y;
        ncols = (spec.count + nrows - 1) / nrows;
    }
    if (ncols > cap_x || nrows > cap_y)
        throw ValidationError("generate grid does not fit the box at the given separation");
    double dx = ncols > 1 ? uw / (ncols - 1) : 0.0;
    double dy = nrows > 1 ? uh / (nrows - 1) : 0.0;
    double cx0 = ncols > 1 ? ux0 : 0.5 * (ux0 + ux1);
    double cy0 = nrows > 1 ? uy0 : 0.5 * (uy0 + uy1);

    std::vector<Eigen::Vector2d> centers(spec.count);
    for (int i = 0; i < spec.count; ++i)
        centers[i] = Eigen::Vector2d(cx0 + (i % ncols) * dx, cy0 + (i / ncols) * dy);

    // bounded random perturbation sweeps with rejection
    Rng64 rng(seed);
    double lim = 0.45 * cell;
    for (int sweep = 0; sweep < spec.sweeps; ++sweep) {
        for (int i = 0; i < spec.count; ++i) {
            double px = rng.uniform(-lim, lim);
            double py = rng.uniform(-lim, lim);
            Eigen::Vector2d cand = centers[i] + Eigen::Vector2d(px, py);
            if (cand(0) < ux0 || cand(0) > ux1 || cand(1) < uy0 || cand(1) > uy1) continue;
            bool ok = true;
            for (int j = 0; j < spec.count; ++j) {
                if (j == i) continue;
                if ((cand - centers[j]).norm() < cell) {
                    ok = false;
                    break;
                }
            }
            if (ok) centers[i] = cand;
        }
    }

    std::vector<ParticleGeometry> out(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        out[i].center = centers[i];
        out[i].shape = spec.shapes[i % spec.shapes.size()];
        out[i].rotation = 0.0;
    }
    if (spec.random_rotations)
        for (int i = 0; i < spec.count; ++i) out[i].rotation = rng.uniform(0.0, 2.0 * PI);
    return out;
}

}  // namespace escat
