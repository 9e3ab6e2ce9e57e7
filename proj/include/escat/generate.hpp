#pragma once
#include "escat/io.hpp"

namespace escat {

// bin-sorting placement: regular grid start, then bounded random perturbation
// sweeps with rejection of moves that violate the separation constraint;
// deterministic under seed
std::vector<ParticleGeometry> generate_particles(const GenerateSpec& spec, std::uint64_t seed);

}
