#pragma once

#include "kvg/matrix.hpp"

#include <cstdint>
#include <random>

namespace kvg {

/// Deterministic rational points in [-1, 1]^n: p/q with 1 <= q <= 16.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    Rational next();
    RatVector point(std::size_t n);
    std::vector<RatVector> points(std::size_t n, std::size_t count);

private:
    std::mt19937_64 engine_;
};

/// Small random rational in [-bound, bound] with denominator up to 3; used by generators.
Rational small_rational(std::mt19937_64& rng, long bound);

}  // namespace kvg
