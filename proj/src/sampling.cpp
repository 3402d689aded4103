#include "kvg/sampling.hpp"

namespace kvg {

Rational Sampler::next() {
    std::uint64_t raw = engine_();
    long q = 1 + static_cast<long>(raw % 16);
    long p = static_cast<long>((raw / 16) % static_cast<std::uint64_t>(2 * q + 1)) - q;
    Rational r(p, q);
    r.canonicalize();
    return r;
}

RatVector Sampler::point(std::size_t n) {
    RatVector v(n);
    for (auto& c : v) c = next();
    return v;
}

std::vector<RatVector> Sampler::points(std::size_t n, std::size_t count) {
    std::vector<RatVector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(point(n));
    return out;
}

Rational small_rational(std::mt19937_64& rng, long bound) {
    long q = 1 + static_cast<long>(rng() % 3);
    long span = 2 * bound * q + 1;
    long p = static_cast<long>(rng() % static_cast<std::uint64_t>(span)) - bound * q;
    Rational r(p, q);
    r.canonicalize();
    return r;
}

}  // namespace kvg
