#ifndef ARW_RANDOM_HPP
#define ARW_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "arw/topology.hpp"

namespace arw {

/// Counter-based (stateless, keyed) random source. Every variate is a
/// pure function of the key (seed, replicate, stream tag, vertex, slot),
/// so the uniforms underlying two systems at different (lambda, mu) are
/// identical: this is the coupling space behind all difference checks.
struct RandomSource {
    std::uint64_t seed{0};
    std::uint64_t replicate{0};
};

/// Fixed stream tags; part of the reproducibility contract.
enum class StreamTag : std::uint64_t {
    Particles = 0,  // X_x, initial particle counts
    Gaps = 1,       // Y_{x,m}, inter-jump sleep counts
    Jumps = 2,      // A_{x,m}, jump targets
    Activity = 3,   // phi flags (frog-mode initial activity)
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key derivation: the five key components are folded in sequence through
/// mix64, each XORed into the running state. Documented bit-exactly in
/// docs/formats.md.
inline std::uint64_t counter_key(const RandomSource& src, StreamTag tag,
                                 std::uint64_t vertex, std::uint64_t slot) {
    std::uint64_t h = mix64(src.seed);
    h = mix64(h ^ src.replicate);
    h = mix64(h ^ static_cast<std::uint64_t>(tag));
    h = mix64(h ^ vertex);
    h = mix64(h ^ slot);
    return h;
}

}  // namespace detail

/// Uniform in [0, 1), 53-bit resolution, pure function of the key.
inline double uniform01(const RandomSource& src, StreamTag tag, std::uint64_t vertex,
                        std::uint64_t slot) {
    return static_cast<double>(detail::counter_key(src, tag, vertex, slot) >> 11) *
           0x1.0p-53;
}

/// The site uniform X_x used to decode the initial particle count.
inline double uniform_site(const RandomSource& src, VertexId v) {
    return uniform01(src, StreamTag::Particles, v.raw, 0);
}

/// Initial-particle law: product of identical Poisson(mu) or
/// Bernoulli(mu) site distributions.
class ParticleLaw {
public:
    enum class Family { Poisson, Bernoulli };

    static ParticleLaw poisson(double mu) {
        if (!(mu >= 0.0)) throw std::invalid_argument("poisson: mu must be >= 0");
        return ParticleLaw(Family::Poisson, mu);
    }
    static ParticleLaw bernoulli(double mu) {
        if (!(mu > 0.0 && mu < 1.0))
            throw std::invalid_argument("bernoulli: mu must be in (0,1)");
        return ParticleLaw(Family::Bernoulli, mu);
    }

    Family family() const { return family_; }
    double mu() const { return mu_; }

    ParticleLaw with_mu(double mu) const {
        return family_ == Family::Poisson ? poisson(mu) : bernoulli(mu);
    }

    /// nu_j: probability that a site hosts exactly j particles.
    double pmf(int j) const {
        if (j < 0) return 0.0;
        if (family_ == Family::Bernoulli) {
            if (j == 0) return 1.0 - mu_;
            if (j == 1) return mu_;
            return 0.0;
        }
        // stable upward recursion
        double p = std::exp(-mu_);
        for (int k = 0; k < j; ++k) p *= mu_ / (k + 1);
        return p;
    }

    /// nu_{>j}: probability of more than j particles.
    double nu_gt(int j) const {
        if (j < 0) return 1.0;
        if (family_ == Family::Bernoulli) return j == 0 ? mu_ : 0.0;
        double cdf = 0.0, c = 0.0;
        double p = std::exp(-mu_);
        for (int k = 0; k <= j; ++k) {
            double y = p - c;  // compensated summation
            double t = cdf + y;
            c = (t - cdf) - y;
            cdf = t;
            p *= mu_ / (k + 1);
        }
        return 1.0 - cdf;
    }

    /// d/dmu nu_{>j}. Bernoulli: 1 for j = 0, else 0. Poisson: nu_j.
    double nu_gt_prime(int j) const {
        if (family_ == Family::Bernoulli) return j == 0 ? 1.0 : 0.0;
        return pmf(j);
    }

    /// Smallest cap C with nu_{>C} < tail, used to truncate enumerations.
    int truncation_cap(double tail) const {
        if (family_ == Family::Bernoulli) return 1;
        int k = 0;
        while (nu_gt(k) >= tail) {
            ++k;
            if (k > 4096) throw std::runtime_error("truncation_cap: did not converge");
        }
        return k;
    }

private:
    ParticleLaw(Family f, double mu) : family_(f), mu_(mu) {}
    Family family_;
    double mu_;
};

/// Inverse-CDF decode of the particle count at one site: the unique k
/// with u in [nu_{<k}, nu_{<k+1}). Nondecreasing in mu at fixed u, which
/// gives the monotone coupling of initial configurations.
inline int decode_particles(double u, const ParticleLaw& law) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("decode_particles: u not in [0,1)");
    double cdf = 0.0, c = 0.0;
    int k = 0;
    const double cutoff = 1.0 - 1e-15;
    for (;;) {
        double p = law.pmf(k);
        double y = p - c;
        double t = cdf + y;
        c = (t - cdf) - y;
        cdf = t;
        if (u < cdf || cdf >= cutoff) return k;
        ++k;
    }
}

/// Geometric sleep-count decode: the unique l with
/// u in ((lambda/(1+lambda))^{l+1}, (lambda/(1+lambda))^l].
/// Requires u in (0,1]; nondecreasing in lambda at fixed u, which gives
/// the monotone coupling of instruction arrays.
inline int decode_sleep_count(double u, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("decode_sleep_count: lambda must be >= 0");
    if (!(u > 0.0 && u <= 1.0))
        throw std::invalid_argument("decode_sleep_count: u must be in (0,1]");
    if (lambda == 0.0) return 0;
    const double q = lambda / (1.0 + lambda);
    int l = 0;
    double p = q;
    while (u <= p) {
        ++l;
        p *= q;
    }
    return l;
}

/// Uniform jump-target index in {0, ..., degree-1}; independent of
/// lambda and mu (jump draws are held fixed across the phase diagram).
inline int jump_target(const RandomSource& src, VertexId v, std::uint64_t m, int degree) {
    if (degree <= 0) throw std::invalid_argument("jump_target: degree must be positive");
    double u = uniform01(src, StreamTag::Jumps, v.raw, m);
    int idx = static_cast<int>(u * degree);
    return idx >= degree ? degree - 1 : idx;
}

/// Sleep count for gap m at vertex v under rate lambda; maps the raw
/// [0,1) uniform to (0,1] to avoid the measure-zero boundary.
inline int sleep_count_at(const RandomSource& src, VertexId v, std::uint64_t m, double lambda) {
    double u = 1.0 - uniform01(src, StreamTag::Gaps, v.raw, m);
    return decode_sleep_count(u, lambda);
}

/// phi flag for frog-mode initialisation: 1 (site starts active) with
/// probability xi.
inline bool activity_flag(const RandomSource& src, VertexId v, double xi) {
    return uniform01(src, StreamTag::Activity, v.raw, 0) < xi;
}

}  // namespace arw

#endif
