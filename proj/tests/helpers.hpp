#pragma once

#include <random>

#include "cmscan/modular.hpp"
#include "cmscan/numerics.hpp"

namespace cmscan::testing {

/* Uniform in [0,1) with `wp` significant bits, assembled from 32-bit draws
 * so results are identical across platforms for a fixed seed. */
inline BigFloat random_unit(std::mt19937_64& rng, mpfr_prec_t wp) {
    BigFloat r(0L, wp);
    BigFloat scale(1L, wp);
    BigFloat step = BigFloat::pow2(-32, wp);
    long chunks = (wp + 31) / 32;
    for (long i = 0; i < chunks; ++i) {
        scale = scale * step;
        r = r + scale * BigFloat(static_cast<long>(rng() & 0xffffffffULL), wp);
    }
    return r;
}

inline BigFloat random_in(std::mt19937_64& rng, double lo, double hi, mpfr_prec_t wp) {
    return BigFloat(lo, wp) + random_unit(rng, wp) * BigFloat(hi - lo, wp);
}

/* Random tau in the standard fundamental domain (|Re| <= 1/2, |tau| >= 1),
 * imaginary part in [1, im_max]. */
inline TauPoint random_tau_standard(std::mt19937_64& rng, double im_max, mpfr_prec_t wp) {
    for (;;) {
        BigFloat re = random_in(rng, -0.5, 0.5, wp);
        BigFloat im = random_in(rng, 1.0, im_max, wp);
        if (re * re + im * im >= BigFloat(1L, wp))
            return TauPoint(BigComplex(re, im));
    }
}

/* Random tau in the level-2 fundamental domain, which the translates
 * rep(F) of the standard domain tile: push a standard-domain point through
 * a uniformly chosen coset representative. */
inline TauPoint random_tau_level2(std::mt19937_64& rng, double im_max, mpfr_prec_t wp) {
    TauPoint t = random_tau_standard(rng, im_max, wp);
    const auto& reps = coset_representatives();
    const UnimodularMatrix& g = reps[rng() % reps.size()];
    return TauPoint(g.apply(t.value));
}

/* |a - b| <= 2^tol_exp * max(1, |b|). */
inline bool close_rel(const BigFloat& a, const BigFloat& b, long tol_exp) {
    BigFloat scale = max(BigFloat(1L, b.prec()), abs(b));
    return abs(a - b) <= BigFloat::pow2(tol_exp, a.prec()) * scale;
}

inline bool close_rel(const BigComplex& a, const BigComplex& b, long tol_exp) {
    BigFloat scale = max(BigFloat(1L, 64), b.abs());
    return (a - b).abs() <= BigFloat::pow2(tol_exp, 64) * scale;
}

} // namespace cmscan::testing
