#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cmscan/numerics.hpp"

namespace cmscan {

/* A point in the upper half plane. */
struct TauPoint {
    BigComplex value;

    explicit TauPoint(BigComplex v) : value(std::move(v)) {
        if (!(value.imag() > 0))
            throw Error("TauPoint: imaginary part must be positive");
    }

    const BigFloat& im() const { return value.imag(); }
    const BigFloat& re() const { return value.real(); }
};

/* Element of SL2(Z) acting on the upper half plane by
 * tau -> (p*tau + q) / (r*tau + s). */
struct UnimodularMatrix {
    long long p = 1, q = 0, r = 0, s = 1;

    UnimodularMatrix() = default;
    UnimodularMatrix(long long p_, long long q_, long long r_, long long s_)
        : p(p_), q(q_), r(r_), s(s_)
    {
        if (p * s - q * r != 1)
            throw Error("UnimodularMatrix: determinant must be 1");
    }

    static UnimodularMatrix identity() { return {}; }
    static UnimodularMatrix translation(long long n) { return {1, n, 0, 1}; }
    static UnimodularMatrix inversion() { return {0, -1, 1, 0}; }

    UnimodularMatrix inverse() const { return {s, -q, -r, p}; }

    /* this * o, i.e. apply o first. */
    UnimodularMatrix compose(const UnimodularMatrix& o) const {
        return {p * o.p + q * o.r, p * o.q + q * o.s,
                r * o.p + s * o.r, r * o.q + s * o.s};
    }

    BigComplex apply(const BigComplex& tau) const {
        mpfr_prec_t wp = tau.prec();
        BigComplex num = tau * p + BigComplex(BigFloat((long)q, wp));
        BigComplex den = tau * r + BigComplex(BigFloat((long)s, wp));
        return num / den;
    }

    bool is_identity() const { return p == 1 && q == 0 && r == 0 && s == 1; }

    /* Congruent to the identity mod 2, i.e. member of the level-2
     * principal congruence subgroup. */
    bool is_level_two() const {
        auto even = [](long long x) { return ((x % 2) + 2) % 2 == 0; };
        return !even(p) && even(q) && even(r) && !even(s);
    }

    std::array<int, 4> mod2() const {
        auto m = [](long long x) { return (int)(((x % 2) + 2) % 2); };
        return {m(p), m(q), m(r), m(s)};
    }
};

/* Which fundamental domain a reduced point lives in, and for the level-2
 * domain which of the six coset translates it came from. */
struct DomainTag {
    enum class Domain { StandardSL2, LevelTwo };
    Domain domain = Domain::StandardSL2;
    int coset = 0; /* index into coset_representatives() */
};

/* Fourth powers of the three even theta constants at tau (plus the
 * constants themselves, which the Weierstrass machinery needs).
 * Conventions: q = exp(i*pi*tau),
 *   theta2 = 2 q^{1/4} sum q^{n(n+1)},
 *   theta3 = 1 + 2 sum q^{n^2},
 *   theta4 = 1 + 2 sum (-1)^n q^{n^2}. */
struct ThetaConstants {
    BigComplex theta2_4, theta3_4, theta4_4;
    BigComplex theta2, theta3, theta4;
};

/* Values of the four Jacobi theta functions at argument v = pi*z.
 * theta_z reduces z into the centered period cell before summing; the
 * returned values belong to the reduced argument.  Quotients of these
 * values that are invariant under lattice translation (everything the
 * Weierstrass layer consumes) are unaffected by the reduction. */
struct ThetaValues {
    BigComplex t1, t2, t3, t4;
    BigComplex z_reduced;
};

/* Values of the Weierstrass function at the three half periods of the
 * lattice Z + tau*Z, labeled so that
 *   e1 = wp(tau/2), e2 = wp((1+tau)/2), e3 = wp(1/2),
 * which makes lambda = (e2 - e1)/(e3 - e1) the classical modular lambda
 * with lambda(i) = 1/2. */
struct HalfPeriodValues {
    BigComplex e1, e2, e3;
};

struct ReducedTau {
    TauPoint tau;
    UnimodularMatrix g; /* g(input) = tau */
};

struct ReducedTauB {
    TauPoint tau;
    UnimodularMatrix g; /* g(input) = tau, g in the level-2 subgroup */
    DomainTag tag;
};

/* The six coset representatives {I, T, S, ST, TS, STS} whose translates of
 * the standard fundamental domain tile the level-2 domain.  Reduction mod 2
 * maps them bijectively onto SL2(F2). */
const std::array<UnimodularMatrix, 6>& coset_representatives();

/* Theta constants at tau.  Requires Im(tau) > 2^-10; below that the series
 * would need more terms than the precision can support.
 * Cross-checks the Jacobi identity theta3^4 = theta2^4 + theta4^4 and
 * throws PrecisionLoss on violation. */
ThetaConstants theta_constants(const TauPoint& tau, const Precision& prec);

/* Theta functions at v = pi*z (after reducing z into the centered cell). */
ThetaValues theta_z(const BigComplex& z, const TauPoint& tau, const Precision& prec);

/* Modular lambda, lambda(tau) = theta2^4 / theta3^4.  Invariant under the
 * level-2 subgroup; lambda(i) = 1/2, lambda(1+i) = -1. */
BigComplex lambda_of_tau(const TauPoint& tau, const Precision& prec);

/* Half-period values of wp for the lattice Z + tau*Z; see HalfPeriodValues
 * for the labeling.  They are pairwise distinct and sum to zero. */
HalfPeriodValues half_period_values(const TauPoint& tau, const Precision& prec);

/* Klein j from lambda: j = 256 (1 - lambda + lambda^2)^3 / (lambda^2 (1 - lambda)^2).
 * Throws SingularFiber for lambda in {0, 1}. */
BigComplex j_of_lambda(const BigComplex& lambda, const Precision& prec);

/* Klein j at tau.  Reduces tau to the standard fundamental domain, computes
 * j through lambda there, and cross-checks against the integer q-expansion;
 * a mismatch beyond tolerance throws PrecisionLoss. */
BigComplex j_of_tau(const TauPoint& tau, const Precision& prec);

/* j by its q-expansion alone (coefficients are exact integers; the number
 * of terms is chosen from Im(tau) and the target precision).  Intended as
 * an independent check of the lambda route; requires Im(tau) >= 0.8. */
BigComplex j_q_expansion(const TauPoint& tau, const Precision& prec);

/* First n_terms coefficients c_0..c_{n-1} of j(tau) - 1/qhat as a series in
 * qhat = exp(2*pi*i*tau): c_0 = 744, c_1 = 196884, ...  Cached, thread safe. */
std::vector<mpz_class> j_q_coefficients(size_t n_terms);

/* Reduce into the standard fundamental domain |Re| <= 1/2, |tau| >= 1. */
ReducedTau reduce_to_standard(const TauPoint& tau);

/* Reduce into the level-2 domain (the union of the six coset translates of
 * the standard domain).  The returned matrix lies in the level-2 subgroup,
 * so lambda is unchanged by the reduction. */
ReducedTauB reduce_to_B(const TauPoint& tau);

/* Invert lambda: find tau in the level-2 domain with lambda(tau) = lambda0,
 * via tau = i * agm(1, sqrt(1-lambda0)) / agm(1, sqrt(lambda0)), retrying
 * conjugate square-root branches until the round trip through lambda_of_tau
 * reproduces lambda0.  Throws SingularFiber for lambda0 in {0, 1}. */
TauPoint tau_of_lambda(const BigComplex& lambda0, const Precision& prec);

/* The six values of lambda under the coset action, in the order of
 * coset_representatives():
 *   lambda, lambda/(lambda-1), 1-lambda, 1/(1-lambda), (lambda-1)/lambda, 1/lambda.
 * These are the x-coordinates cross-ratio permutations; evaluating lambda at
 * g(tau) for the six coset representatives g produces exactly this list. */
std::array<BigComplex, 6> mobius_lambda_orbit(const BigComplex& lambda);

} // namespace cmscan
