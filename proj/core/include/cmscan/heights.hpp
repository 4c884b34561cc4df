#pragma once

#include <vector>

#include "cmscan/numerics.hpp"
#include "cmscan/polynomial.hpp"
#include "cmscan/quadforms.hpp"

namespace cmscan {

/* All complex roots of p (distinct; p must be squarefree, which holds for
 * the primitive annihilators produced in this module), via simultaneous
 * Durand-Kerner iteration at working precision with a doubled-precision
 * recheck.  Throws RootIsolationFailure when the iteration stalls or the
 * two precisions disagree. */
std::vector<BigComplex> polynomial_roots(const IntPolynomial& p, const Precision& prec);

/* Logarithmic absolute Weil height h(alpha) = (1/deg)(log|lead| +
 * sum log+ |root|) over the roots of the minimal polynomial.  Degrees 1
 * and 2 with complex roots are evaluated in closed form (exact up to the
 * final log); other cases go through polynomial_roots. */
BigFloat weil_height(const AlgebraicNumber& alpha, const Precision& prec);

/* Value of H_d: smallest max-coefficient of a coprime integer annihilator
 * of degree <= d, infinite when deg(alpha) > d. */
struct DHeightValue {
    bool infinite = false;
    mpz_class value; /* meaningful only when !infinite */
};

/* H_d(alpha) for d in {1, 2}: max |coefficient| of the minimal polynomial
 * when deg(alpha) = d, max(|p|, |q|) for rational p/q at any d, infinite
 * when deg(alpha) > d.  Throws UnsupportedDegree outside d in {1, 2}. */
DHeightValue d_height(const AlgebraicNumber& alpha, int d);

/* Exact integer comparisons of the four quadratic height inequalities for
 * an imaginary quadratic alpha with minimal polynomial aX^2 + bX + c:
 *   |alpha|    <= C1 * H2(alpha),        C1 = (1 + sqrt 5)/2
 *   H2(Re)     <= 2 * H2(alpha)
 *   H2(Im)     <= 4 * H2(alpha)^2
 *   H2(alpha)  <= 4 * H(alpha)^2
 * The ok flags come from integer arithmetic; the ratios (lhs/rhs) are
 * reported at 128 bits for inspection. */
struct HeightInequalityReport {
    mpz_class h2;     /* H2(alpha) = max(a, |b|, c) */
    mpz_class h2_re;  /* H2(Re alpha) */
    mpz_class h2_im;  /* H2(Im alpha) */
    mpz_class h_sq;   /* H(alpha)^2 = max(a, c) */
    bool abs_ok = false, re_ok = false, im_ok = false, equiv_ok = false;
    BigFloat abs_ratio, re_ratio, im_ratio, equiv_ratio;
    bool all_ok() const { return abs_ok && re_ok && im_ok && equiv_ok; }
};
HeightInequalityReport check_height_inequalities(const AlgebraicNumber& alpha);

/* Reconstruct a primitive integer annihilator of the algebraic number
 * approximated by x, trying degrees 1..max_degree in order and returning
 * the first verified hit (so minimal degree among detected candidates).
 * The per-degree coefficient bound is balanced against the tolerance
 * 2^(-bits/2) so that accidental near-relations stay above it; every hit
 * is re-verified at doubled precision.  Throws NoRelationFound when no
 * degree yields a verified annihilator (raise precision or max_degree). */
IntPolynomial minpoly_from_approx(const BigComplex& x, int max_degree, const Precision& prec);

/* Integer annihilator data for the lambda-value of one CM fiber.
 * `annihilator` vanishes at the fiber's lambda0; when exact_minimal is
 * true it is the minimal polynomial (verified minimal-degree search hit);
 * otherwise it is the full level-2 conjugate-orbit polynomial, a verified
 * integer annihilator whose degree is the orbit size (6h generically) and
 * which may be a proper multiple of the minimal polynomial.  h_lambda is
 * the Mahler height of the annihilator; for exact_minimal data this is
 * h(lambda0) itself, otherwise the orbit-averaged height. */
struct CMLambdaData {
    IntPolynomial annihilator{std::vector<mpz_class>{mpz_class(1)}};
    bool exact_minimal = false;
    std::vector<BigComplex> conjugates; /* roots of annihilator */
    BigFloat h_lambda;
    long precision_bits = 0;
};

/* Annihilator data for every reduced form of d, in reduced_forms order.
 * The conjugate orbit (all six anharmonic images of lambda at every form
 * root) is computed once per discriminant; minimal-degree lattice searches
 * run per distinct factor within fixed dimension and precision caps, with
 * the orbit polynomial as fallback beyond them. */
std::vector<CMLambdaData> cm_lambda_minpoly_all(const Discriminant& d, const Precision& prec);

/* Annihilator data for one fiber (computes the whole discriminant's orbit
 * and returns the entry of fiber.form). */
CMLambdaData cm_lambda_minpoly(const CMFiber& fiber, const Precision& prec);

/* Class polynomial of j: product of (X - j(tau_f)) over all reduced forms
 * of d, rounded to integers and re-verified at doubled precision.  Monic,
 * degree h(d).  Throws PrecisionLoss if the rounding margin is too thin. */
IntPolynomial j_class_polynomial(const Discriminant& d, const Precision& prec);

/* Height data of one CM fiber: exact H(tau0) = sqrt(max(a, c)) from the
 * form, h(lambda0) and the annihilator degree from CMLambdaData, plus the
 * scaling ratios h(lambda0)/|D|^(1/2) and log H(tau0)/log |D| and the
 * degree sanity flag (deg >= h(D) and deg | 6 h(D)). */
struct FiberHeightReport {
    BigFloat h_lambda;
    BigFloat H_tau;
    long deg_lambda = 0;
    long class_number = 0;
    BigFloat ratio_h_disc;    /* h(lambda0) / |D|^(1/2) */
    BigFloat ratio_logH_logD; /* log H(tau0) / log |D| */
    bool degree_ok = false;
    bool exact_minpoly = false;
};

/* Report for a fiber whose lambda annihilator is already known. */
FiberHeightReport fiber_height_report(const CMFiber& fiber, const CMLambdaData& data,
                                      const Precision& prec);

/* Convenience overload: uses fiber.lambda_minpoly when present (roots are
 * recomputed), otherwise computes cm_lambda_minpoly first. */
FiberHeightReport fiber_height_report(const CMFiber& fiber, const Precision& prec);

} // namespace cmscan
