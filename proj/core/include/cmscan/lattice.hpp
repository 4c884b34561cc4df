#pragma once

#include <optional>
#include <vector>

#include "cmscan/legendre.hpp"
#include "cmscan/numerics.hpp"
#include "cmscan/quadforms.hpp"

namespace cmscan {

using IntMatrix = std::vector<std::vector<mpz_class>>;

/* Row-generated integer lattice; the embedding dimension (columns) may
 * exceed the rank.  Rows must be linearly independent; reduction throws
 * otherwise. */
struct IntLattice {
    IntMatrix basis;
};

/* All-integer LLL reduction (exact Gram/lambda bookkeeping, no floating
 * point).  delta in (1/4, 1).  The output basis is size-reduced and
 * satisfies the Lovasz condition for every consecutive pair, and spans the
 * same lattice.  When `transform` is non-null it receives the unimodular
 * matrix T with T * input = output. */
IntLattice lll_reduce(const IntLattice& L, const mpq_class& delta = mpq_class(99, 100),
                      IntMatrix* transform = nullptr);

/* Smallest verified integer relation sum c_i x_i = 0 (|sum| < tol at prec
 * and at doubled precision), |c|_inf <= coeff_bound, found through an LLL
 * search.  Returns the candidate with the smallest max-coefficient, or
 * nothing.  A miss is advisory, not a proof of independence.  Throws
 * PrecisionTooLow when tol < 2^(-bits+32), where rounding noise would be
 * indistinguishable from a relation. */
std::optional<std::vector<mpz_class>> integer_relation(const std::vector<BigFloat>& xs,
                                                       const mpz_class& coeff_bound,
                                                       const BigFloat& tol,
                                                       const Precision& prec);

/* Same search over complex values (two embedding columns). */
std::optional<std::vector<mpz_class>> complex_relation(const std::vector<BigComplex>& xs,
                                                       const mpz_class& coeff_bound,
                                                       const BigFloat& tol,
                                                       const Precision& prec);

/* Certified linear relation sum (u_i + v_i rho) z_i = m1 + m2 tau among
 * elliptic logarithms on a CM fiber, rho = (disc + sqrt(disc))/2. */
struct RelationCertificate {
    std::vector<mpz_class> u, v;
    mpz_class m1, m2;
    BigFloat residual;
    long precision_bits;
    mpz_class h2_bound; /* max H2(u_i + v_i rho) over i */
    long long disc;
};

/* H2 (max |coefficient| of the primitive minimal polynomial) of u + v*rho
 * for rho = (disc + sqrt(disc))/2, computed exactly. */
mpz_class h2_of_order_element(const mpz_class& u, const mpz_class& v, long long disc);

/* Search for a relation among the logarithms zs on the fiber, keeping only
 * candidates whose coefficient height stays within h2_budget.  Residuals
 * are verified at prec and at doubled precision before a certificate is
 * issued; the returned candidate minimizes (h2, residual) among survivors.
 * Empty result means nothing within budget was found (advisory). */
std::optional<RelationCertificate> find_endomorphism_relation(
    const std::vector<LatticeCoordinate>& zs, const CMFiber& fiber,
    const mpz_class& h2_budget, const BigFloat& tol, const Precision& prec);

/* |sum (u_i + v_i rho) z_i - m1 - m2 tau| with arithmetic at prec; used to
 * re-verify certificates against independently recomputed logarithms. */
BigFloat relation_residual(const RelationCertificate& cert,
                           const std::vector<LatticeCoordinate>& zs,
                           const TauPoint& tau, const Precision& prec);

/* Constants of the explicit coefficient-budget bound.  Defaults are the
 * unit constants with the exponents fixed by the underlying estimates:
 * t = c_t |D|^(1/2), q = c_q |D|^(5/2), w = c_w (h_lambda + 1),
 * eta = c_eta kappa^(-gamma3) w^(-gamma4),
 * omega = c_omega (kappa t + kappa log kappa). */
struct BudgetConstants {
    double c_omega = 1.0;
    double c_t = 1.0;
    double c_q = 1.0;
    double c_eta = 1.0;
    double c_w = 1.0;
    double gamma3 = 1.0;
    double gamma4 = 1.0;
};

/* H2 search budget for an n-section relation search on a fiber of
 * discriminant d: M = ceil((2n)^(2n-1) * omega * (q/eta)^((2n-1)/2)) bounds
 * the naive height of the coefficients, and H2 <= 4 H^2 converts it to the
 * returned H2 cap 4 M^2. */
mpz_class relation_search_budget(const Discriminant& d, int n, double h_lambda,
                                 long kappa, const BudgetConstants& k = BudgetConstants());

} // namespace cmscan
