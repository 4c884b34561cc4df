#pragma once

#include <utility>
#include <vector>

#include "cmscan/modular.hpp"
#include "cmscan/numerics.hpp"
#include "cmscan/polynomial.hpp"

namespace cmscan {

/* Point on the curve y^2 = x(x-1)(x-lambda), affine or the point at
 * infinity.  Affine points satisfy the curve equation to the tolerance of
 * whatever produced them. */
struct LegendrePoint {
    bool at_infinity;
    BigComplex x, y;

    static LegendrePoint infinity(mpfr_prec_t prec = 64) {
        return {true, BigComplex(prec), BigComplex(prec)};
    }
    static LegendrePoint affine(BigComplex x, BigComplex y) {
        return {false, std::move(x), std::move(y)};
    }
};

/* A point of the uniformizing cylinder: z in the fundamental cell
 * L_tau = { x + tau*y : x, y in [0,1) }.  The constructor reduces z into
 * that cell. */
struct LatticeCoordinate {
    BigComplex z;
    TauPoint tau;

    LatticeCoordinate(BigComplex z_, TauPoint tau_);

    /* Real cell coordinates (x, y) with z = x + tau*y. */
    std::pair<BigFloat, BigFloat> cell_coords() const;
};

/* Distance from w to the nearest point of Z + tau*Z. */
BigFloat lattice_residual(const BigComplex& w, const TauPoint& tau);

/* A section of the Legendre family: x(lambda) = x_num(lambda)/x_den(lambda)
 * and y = branch * sqrt(x(x-1)(x-lambda)) by the principal square root.
 * Sections whose x is identically 1 or lambda (2-torsion everywhere) are
 * legal but flagged; x identically 0 cannot be represented at all, since
 * IntPolynomial excludes the zero polynomial. */
struct Section {
    IntPolynomial x_num; /* primitive */
    IntPolynomial x_den; /* primitive */
    mpq_class scale;     /* x = scale * x_num / x_den, exactly */
    int branch;          /* +1 or -1 */

    /* IntPolynomial normalizes away integer content, so raw coefficient
     * lists go through this constructor, which keeps the content ratio. */
    Section(const std::vector<mpz_class>& num, const std::vector<mpz_class>& den, int branch_)
        : x_num(num), x_den(den), scale(signed_content(num), signed_content(den)),
          branch(branch_)
    {
        scale.canonicalize();
        if (branch != 1 && branch != -1)
            throw Error("Section: branch must be +1 or -1");
    }

    Section(IntPolynomial num, IntPolynomial den, int branch_)
        : x_num(std::move(num)), x_den(std::move(den)), scale(1), branch(branch_)
    {
        if (branch != 1 && branch != -1)
            throw Error("Section: branch must be +1 or -1");
    }

    /* True when the section is identically 2-torsion: x = 1 or x = lambda. */
    bool is_identically_two_torsion() const {
        return scale == 1 && (x_num == x_den || x_num == multiply_by_x(x_den));
    }

private:
    static mpz_class signed_content(const std::vector<mpz_class>& cs) {
        size_t n = cs.size();
        while (n > 0 && cs[n - 1] == 0)
            --n;
        if (n == 0)
            throw Error("Section: zero polynomial");
        mpz_class g = 0;
        for (size_t i = 0; i < n; ++i)
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), cs[i].get_mpz_t());
        return cs[n - 1] < 0 ? mpz_class(-g) : g;
    }
};

/* Exact element (p + q*sqrt(d)) / r of a quadratic field, d a fixed
 * non-square integer (or 1, in which case the sqrt(1) part is folded into p
 * and q stays 0).  Normalized: r > 0, gcd(p, q, r) = 1. */
struct QuadFieldElement {
    long long d;
    mpz_class p, q, r;

    QuadFieldElement(long long d_, mpz_class p_, mpz_class q_, mpz_class r_);

    static QuadFieldElement from_rational(long long d, const mpq_class& v);

    bool is_zero() const { return p == 0 && q == 0; }

    QuadFieldElement operator-() const { return {d, -p, -q, r}; }
    friend QuadFieldElement operator+(const QuadFieldElement& a, const QuadFieldElement& b);
    friend QuadFieldElement operator-(const QuadFieldElement& a, const QuadFieldElement& b);
    friend QuadFieldElement operator*(const QuadFieldElement& a, const QuadFieldElement& b);
    /* Field inverse; throws ZeroInput on zero. */
    QuadFieldElement inverse() const;
    friend QuadFieldElement operator/(const QuadFieldElement& a, const QuadFieldElement& b) {
        return a * b.inverse();
    }

    friend bool operator==(const QuadFieldElement& a, const QuadFieldElement& b) {
        return a.d == b.d && a.p == b.p && a.q == b.q && a.r == b.r;
    }
};

/* m * m_squarefree(m) is a perfect square; sign preserved.  Factors found by
 * trial division up to 1e6 plus perfect-square extraction of the remainder,
 * which is exact for every input this artifact produces. */
long long squarefree_part(const mpz_class& m, mpz_class& square_root_out);

struct TorsionResult {
    bool finite;
    int order; /* meaningful when finite */
};

/* Image of a point under the shift to short Weierstrass form
 * Y'^2 = 4X'^3 - g2 X' - g3, with X' = X - (lambda+1)/3, Y' = 2Y. */
struct WeierstrassImage {
    BigComplex X, Y, g2, g3;
};

/* Chord-tangent addition on y^2 = x(x-1)(x-lambda).  Throws
 * NearSingularSlope when the x-coordinates agree to tolerance but the
 * points are neither equal nor inverse at the working precision. */
LegendrePoint add(const LegendrePoint& P, const LegendrePoint& Q, const BigComplex& lambda);

/* Weierstrass p-function and derivative for the lattice Z + tau*Z, via
 * theta quotients away from lattice points and the Laurent expansion close
 * to them.  Internal precision adapts to the pole distance so the absolute
 * accuracy target survives the 1/z^2 growth. */
BigComplex wp(const BigComplex& z, const TauPoint& tau, const Precision& prec);
BigComplex wp_prime(const BigComplex& z, const TauPoint& tau, const Precision& prec);

/* (g2, g3) of the lattice Z + tau*Z: g2 = -4 (e1 e2 + e1 e3 + e2 e3),
 * g3 = 4 e1 e2 e3. */
std::pair<BigComplex, BigComplex> weierstrass_invariants(const TauPoint& tau,
                                                         const Precision& prec);

/* The uniformization (tau, z) -> point of E_{lambda(tau)}:
 * x = (wp(z) - e1) / (e3 - e1), y = wp'(z) / (2 (e3 - e1)^{3/2}), with the
 * principal branch of sqrt(e3 - e1) fixed once per fiber.  z in the lattice
 * maps to Infinity. */
LegendrePoint point_of_z(const LatticeCoordinate& zc, const Precision& prec);

/* Inverse of point_of_z on the fundamental cell: the unique z in L_tau with
 * point_of_z(z) = P.  The p-value is inverted by a Carlson symmetric
 * integral; the sign of z is fixed by matching y; a seeded Newton fallback
 * covers arguments where the integral lands on the wrong branch. */
LatticeCoordinate elliptic_log(const LegendrePoint& P, const TauPoint& tau,
                               const Precision& prec);

WeierstrassImage to_weierstrass(const LegendrePoint& P, const BigComplex& lambda);

/* Evaluate a section at lambda0: the point (x(lambda0), branch*sqrt(...)).
 * Throws PoleOfSection when the denominator vanishes at lambda0. */
LegendrePoint specialize(const Section& section, const BigComplex& lambda0,
                         const Precision& prec);

/* Exact torsion test of a section specialized at a rational lambda0 not in
 * {0,1}.  The point coordinates live in a quadratic field; [m]P is computed
 * by exact field arithmetic for m up to max_order and the first m with
 * [m]P = Infinity is certified.  Returns InfiniteOrder (finite = false)
 * when no multiple vanishes, which is conclusive under the uniform torsion
 * bound for quadratic fields that motivates the default max_order = 24. */
TorsionResult torsion_certificate(const Section& section, const mpq_class& lambda0,
                                  int max_order = 24);

} // namespace cmscan
