#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "cmscan/errors.hpp"
#include "cmscan/numerics.hpp"

namespace cmscan {

/* Integer polynomial, coefficients in ascending degree.  Always stored
 * normalized: nonzero, primitive (content 1), positive leading coefficient.
 * The constructor strips trailing zeros and divides out the signed content,
 * so two constructions of the same rational multiple compare equal. */
class IntPolynomial {
  public:
    explicit IntPolynomial(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
        if (c_.empty())
            throw Error("IntPolynomial: zero polynomial");
        mpz_class g = 0;
        for (const auto& c : c_)
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (c_.back() < 0)
            g = -g;
        if (g != 1)
            for (auto& c : c_)
                mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<mpz_class>& coeffs() const { return c_; }
    const mpz_class& coeff(std::size_t i) const { return c_[i]; }
    const mpz_class& lead() const { return c_.back(); }

    /* Largest |coefficient|; the d-height of a root when degree matches. */
    mpz_class max_abs_coeff() const {
        mpz_class m = 0;
        for (const auto& c : c_) {
            mpz_class a = ::abs(c);
            if (a > m)
                m = a;
        }
        return m;
    }

    /* Horner evaluation at a complex point, all arithmetic at `prec` bits. */
    BigComplex eval(const BigComplex& x, mpfr_prec_t prec) const {
        BigComplex xs = x.at(prec);
        BigComplex r(BigFloat(c_.back(), prec), BigFloat(0L, prec));
        for (std::size_t i = c_.size() - 1; i-- > 0;)
            r = r * xs + BigComplex(BigFloat(c_[i], prec));
        return r;
    }

    /* Horner evaluation of the derivative, no renormalization involved. */
    BigComplex eval_derivative(const BigComplex& x, mpfr_prec_t prec) const {
        if (degree() == 0)
            return BigComplex(prec);
        BigComplex xs = x.at(prec);
        std::size_t n = c_.size() - 1;
        BigComplex r(BigFloat(mpz_class(c_[n] * static_cast<long>(n)), prec), BigFloat(0L, prec));
        for (std::size_t i = n; i-- > 1;)
            r = r * xs + BigComplex(BigFloat(mpz_class(c_[i] * static_cast<long>(i)), prec));
        return r;
    }

    /* Exact rational evaluation. */
    mpq_class eval_rational(const mpq_class& x) const {
        mpq_class r(c_.back());
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            r *= x;
            r += c_[i];
        }
        r.canonicalize();
        return r;
    }

    /* Sum_i |c_i| |x|^i, the natural conditioning scale for eval residuals. */
    BigFloat abs_eval(const BigFloat& absx, mpfr_prec_t prec) const {
        BigFloat xs = absx.at(prec);
        BigFloat r(mpz_class(::abs(c_.back())), prec);
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            r *= xs;
            r += BigFloat(mpz_class(::abs(c_[i])), prec);
        }
        return r;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (c_[i] == 0 && c_.size() > 1)
                continue;
            mpz_class a = ::abs(c_[i]);
            if (s.empty())
                s += c_[i] < 0 ? "-" : "";
            else
                s += c_[i] < 0 ? " - " : " + ";
            if (i == 0 || a != 1)
                s += a.get_str();
            if (i > 0) {
                if (a != 1)
                    s += "*";
                s += "X";
                if (i > 1)
                    s += "^" + std::to_string(i);
            }
        }
        return s;
    }

    friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) {
        return a.c_ == b.c_;
    }
    friend bool operator!=(const IntPolynomial& a, const IntPolynomial& b) {
        return !(a == b);
    }

  private:
    std::vector<mpz_class> c_;
};

/* p(X) -> X * p(X).  Used to compare a section's numerator against
 * lambda * denominator when flagging identically-2-torsion sections. */
inline IntPolynomial multiply_by_x(const IntPolynomial& p) {
    std::vector<mpz_class> c;
    c.reserve(p.coeffs().size() + 1);
    c.emplace_back(0);
    for (const auto& ci : p.coeffs())
        c.push_back(ci);
    return IntPolynomial(std::move(c));
}

/* An algebraic number: an integer minimal polynomial together with the
 * complex approximation singling out which root is meant.  The residual
 * |minpoly(approx)| must be below 2^(-bits/2).  Minimality is enforced
 * exactly for degrees 1 and 2 (a degree-2 polynomial with perfect-square
 * discriminant is rejected); for higher degrees it is asserted by the
 * caller's construction. */
class AlgebraicNumber {
  public:
    AlgebraicNumber(IntPolynomial minpoly, BigComplex approx, int root_index,
                    const Precision& prec)
        : minpoly_(std::move(minpoly)), approx_(std::move(approx)), root_index_(root_index)
    {
        int deg = minpoly_.degree();
        if (deg < 1)
            throw Error("AlgebraicNumber: constant polynomial");
        if (root_index_ < 0 || root_index_ >= deg)
            throw Error("AlgebraicNumber: root index out of range");
        if (deg == 2) {
            mpz_class disc = minpoly_.coeff(1) * minpoly_.coeff(1)
                             - 4 * minpoly_.coeff(2) * minpoly_.coeff(0);
            if (disc >= 0 && mpz_perfect_square_p(disc.get_mpz_t()))
                throw Error("AlgebraicNumber: quadratic is reducible over the rationals");
        }
        BigFloat resid = minpoly_.eval(approx_, prec.total()).abs();
        if (!(resid < BigFloat::pow2(-prec.bits / 2, 64)))
            throw Error("AlgebraicNumber: approximation does not satisfy the polynomial");
    }

    const IntPolynomial& minpoly() const { return minpoly_; }
    const BigComplex& approx() const { return approx_; }
    int root_index() const { return root_index_; }
    int degree() const { return minpoly_.degree(); }

    bool is_rational() const { return minpoly_.degree() == 1; }

    mpq_class as_rational() const {
        if (!is_rational())
            throw Error("AlgebraicNumber: not rational");
        mpq_class v(-minpoly_.coeff(0), minpoly_.coeff(1));
        v.canonicalize();
        return v;
    }

    static AlgebraicNumber from_rational(const mpq_class& v, const Precision& prec) {
        std::vector<mpz_class> c{mpz_class(-v.get_num()), mpz_class(v.get_den())};
        return AlgebraicNumber(IntPolynomial(std::move(c)),
                               BigComplex(BigFloat(v, prec.total())), 0, prec);
    }

  private:
    IntPolynomial minpoly_;
    BigComplex approx_;
    int root_index_;
};

} // namespace cmscan
