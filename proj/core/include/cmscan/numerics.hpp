#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "cmscan/errors.hpp"

namespace cmscan {

/* Working precision request.  `bits` is the precision the caller wants to
 * trust in the result; `guard_bits` is extra headroom carried through
 * intermediate arithmetic so that accumulated rounding stays below the
 * trusted range.  Results certified at `bits` are always recomputed at
 * doubled precision before being reported as certificates. */
struct Precision {
    long bits;
    long guard_bits;

    explicit Precision(long bits_ = 256, long guard_bits_ = 32)
        : bits(bits_), guard_bits(guard_bits_)
    {
        if (bits < 64)
            throw Error("Precision: need at least 64 bits");
        if (guard_bits < 16)
            throw Error("Precision: need at least 16 guard bits");
    }

    long total() const { return bits + guard_bits; }

    Precision doubled() const { return Precision(2 * bits, guard_bits); }
    Precision with_bits(long b) const { return Precision(b, guard_bits); }
};

/* Thin RAII wrapper over mpfr_t.  Every value carries its own precision;
 * binary operations allocate the result at the larger of the two operand
 * precisions, so precision never silently degrades through arithmetic.
 * Rounding is to nearest throughout. */
class BigFloat {
  public:
    explicit BigFloat(mpfr_prec_t prec = 64) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(double x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_d(v_, x, MPFR_RNDN);
    }
    BigFloat(long x, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_si(v_, x, MPFR_RNDN);
    }
    BigFloat(const mpz_class& z, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
    }
    BigFloat(const mpq_class& q, mpfr_prec_t prec) {
        mpfr_init2(v_, prec);
        mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
    }

    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        if (this != &o)
            mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    /* Copy rounded to a different precision. */
    BigFloat at(mpfr_prec_t prec) const {
        BigFloat r(prec);
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    mpz_class round_to_mpz() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }

    static BigFloat pi(mpfr_prec_t prec) {
        BigFloat r(prec);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

    /* 2^e exactly. */
    static BigFloat pow2(long e, mpfr_prec_t prec = 64) {
        BigFloat r(prec);
        mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }

    static BigFloat from_string(const std::string& s, mpfr_prec_t prec) {
        BigFloat r(prec);
        if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
            throw Error("BigFloat: unparsable decimal string: " + s);
        return r;
    }

    /* Canonical scientific form.  Deterministic for a given value and digit
     * count, which the scan output format relies on. */
    std::string to_string(size_t digits = 0) const;

    BigFloat operator-() const {
        BigFloat r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        BigFloat r(std::max(a.prec(), b.prec()));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        BigFloat r(std::max(a.prec(), b.prec()));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        BigFloat r(std::max(a.prec(), b.prec()));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        BigFloat r(std::max(a.prec(), b.prec()));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator*(const BigFloat& a, long b) {
        BigFloat r(a.prec());
        mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator/(const BigFloat& a, long b) {
        BigFloat r(a.prec());
        mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator+(const BigFloat& a, long b) {
        BigFloat r(a.prec());
        mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }
    friend BigFloat operator-(const BigFloat& a, long b) {
        BigFloat r(a.prec());
        mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN);
        return r;
    }

    BigFloat& operator+=(const BigFloat& o) {
        if (o.prec() > prec())
            mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator-=(const BigFloat& o) {
        if (o.prec() > prec())
            mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator*=(const BigFloat& o) {
        if (o.prec() > prec())
            mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    /* Exact scale by 2^e. */
    BigFloat mul_2exp(long e) const {
        BigFloat r(prec());
        mpfr_mul_2si(r.v_, v_, e, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) != 0; }

    friend bool operator<(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
    friend bool operator>(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }
    friend bool operator<=(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) <= 0; }
    friend bool operator>=(const BigFloat& a, long b) { return mpfr_cmp_si(a.v_, b) >= 0; }

  private:
    mpfr_t v_;
};

BigFloat sqrt(const BigFloat& x);
BigFloat abs(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat atan2(const BigFloat& y, const BigFloat& x);
BigFloat hypot(const BigFloat& x, const BigFloat& y);
BigFloat floor(const BigFloat& x);
BigFloat round_nearest(const BigFloat& x);
BigFloat max(const BigFloat& a, const BigFloat& b);

/* Complex numbers as a pair of reals at a shared precision.  The component
 * reals of one value always carry the same precision. */
class BigComplex {
  public:
    explicit BigComplex(mpfr_prec_t prec = 64) : re_(prec), im_(prec) {}
    BigComplex(BigFloat re, BigFloat im) : re_(std::move(re)), im_(std::move(im)) {
        mpfr_prec_t p = std::max(re_.prec(), im_.prec());
        if (re_.prec() != p) re_ = re_.at(p);
        if (im_.prec() != p) im_ = im_.at(p);
    }
    BigComplex(double re, double im, mpfr_prec_t prec) : re_(re, prec), im_(im, prec) {}
    explicit BigComplex(const BigFloat& re) : re_(re), im_(re.prec()) {}

    const BigFloat& real() const { return re_; }
    const BigFloat& imag() const { return im_; }
    mpfr_prec_t prec() const { return re_.prec(); }

    BigComplex at(mpfr_prec_t prec) const { return BigComplex(re_.at(prec), im_.at(prec)); }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

    BigComplex conj() const { return BigComplex(re_, -im_); }

    /* Multiplication by the imaginary unit, exact. */
    BigComplex mul_i() const { return BigComplex(-im_, re_); }

    BigComplex operator-() const { return BigComplex(-re_, -im_); }

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ * b.re_ - a.im_ * b.im_,
                          a.re_ * b.im_ + a.im_ * b.re_);
    }
    friend BigComplex operator*(const BigComplex& a, const BigFloat& s) {
        return BigComplex(a.re_ * s, a.im_ * s);
    }
    friend BigComplex operator*(const BigComplex& a, long s) {
        return BigComplex(a.re_ * s, a.im_ * s);
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b);
    friend BigComplex operator/(const BigComplex& a, const BigFloat& s) {
        return BigComplex(a.re_ / s, a.im_ / s);
    }
    friend BigComplex operator/(const BigComplex& a, long s) {
        return BigComplex(a.re_ / s, a.im_ / s);
    }

    BigComplex& operator+=(const BigComplex& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }

    BigFloat norm_sq() const { return re_ * re_ + im_ * im_; }
    BigFloat abs() const { return hypot(re_, im_); }

    std::string to_string(size_t digits = 0) const {
        return re_.to_string(digits) + (im_.sign() < 0 ? " - " : " + ") +
               cmscan::abs(im_).to_string(digits) + "i";
    }

  private:
    BigFloat re_, im_;
};

/* Principal branch: Re(sqrt) >= 0; for negative reals the root is on the
 * positive imaginary axis. */
BigComplex sqrt(const BigComplex& z);

/* exp(z) = exp(Re z) (cos Im z + i sin Im z). */
BigComplex exp(const BigComplex& z);

/* Natural logarithm, principal branch (Im in (-pi, pi]). */
BigComplex log(const BigComplex& z);

/* Arithmetic-geometric mean of two nonzero complex numbers.
 *
 * Each step replaces (a, b) by ((a+b)/2, sqrt(ab)) with the square-root
 * branch chosen to minimize |m - s| against the arithmetic mean m (ties
 * broken by Im(s/m) > 0).  With that branch rule the iteration converges
 * quadratically for all nonzero inputs, and is the variant whose limit the
 * period computations assume.
 *
 * Scaling: agm(r*a, r*b) = r * agm(a, b).
 *
 * Throws ZeroInput if a or b is zero, NonConvergence if the iterates fail
 * to agree to 2^-bits within prec.bits steps.
 */
BigComplex agm(const BigComplex& a, const BigComplex& b, const Precision& prec);

/* Sum of a series with geometrically decaying tail, |q| < 1.
 *
 * `term(k)` returns the k-th summand (the factor q^... already included);
 * it is called with k = 0, 1, 2, ... strictly increasing, so generators may
 * keep incremental state.  Summation stops once |term| / (1 - |q|) drops
 * below 2^-(bits + guard_bits), which bounds the discarded tail whenever
 * successive terms decay at least as fast as powers of |q|.
 *
 * Throws DivergentInput if |q| >= 1, NonConvergence if the cutoff is never
 * reached within the (generous) term cap.
 */
BigComplex sum_q_series(const std::function<BigComplex(std::size_t)>& term,
                        const BigComplex& q, const Precision& prec);

} // namespace cmscan
