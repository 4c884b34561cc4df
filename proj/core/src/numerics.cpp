#include "cmscan/numerics.hpp"

#include <cmath>

namespace cmscan {

std::string BigFloat::to_string(size_t digits) const
{
    if (mpfr_nan_p(v_))
        return "nan";
    if (mpfr_inf_p(v_))
        return mpfr_sgn(v_) < 0 ? "-inf" : "inf";
    if (mpfr_zero_p(v_))
        return "0";
    if (digits == 0)
        digits = (size_t)((double)prec() * 0.30103) + 2;
    mpfr_exp_t e;
    char* raw = mpfr_get_str(nullptr, &e, 10, digits, v_, MPFR_RNDN);
    std::string m(raw);
    mpfr_free_str(raw);
    bool neg = !m.empty() && m[0] == '-';
    if (neg)
        m.erase(0, 1);
    size_t last = m.find_last_not_of('0');
    m.erase(last == std::string::npos ? 1 : last + 1);
    std::string out = neg ? "-" : "";
    out += m[0];
    if (m.size() > 1) {
        out += '.';
        out += m.substr(1);
    }
    out += 'e';
    out += std::to_string((long)e - 1);
    return out;
}

#define CMSCAN_UNARY(name, mpfr_fn)                    \
    BigFloat name(const BigFloat& x)                   \
    {                                                  \
        BigFloat r(x.prec());                          \
        mpfr_fn(r.raw(), x.raw(), MPFR_RNDN);          \
        return r;                                      \
    }

CMSCAN_UNARY(sqrt, mpfr_sqrt)
CMSCAN_UNARY(abs, mpfr_abs)
CMSCAN_UNARY(exp, mpfr_exp)
CMSCAN_UNARY(log, mpfr_log)
CMSCAN_UNARY(sin, mpfr_sin)
CMSCAN_UNARY(cos, mpfr_cos)

#undef CMSCAN_UNARY

BigFloat floor(const BigFloat& x)
{
    BigFloat r(x.prec());
    mpfr_floor(r.raw(), x.raw());
    return r;
}

BigFloat round_nearest(const BigFloat& x)
{
    BigFloat r(x.prec());
    mpfr_rint(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

BigFloat atan2(const BigFloat& y, const BigFloat& x)
{
    BigFloat r(std::max(y.prec(), x.prec()));
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}

BigFloat hypot(const BigFloat& x, const BigFloat& y)
{
    BigFloat r(std::max(y.prec(), x.prec()));
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

BigFloat max(const BigFloat& a, const BigFloat& b)
{
    return a >= b ? a : b;
}

BigComplex operator/(const BigComplex& a, const BigComplex& b)
{
    BigFloat d = b.norm_sq();
    return BigComplex((a.re_ * b.re_ + a.im_ * b.im_) / d,
                      (a.im_ * b.re_ - a.re_ * b.im_) / d);
}

BigComplex sqrt(const BigComplex& z)
{
    mpfr_prec_t p = z.prec();
    if (z.is_zero())
        return BigComplex(p);
    if (z.imag().is_zero()) {
        if (z.real().sign() > 0)
            return BigComplex(sqrt(z.real()), BigFloat(p));
        return BigComplex(BigFloat(p), sqrt(-z.real()));
    }
    /* u = sqrt((|z| + |Re z|) / 2) is the larger of the result components,
     * computed without cancellation; the other follows from u * w = Im z / 2. */
    BigFloat m = z.abs();
    BigFloat u = sqrt((m + abs(z.real())) / 2);
    BigFloat w = z.imag() / (u * 2);
    if (z.real().sign() >= 0)
        return BigComplex(u, w);
    if (z.imag().sign() >= 0)
        return BigComplex(abs(w), u);
    return BigComplex(abs(w), -u);
}

BigComplex exp(const BigComplex& z)
{
    mpfr_prec_t p = z.prec();
    BigFloat r = exp(z.real());
    BigFloat c(p), s(p);
    mpfr_sin_cos(s.raw(), c.raw(), z.imag().raw(), MPFR_RNDN);
    return BigComplex(r * c, r * s);
}

BigComplex log(const BigComplex& z)
{
    return BigComplex(log(z.abs()), atan2(z.imag(), z.real()));
}

BigComplex agm(const BigComplex& a0, const BigComplex& b0, const Precision& prec)
{
    if (a0.is_zero() || b0.is_zero())
        throw ZeroInput("agm: zero input");
    mpfr_prec_t wp = prec.total();
    BigComplex a = a0.at(wp), b = b0.at(wp);
    BigFloat eps = BigFloat::pow2(-prec.bits, 64);
    for (long iter = 0; iter < prec.bits; ++iter) {
        BigComplex m = (a + b) / 2;
        if (m.is_zero())
            return m; /* wrong-branch degenerate pair, the mean is exactly 0 */
        BigComplex s = sqrt(a * b);
        if (s.is_zero())
            return s;
        BigFloat dminus = (m - s).abs();
        BigFloat dplus = (m + s).abs();
        if (dminus > dplus) {
            s = -s;
        } else if (dminus == dplus) {
            /* tie: require Im(s/m) > 0, same sign as Im(s * conj(m)) */
            BigFloat t = s.imag() * m.real() - s.real() * m.imag();
            if (t.sign() < 0)
                s = -s;
        }
        a = m;
        b = s;
        if ((a - b).abs() <= eps * a.abs())
            return (a + b) / 2;
    }
    throw NonConvergence("agm: no convergence at the requested precision");
}

BigComplex sum_q_series(const std::function<BigComplex(std::size_t)>& term,
                        const BigComplex& q, const Precision& prec)
{
    mpfr_prec_t wp = prec.total();
    BigFloat absq = q.abs().at(wp);
    if (!(absq < 1))
        throw DivergentInput("sum_q_series: |q| >= 1");
    BigFloat inv_tail = BigFloat(1L, wp) / (BigFloat(1L, wp) - absq);
    BigFloat eps = BigFloat::pow2(-(prec.bits + prec.guard_bits), 64);
    BigComplex acc(wp);
    size_t cap = 1024 + 32 * (size_t)prec.bits;
    for (size_t k = 0; k < cap; ++k) {
        BigComplex t = term(k);
        if (!t.is_finite())
            throw Error("sum_q_series: non-finite term");
        acc += t;
        if (k >= 1 && t.abs() * inv_tail < eps)
            return acc;
    }
    throw NonConvergence("sum_q_series: term cap exceeded");
}

} // namespace cmscan
