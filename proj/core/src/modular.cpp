#include "cmscan/modular.hpp"

#include <cmath>
#include <mutex>

namespace cmscan {

namespace {

BigComplex complex_one(mpfr_prec_t wp)
{
    return BigComplex(BigFloat(1L, wp));
}

/* q = exp(i*pi*tau*scale) for scale = 1 or 1/4. */
BigComplex nome(const BigComplex& tau, mpfr_prec_t wp, long denom = 1)
{
    BigComplex t = tau.at(wp);
    BigFloat pi = BigFloat::pi(wp);
    return exp((t * pi / denom).mul_i());
}

void require_im_above_cutoff(const TauPoint& tau)
{
    if (!(tau.im() > BigFloat::pow2(-10, 64)))
        throw PrecisionLoss("theta series: Im(tau) <= 2^-10");
}

} // namespace

const std::array<UnimodularMatrix, 6>& coset_representatives()
{
    /* I, T, S, ST, TS, STS; their reductions mod 2 enumerate SL2(F2). */
    static const std::array<UnimodularMatrix, 6> reps = {
        UnimodularMatrix{1, 0, 0, 1},  UnimodularMatrix{1, 1, 0, 1},
        UnimodularMatrix{0, -1, 1, 0}, UnimodularMatrix{0, -1, 1, 1},
        UnimodularMatrix{1, -1, 1, 0}, UnimodularMatrix{-1, 0, 1, -1},
    };
    return reps;
}

ThetaConstants theta_constants(const TauPoint& tau, const Precision& prec)
{
    require_im_above_cutoff(tau);
    mpfr_prec_t wp = prec.total();
    BigComplex q = nome(tau.value, wp);
    BigComplex q4 = nome(tau.value, wp, 4);
    BigComplex q2 = q * q;

    /* sum over n >= 0 of q^{n(n+1)} */
    BigComplex s2 = sum_q_series(
        [term = complex_one(wp), pw = complex_one(wp), q2](size_t k) mutable {
            if (k == 0)
                return term;
            pw = pw * q2;     /* q^{2k} */
            term = term * pw; /* q^{k(k+1)} */
            return term;
        },
        q, prec);

    /* 1 + 2 sum q^{n^2}, and the sign-alternating variant */
    auto square_exponent_series = [&](bool alternate) {
        return sum_q_series(
            [qn2 = complex_one(wp), qodd = q, q2, alternate](size_t k) mutable {
                if (k == 0)
                    return BigComplex(BigFloat(1L, qodd.prec()));
                qn2 = qn2 * qodd; /* q^{k^2} */
                qodd = qodd * q2;
                BigComplex t = qn2 * 2L;
                return (alternate && (k & 1)) ? -t : t;
            },
            q, prec);
    };
    BigComplex s3 = square_exponent_series(false);
    BigComplex s4 = square_exponent_series(true);

    ThetaConstants tc;
    tc.theta2 = q4 * s2 * 2L;
    tc.theta3 = s3;
    tc.theta4 = s4;
    auto fourth = [](const BigComplex& x) {
        BigComplex x2 = x * x;
        return x2 * x2;
    };
    tc.theta2_4 = fourth(tc.theta2);
    tc.theta3_4 = fourth(tc.theta3);
    tc.theta4_4 = fourth(tc.theta4);

    /* Jacobi identity; failure means the series lost more than the guard
     * bits and nothing downstream can be trusted.  Measured against the
     * dominant fourth power: near the cusps one of the three is tiny and
     * the other two cancel, which is exact behavior, not precision loss. */
    BigComplex defect = tc.theta3_4 - tc.theta2_4 - tc.theta4_4;
    BigFloat dom = max(tc.theta3_4.abs(), max(tc.theta2_4.abs(), tc.theta4_4.abs()));
    if (!(defect.abs() <= BigFloat::pow2(-prec.bits + 8, 64) * dom))
        throw PrecisionLoss("theta_constants: Jacobi identity check failed");
    return tc;
}

ThetaValues theta_z(const BigComplex& z, const TauPoint& tau, const Precision& prec)
{
    require_im_above_cutoff(tau);
    mpfr_prec_t wp = prec.total();
    BigComplex t = tau.value.at(wp);
    BigComplex zz = z.at(wp);

    /* translate into the centered cell |Im z| <= Im(tau)/2, |Re z| <= 1/2 */
    mpz_class ky = (zz.imag() / t.imag()).round_to_mpz();
    if (ky != 0)
        zz = zz - t * BigFloat(ky, wp);
    mpz_class kx = zz.real().round_to_mpz();
    if (kx != 0)
        zz = zz - BigComplex(BigFloat(kx, wp));

    BigFloat pi = BigFloat::pi(wp);
    BigComplex v = zz * pi;
    BigComplex q = nome(t, wp);
    BigComplex q4 = nome(t, wp, 4);
    BigComplex q2 = q * q;

    BigComplex w = exp(v.mul_i());      /* e^{iv} */
    BigComplex winv = exp((-v).mul_i());
    BigComplex W = w * w, Winv = winv * winv;

    BigComplex s1(wp), s2(wp), s3(wp), s4(wp);

    BigFloat absq = q.abs();
    BigFloat inv_tail = BigFloat(1L, wp) / (BigFloat(1L, wp) - absq);
    BigFloat eps = BigFloat::pow2(-(prec.bits + prec.guard_bits), 64);

    /* running powers: even series uses q^{n^2} W^{+-n}, odd series uses
     * q^{n(n+1)} w^{+-(2n+1)} */
    BigComplex qn2 = complex_one(wp), qodd = q;
    BigComplex qnn = complex_one(wp), qstep = complex_one(wp);
    BigComplex Wn = complex_one(wp), Wninv = complex_one(wp);
    BigComplex wodd = w, woddinv = winv;

    size_t cap = 1024 + 32 * (size_t)prec.bits;
    int quiet = 0;
    for (size_t n = 0; n < cap; ++n) {
        BigFloat largest(64);
        if (n >= 1) {
            qn2 = qn2 * qodd;
            qodd = qodd * q2;
            Wn = Wn * W;
            Wninv = Wninv * Winv;
            BigComplex even_sum = qn2 * (Wn + Wninv);
            s3 += even_sum;
            s4 += (n & 1) ? -even_sum : even_sum;
            largest = even_sum.abs();
        }
        BigComplex oc = qnn * (wodd + woddinv);
        BigComplex os = qnn * (wodd - woddinv);
        s2 += oc;
        s1 += (n & 1) ? -os : os;
        largest = max(largest, max(oc.abs(), os.abs()));

        qstep = qstep * q2;
        qnn = qnn * qstep; /* q^{(n+1)(n+2)} */
        wodd = wodd * W;
        woddinv = woddinv * Winv;

        if (n >= 1 && largest * inv_tail < eps) {
            if (++quiet >= 2)
                break;
        } else {
            quiet = 0;
        }
        if (n + 1 == cap)
            throw NonConvergence("theta_z: term cap exceeded");
    }

    ThetaValues out;
    out.t1 = -(q4 * s1).mul_i();            /* 2 sin((2n+1)v) = -i (w^{2n+1} - w^{-(2n+1)}) */
    out.t2 = q4 * s2;
    out.t3 = complex_one(wp) + s3;
    out.t4 = complex_one(wp) + s4;
    out.z_reduced = zz;
    return out;
}

BigComplex lambda_of_tau(const TauPoint& tau, const Precision& prec)
{
    ThetaConstants tc = theta_constants(tau, prec);
    return tc.theta2_4 / tc.theta3_4;
}

HalfPeriodValues half_period_values(const TauPoint& tau, const Precision& prec)
{
    ThetaConstants tc = theta_constants(tau, prec);
    mpfr_prec_t wp = prec.total();
    BigFloat pi = BigFloat::pi(wp);
    BigFloat pi2_3 = pi * pi / 3;
    HalfPeriodValues e;
    e.e1 = -(tc.theta2_4 + tc.theta3_4) * pi2_3;
    e.e2 = (tc.theta2_4 - tc.theta4_4) * pi2_3;
    e.e3 = (tc.theta3_4 + tc.theta4_4) * pi2_3;
    return e;
}

BigComplex j_of_lambda(const BigComplex& lambda, const Precision& prec)
{
    mpfr_prec_t wp = std::max<mpfr_prec_t>(lambda.prec(), prec.total());
    BigComplex l = lambda.at(wp);
    BigComplex one = complex_one(wp);
    BigFloat tiny = BigFloat::pow2(-prec.bits + 4, 64);
    if (l.abs() < tiny || (one - l).abs() < tiny)
        throw SingularFiber("j_of_lambda: lambda at 0 or 1");
    BigComplex num = one - l + l * l;
    BigComplex num3 = num * num * num;
    BigComplex den = l * (one - l);
    return num3 * 256L / (den * den);
}

std::vector<mpz_class> j_q_coefficients(size_t n_terms)
{
    static std::mutex mtx;
    static std::vector<mpz_class> cache;

    std::lock_guard<std::mutex> lock(mtx);
    if (cache.size() < n_terms) {
        size_t L = n_terms + 2;

        /* E4 = 1 + 240 sum sigma_3(n) q^n */
        std::vector<mpz_class> e4(L, 0);
        e4[0] = 1;
        for (size_t d = 1; d < L; ++d) {
            mpz_class d3 = mpz_class(d) * (long)d * (long)d;
            for (size_t m = d; m < L; m += d)
                e4[m] += d3;
        }
        for (size_t n = 1; n < L; ++n)
            e4[n] *= 240;

        auto mul_trunc = [L](const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
            std::vector<mpz_class> c(L, 0);
            for (size_t i = 0; i < L; ++i) {
                if (a[i] == 0)
                    continue;
                for (size_t j = 0; i + j < L; ++j)
                    if (b[j] != 0)
                        c[i + j] += a[i] * b[j];
            }
            return c;
        };

        /* Delta/q = prod (1-q^n)^24 */
        std::vector<mpz_class> p(L, 0);
        p[0] = 1;
        for (size_t n = 1; n < L; ++n)
            for (size_t i = L; i-- > n;)
                p[i] -= p[i - n];
        std::vector<mpz_class> p2 = mul_trunc(p, p);
        std::vector<mpz_class> p4 = mul_trunc(p2, p2);
        std::vector<mpz_class> p8 = mul_trunc(p4, p4);
        std::vector<mpz_class> p16 = mul_trunc(p8, p8);
        std::vector<mpz_class> disc = mul_trunc(p16, p8);

        /* 1 / (Delta/q), well defined since the constant term is 1 */
        std::vector<mpz_class> inv(L, 0);
        inv[0] = 1;
        for (size_t n = 1; n < L; ++n) {
            mpz_class acc = 0;
            for (size_t k = 1; k <= n; ++k)
                acc += disc[k] * inv[n - k];
            inv[n] = -acc;
        }

        std::vector<mpz_class> jq = mul_trunc(mul_trunc(mul_trunc(e4, e4), e4), inv);
        if (jq[0] != 1 || jq[1] != 744 || (L > 2 && jq[2] != 196884))
            throw Error("j_q_coefficients: self-check failed");

        cache.assign(jq.begin() + 1, jq.end());
    }
    return std::vector<mpz_class>(cache.begin(), cache.begin() + n_terms);
}

BigComplex j_q_expansion(const TauPoint& tau, const Precision& prec)
{
    double y = tau.im().to_double();
    if (y < 0.8)
        throw PrecisionLoss("j_q_expansion: needs Im(tau) >= 0.8");
    double need = (double)(prec.bits + prec.guard_bits + 16) * M_LN2;
    size_t n = 1;
    while (4.0 * M_PI * std::sqrt((double)n) - 2.0 * M_PI * y * (double)n > -need) {
        if (++n > 2000000)
            throw NonConvergence("j_q_expansion: term bound blew up");
    }

    std::vector<mpz_class> c = j_q_coefficients(n);
    mpfr_prec_t wp = prec.total();
    BigComplex qhat = exp((tau.value.at(wp) * BigFloat::pi(wp) * 2L).mul_i());
    BigComplex acc(BigFloat(c.back(), wp));
    for (size_t k = c.size() - 1; k-- > 0;)
        acc = acc * qhat + BigComplex(BigFloat(c[k], wp));
    return complex_one(wp) / qhat + acc;
}

BigComplex j_of_tau(const TauPoint& tau, const Precision& prec)
{
    require_im_above_cutoff(tau);
    ReducedTau rd = reduce_to_standard(tau);
    BigComplex lam = lambda_of_tau(rd.tau, prec);
    BigComplex j = j_of_lambda(lam, prec);
    BigComplex check = j_q_expansion(rd.tau, prec);
    BigFloat scale = max(j.abs(), BigFloat(1L, j.prec()));
    if (!((j - check).abs() <= BigFloat::pow2(-prec.bits + 16, 64) * scale))
        throw PrecisionLoss("j_of_tau: q-expansion crosscheck failed");
    return j;
}

ReducedTau reduce_to_standard(const TauPoint& tau)
{
    BigComplex t = tau.value;
    mpfr_prec_t wp = t.prec();
    UnimodularMatrix g;
    BigFloat one(1L, wp);
    bool done = false;
    for (long iter = 0; iter < 100000 && !done; ++iter) {
        mpz_class n = t.real().round_to_mpz();
        if (n != 0) {
            if (!n.fits_slong_p())
                throw Error("reduce_to_standard: translation out of range");
            t = BigComplex(t.real() - BigFloat(n, wp), t.imag());
            g = UnimodularMatrix::translation(-n.get_si()).compose(g);
        }
        if (t.norm_sq() < one) {
            t = -(complex_one(wp) / t);
            g = UnimodularMatrix::inversion().compose(g);
        } else {
            done = true;
        }
    }
    if (!done)
        throw NonConvergence("reduce_to_standard: no convergence");
    return {TauPoint(t), g};
}

ReducedTauB reduce_to_B(const TauPoint& tau)
{
    ReducedTau rd = reduce_to_standard(tau);
    const auto& reps = coset_representatives();
    for (int i = 0; i < 6; ++i) {
        UnimodularMatrix cand = reps[i].compose(rd.g);
        if (cand.is_level_two()) {
            BigComplex tb = i == 0 ? rd.tau.value : reps[i].apply(rd.tau.value);
            return {TauPoint(tb), cand, DomainTag{DomainTag::Domain::LevelTwo, i}};
        }
    }
    /* reps hit every class of SL2(F2), so one always matches */
    throw Error("reduce_to_B: no coset representative matched");
}

TauPoint tau_of_lambda(const BigComplex& lambda0, const Precision& prec)
{
    mpfr_prec_t wp = prec.total();
    BigComplex l = lambda0.at(wp);
    BigComplex one = complex_one(wp);
    BigFloat tiny = BigFloat::pow2(-prec.bits + 4, 64);
    if (l.abs() < tiny || (one - l).abs() < tiny)
        throw SingularFiber("tau_of_lambda: lambda at 0 or 1");

    BigComplex s1 = sqrt(one - l);
    BigComplex s2 = sqrt(l);
    BigFloat tol = BigFloat::pow2(-prec.bits + 32, 64) * max(l.abs(), BigFloat(1L, wp));

    for (int i = 0; i < 4; ++i) {
        BigComplex a = (i & 1) ? -s1 : s1;
        BigComplex b = (i & 2) ? -s2 : s2;
        BigComplex ma, mb;
        try {
            ma = agm(one, a, prec);
            mb = agm(one, b, prec);
        } catch (const Error&) {
            continue;
        }
        if (mb.is_zero())
            continue;
        BigComplex t = (ma / mb).mul_i();
        if (!(t.imag() > 0))
            continue;
        try {
            ReducedTauB rb = reduce_to_B(TauPoint(t));
            BigComplex back = lambda_of_tau(rb.tau, prec);
            if ((back - l).abs() <= tol)
                return rb.tau;
        } catch (const Error&) {
            continue;
        }
    }
    throw PrecisionLoss("tau_of_lambda: no branch reproduced lambda");
}

std::array<BigComplex, 6> mobius_lambda_orbit(const BigComplex& lambda)
{
    mpfr_prec_t wp = lambda.prec();
    BigComplex one = complex_one(wp);
    BigComplex lm1 = lambda - one;
    return {lambda,        lambda / lm1, one - lambda,
            -(one / lm1),  lm1 / lambda, one / lambda};
}

} // namespace cmscan
