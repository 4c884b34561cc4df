#include "cmscan/heights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "cmscan/lattice.hpp"
#include "cmscan/modular.hpp"

namespace cmscan {

namespace {

BigFloat log_plus(const BigFloat& a, mpfr_prec_t wp)
{
    if (a > 1L)
        return log(a.at(wp));
    return BigFloat(0L, wp);
}

BigFloat mahler_from_roots(const mpz_class& lead, const std::vector<BigComplex>& roots,
                           mpfr_prec_t wp)
{
    BigFloat s = log(BigFloat(lead, wp));
    for (const auto& r : roots)
        s += log_plus(r.abs(), wp);
    return s / BigFloat(static_cast<long>(roots.size()), wp);
}

/* Simultaneous iteration z_k <- z_k - p(z_k) / (lead * prod (z_k - z_j)).
 * Deterministic start on a circle of the geometric-mean root radius. */
std::vector<BigComplex> durand_kerner(const IntPolynomial& p, mpfr_prec_t wp)
{
    long n = p.degree();
    std::vector<BigComplex> z;
    if (n == 0)
        return z;

    BigFloat lead(p.lead(), wp);
    BigFloat maxc(0L, wp);
    for (long i = 0; i < n; ++i) {
        BigFloat ci(mpz_class(::abs(p.coeff(i))), wp);
        if (ci > maxc)
            maxc = ci;
    }
    BigFloat cauchy = BigFloat(1L, wp) + maxc / lead;
    BigFloat rho(1L, wp);
    if (p.coeff(0) != 0) {
        rho = exp(log(BigFloat(mpz_class(::abs(p.coeff(0))), wp) / lead) /
                  BigFloat(n, wp));
        if (rho > cauchy)
            rho = cauchy;
        if (BigFloat(0.125, wp) > rho)
            rho = BigFloat(0.125, wp);
    }

    const BigFloat pi = BigFloat::pi(wp);
    z.reserve(n);
    for (long k = 0; k < n; ++k) {
        BigFloat theta = pi * (2L * k) / BigFloat(n, wp) + BigFloat(0.7, wp);
        z.push_back(BigComplex(rho * cos(theta), rho * sin(theta)));
    }

    const BigFloat step_tol = BigFloat::pow2(-static_cast<long>(wp) + 32, 64);
    const long maxit = 200 + 4 * n + static_cast<long>(wp) / 16;
    for (long it = 0; it < maxit; ++it) {
        BigFloat worst(0L, wp);
        for (long k = 0; k < n; ++k) {
            BigComplex num = p.eval(z[k], wp);
            BigComplex den(lead);
            for (long j = 0; j < n; ++j)
                if (j != k)
                    den = den * (z[k] - z[j]);
            if (den.is_zero()) {
                z[k] += BigComplex(BigFloat(0.001953125, wp), BigFloat(0.0009765625, wp));
                worst = BigFloat(1L, wp);
                continue;
            }
            BigComplex delta = num / den;
            z[k] = z[k] - delta;
            BigFloat rel = delta.abs() / max(BigFloat(1L, wp), z[k].abs());
            if (rel > worst)
                worst = rel;
        }
        if (step_tol > worst)
            return z;
    }
    throw RootIsolationFailure("durand_kerner: no convergence at this precision");
}

} // namespace

std::vector<BigComplex> polynomial_roots(const IntPolynomial& p, const Precision& prec)
{
    long n = p.degree();
    if (n == 0)
        return {};
    mpfr_prec_t wp1 = prec.total();
    mpfr_prec_t wp2 = 2 * prec.bits + prec.guard_bits;
    std::vector<BigComplex> r1 = durand_kerner(p, wp1);
    std::vector<BigComplex> r2 = durand_kerner(p, wp2);

    const BigFloat tol = BigFloat::pow2(-prec.bits / 2, 64);
    std::vector<BigComplex> matched;
    matched.reserve(n);
    std::vector<bool> used(n, false);
    for (long i = 0; i < n; ++i) {
        long best = -1;
        BigFloat bestd(wp2);
        for (long j = 0; j < n; ++j) {
            if (used[j])
                continue;
            BigFloat dist = (r1[i] - r2[j]).abs();
            if (best < 0 || bestd > dist) {
                best = j;
                bestd = dist;
            }
        }
        BigFloat scale = max(BigFloat(1L, wp2), r1[i].abs());
        if (best < 0 || bestd > tol * scale)
            throw RootIsolationFailure("polynomial_roots: precisions disagree");
        used[best] = true;
        matched.push_back(r2[best]);
    }
    return matched;
}

BigFloat weil_height(const AlgebraicNumber& alpha, const Precision& prec)
{
    const IntPolynomial& p = alpha.minpoly();
    mpfr_prec_t wp = prec.total();
    long deg = p.degree();

    if (deg == 1) {
        mpz_class m = ::abs(p.coeff(0));
        if (p.coeff(1) > m)
            m = p.coeff(1);
        return log(BigFloat(m, wp));
    }
    if (deg == 2) {
        mpz_class a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
        mpz_class disc = b * b - 4 * a * c;
        if (disc < 0) {
            /* conjugate pair, |root|^2 = c/a: Mahler measure is max(a, c) */
            mpz_class m = a > c ? a : c;
            return log(BigFloat(m, wp)) / 2L;
        }
        BigFloat sq = sqrt(BigFloat(disc, wp));
        BigFloat bn(b, wp);
        BigFloat two_a(mpz_class(2 * a), wp);
        BigFloat r1 = (-bn + sq) / two_a;
        BigFloat r2 = (-bn - sq) / two_a;
        BigFloat m = BigFloat(a, wp) * max(BigFloat(1L, wp), abs(r1)) *
                     max(BigFloat(1L, wp), abs(r2));
        return log(m) / 2L;
    }

    std::vector<BigComplex> roots = polynomial_roots(p, prec);
    return mahler_from_roots(p.lead(), roots, wp);
}

DHeightValue d_height(const AlgebraicNumber& alpha, int d)
{
    if (d < 1 || d > 2)
        throw UnsupportedDegree("d_height: only d in {1, 2} is supported");
    const IntPolynomial& p = alpha.minpoly();
    long deg = p.degree();
    if (deg == 1) {
        /* rational p/q in lowest terms: max(|p|, |q|) at every d */
        mpz_class m = ::abs(p.coeff(0));
        if (p.coeff(1) > m)
            m = p.coeff(1);
        return DHeightValue{false, m};
    }
    if (deg > d)
        return DHeightValue{true, 0};
    return DHeightValue{false, p.max_abs_coeff()};
}

HeightInequalityReport check_height_inequalities(const AlgebraicNumber& alpha)
{
    const IntPolynomial& p = alpha.minpoly();
    if (p.degree() != 2)
        throw NotImaginaryQuadratic("check_height_inequalities: degree must be 2");
    mpz_class a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
    mpz_class disc = b * b - 4 * a * c;
    if (disc >= 0)
        throw NotImaginaryQuadratic("check_height_inequalities: real quadratic");

    const mpfr_prec_t wp = 128;
    HeightInequalityReport rep;

    mpz_class ab = ::abs(b);
    rep.h2 = a;
    if (ab > rep.h2)
        rep.h2 = ab;
    if (c > rep.h2)
        rep.h2 = c;
    rep.h_sq = a > c ? a : c;

    /* |alpha|^2 = c/a against C1^2 H2^2 with C1^2 = (3 + sqrt5)/2, exactly:
     * 2c - 3a H2^2 <= sqrt5 a H2^2 */
    mpz_class ah2sq = a * rep.h2 * rep.h2;
    mpz_class t = 2 * c - 3 * ah2sq;
    rep.abs_ok = t <= 0 || t * t <= 5 * ah2sq * ah2sq;
    BigFloat c1 = (BigFloat(1L, wp) + sqrt(BigFloat(5L, wp))) / 2L;
    rep.abs_ratio = sqrt(BigFloat(mpq_class(c, a), wp)) / (c1 * BigFloat(rep.h2, wp));

    /* Re alpha = -b / (2a) in lowest terms */
    mpz_class two_a = 2 * a;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), ab.get_mpz_t(), two_a.get_mpz_t());
    rep.h2_re = (ab > two_a ? ab : two_a) / g;
    rep.re_ok = rep.h2_re <= 2 * rep.h2;
    rep.re_ratio = BigFloat(mpq_class(rep.h2_re, 2 * rep.h2), wp);

    /* Im alpha = sqrt(4ac - b^2) / (2a): rational when the radicand is a
     * perfect square, else annihilated by 4a^2 X^2 - (4ac - b^2) */
    mpz_class m = -disc;
    if (mpz_perfect_square_p(m.get_mpz_t())) {
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), m.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), s.get_mpz_t(), two_a.get_mpz_t());
        rep.h2_im = (s > two_a ? s : two_a) / g;
    } else {
        mpz_class fa = 4 * a * a;
        mpz_gcd(g.get_mpz_t(), fa.get_mpz_t(), m.get_mpz_t());
        rep.h2_im = (fa > m ? fa : m) / g;
    }
    mpz_class h2sq = rep.h2 * rep.h2;
    rep.im_ok = rep.h2_im <= 4 * h2sq;
    rep.im_ratio = BigFloat(mpq_class(rep.h2_im, 4 * h2sq), wp);

    rep.equiv_ok = rep.h2 <= 4 * rep.h_sq;
    rep.equiv_ratio = BigFloat(mpq_class(rep.h2, 4 * rep.h_sq), wp);
    return rep;
}

IntPolynomial minpoly_from_approx(const BigComplex& x, int max_degree, const Precision& prec)
{
    if (max_degree < 1)
        throw Error("minpoly_from_approx: max_degree must be positive");

    const mpfr_prec_t wp = 2 * prec.total();
    const BigFloat tol = BigFloat::pow2(-prec.bits / 2, 64);

    std::vector<BigComplex> powers;
    powers.reserve(max_degree + 1);
    powers.push_back(BigComplex(BigFloat(1L, wp)));
    BigComplex xw = x.at(wp);

    for (int m = 1; m <= max_degree; ++m) {
        powers.push_back(powers.back() * xw);
        /* Bound balanced against tol so that accidental near-relations sit
         * well above it: (m+2) log2 B = bits/4 while tol = 2^(-bits/2). */
        long ebits = std::max<long>(16, prec.bits / (4 * (m + 2)));
        mpz_class bound = 1;
        mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), ebits);

        std::optional<std::vector<mpz_class>> rel =
            complex_relation(powers, bound, tol, prec);
        if (!rel)
            continue;
        IntPolynomial cand(*rel);
        if (cand.degree() < 1)
            continue;
        BigFloat resid = cand.eval(xw, wp).abs();
        if (!(resid < tol))
            continue;
        return cand;
    }
    throw NoRelationFound("minpoly_from_approx: no verified annihilator up to max_degree");
}

namespace {

/* Conjugate orbit of a discriminant: every anharmonic image of lambda at
 * every reduced-form root, deduplicated.  cand_index[f][k] locates form
 * f's coset-k value inside cands. */
struct OrbitSet {
    std::vector<QuadraticForm> forms;
    std::vector<BigComplex> cands;
    std::vector<std::array<long, 6>> cand_index;
    long wbits = 0;
};

OrbitSet compute_orbit(const Discriminant& d, long wbits)
{
    OrbitSet os;
    os.wbits = wbits;
    os.forms = reduced_forms(d);
    Precision wprec(wbits, 32);
    const BigFloat dedupe = BigFloat::pow2(-wbits / 4, 64);
    for (const auto& f : os.forms) {
        TauPoint tau = cm_tau(f, wprec);
        BigComplex lam = lambda_of_tau(tau, wprec);
        std::array<BigComplex, 6> orb = mobius_lambda_orbit(lam);
        std::array<long, 6> idx{};
        for (int k = 0; k < 6; ++k) {
            long found = -1;
            for (size_t i = 0; i < os.cands.size(); ++i) {
                BigFloat scale = max(BigFloat(1L, wbits),
                                     max(os.cands[i].abs(), orb[k].abs()));
                if (dedupe * scale > (os.cands[i] - orb[k]).abs()) {
                    found = static_cast<long>(i);
                    break;
                }
            }
            if (found < 0) {
                os.cands.push_back(orb[k]);
                found = static_cast<long>(os.cands.size()) - 1;
            }
            idx[k] = found;
        }
        os.cand_index.push_back(idx);
    }
    return os;
}

/* Ascending coefficients of the monic product prod (X - r) over roots. */
std::vector<BigComplex> monic_product(const std::vector<BigComplex>& roots, mpfr_prec_t wp)
{
    std::vector<BigComplex> c;
    c.push_back(BigComplex(BigFloat(1L, wp)));
    for (const auto& r : roots) {
        std::vector<BigComplex> nc(c.size() + 1, BigComplex(wp));
        for (size_t i = 0; i < c.size(); ++i) {
            nc[i + 1] += c[i];
            nc[i] += c[i] * (-r);
        }
        c = std::move(nc);
    }
    return c;
}

/* Scale the monic complex coefficients by the smallest power of two that
 * makes every entry land essentially on an integer.  At a wrong scaling
 * some coefficient is an exact dyadic fraction at least 2^-kmax away from
 * every integer, while at the right one only accumulated series error
 * (far below 2^-32 at the precisions the callers size) remains; testing
 * against 2^-32 therefore picks the same k at every working precision,
 * where a loose quarter-distance test can accept a too-small k on exact
 * quarter ties.  Empty result when no k <= kmax works. */
std::vector<mpz_class> round_scaled_product(const std::vector<BigComplex>& coeffs,
                                            long kmax, mpfr_prec_t wp)
{
    const BigFloat tight = BigFloat::pow2(-32, wp);
    std::vector<BigComplex> scaled = coeffs;
    for (long k = 0; k <= kmax; ++k) {
        bool ok = true;
        std::vector<mpz_class> out;
        out.reserve(scaled.size());
        for (const auto& cc : scaled) {
            if (abs(cc.imag()) > tight) {
                ok = false;
                break;
            }
            mpz_class z = cc.real().round_to_mpz();
            BigFloat frac = abs(cc.real() - BigFloat(z, wp));
            if (frac > tight) {
                ok = false;
                break;
            }
            out.push_back(std::move(z));
        }
        if (ok)
            return out;
        for (auto& cc : scaled)
            cc = cc * 2L;
    }
    return {};
}

std::vector<mpz_class> orbit_poly_coeffs(const OrbitSet& os, long kmax)
{
    std::vector<BigComplex> mp = monic_product(os.cands, os.wbits);
    return round_scaled_product(mp, kmax, os.wbits);
}

/* Single-degree annihilator search for lam at a precision balanced against
 * the expected coefficient size e_m. */
std::optional<IntPolynomial> single_degree_search(const QuadraticForm& form, long m,
                                                  long e_m)
{
    long pm_bits = 2 * (m + 2) * (e_m + 16) + 256;
    Precision pm(std::max<long>(256, pm_bits), 32);
    Precision phi(2 * pm.bits, 32);

    TauPoint tau = cm_tau(form, phi);
    BigComplex lam = lambda_of_tau(tau, phi);

    std::vector<BigComplex> powers;
    powers.reserve(m + 1);
    powers.push_back(BigComplex(BigFloat(1L, phi.total())));
    for (long i = 1; i <= m; ++i)
        powers.push_back(powers.back() * lam);

    mpz_class bound = 1;
    mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), e_m + 16);
    BigFloat tol = BigFloat::pow2(-pm.bits / 2, 64);

    std::optional<std::vector<mpz_class>> rel = complex_relation(powers, bound, tol, pm);
    if (!rel)
        return std::nullopt;
    IntPolynomial cand(*rel);
    if (cand.degree() != m)
        return std::nullopt;
    if (!(cand.eval(lam, phi.total()).abs() < tol))
        return std::nullopt;
    return cand;
}

} // namespace

std::vector<CMLambdaData> cm_lambda_minpoly_all(const Discriminant& d, const Precision& prec)
{
    std::vector<QuadraticForm> forms = reduced_forms(d);
    const long h = static_cast<long>(forms.size());
    double sinva = 0.0;
    for (const auto& f : forms)
        sinva += 1.0 / static_cast<double>(f.a);
    double absd = static_cast<double>(d.abs());
    const long e_full =
        static_cast<long>(std::ceil(3.1415926535897932 * std::sqrt(absd) * sinva /
                                    std::log(2.0))) +
        6 * h + 96;
    const long kmax = 16 * h + 32;
    const long wbits = std::max<long>(prec.total(), e_full + kmax + 128);

    OrbitSet os = compute_orbit(d, wbits);
    const long odeg = static_cast<long>(os.cands.size());

    std::vector<mpz_class> rounded = orbit_poly_coeffs(os, kmax);
    if (rounded.empty())
        throw PrecisionLoss("cm_lambda_minpoly: orbit polynomial fails to round");

    /* verify: recompute the whole orbit at doubled precision and require
     * the identical integer polynomial */
    OrbitSet os2 = compute_orbit(d, 2 * wbits);
    if (static_cast<long>(os2.cands.size()) != odeg)
        throw PrecisionLoss("cm_lambda_minpoly: orbit size unstable across precisions");
    std::vector<mpz_class> rounded2 = orbit_poly_coeffs(os2, kmax);
    if (rounded2 != rounded)
        throw PrecisionLoss("cm_lambda_minpoly: orbit polynomial unstable across precisions");
    IntPolynomial orbit_poly(rounded);

    const BigFloat match_tol = BigFloat::pow2(-wbits / 4, 64);
    auto matches = [&](const BigComplex& u, const BigComplex& v) {
        BigFloat scale = max(BigFloat(1L, wbits), max(u.abs(), v.abs()));
        return match_tol * scale > (u - v).abs();
    };

    CMLambdaData orbit_data;
    orbit_data.annihilator = orbit_poly;
    orbit_data.exact_minimal = false;
    orbit_data.conjugates = os.cands;
    orbit_data.h_lambda = mahler_from_roots(orbit_poly.lead(), os.cands, prec.total());
    orbit_data.precision_bits = wbits;

    std::vector<CMLambdaData> out(h, orbit_data);
    std::vector<bool> assigned(h, false);

    /* minimal-degree attempts: candidate degrees h, 2h, 3h within fixed
     * dimension and precision caps; the orbit polynomial covers the rest */
    std::vector<long> degs;
    for (long m : {h, 2 * h, 3 * h}) {
        if (m < 1 || m > odeg || m + 3 > 30)
            continue;
        if (std::find(degs.begin(), degs.end(), m) == degs.end())
            degs.push_back(m);
    }
    long attempts_left = 8;

    struct FoundFactor {
        IntPolynomial poly;
        std::vector<long> root_cand_idx;
        BigFloat h_lambda;
    };
    std::vector<FoundFactor> factors;

    auto try_assign_factor = [&](long fi, const FoundFactor& fac) {
        long lam_idx = os.cand_index[fi][0];
        if (std::find(fac.root_cand_idx.begin(), fac.root_cand_idx.end(), lam_idx) ==
            fac.root_cand_idx.end())
            return false;
        CMLambdaData data;
        data.annihilator = fac.poly;
        data.exact_minimal = true;
        for (long ci : fac.root_cand_idx)
            data.conjugates.push_back(os.cands[ci]);
        data.h_lambda = fac.h_lambda;
        data.precision_bits = wbits;
        out[fi] = std::move(data);
        assigned[fi] = true;
        return true;
    };

    for (long fi = 0; fi < h; ++fi) {
        if (assigned[fi])
            continue;
        bool hit = false;
        for (const auto& fac : factors)
            if (try_assign_factor(fi, fac)) {
                hit = true;
                break;
            }
        if (hit)
            continue;

        for (long m : degs) {
            if (attempts_left == 0)
                break;
            long e_m = (e_full * m + odeg - 1) / odeg + m + 48;
            if (2 * (m + 2) * (e_m + 16) + 256 > 4096)
                continue;
            --attempts_left;
            std::optional<IntPolynomial> cand = single_degree_search(forms[fi], m, e_m);
            if (!cand)
                continue;

            /* every root of a genuine factor is one of the orbit values */
            std::vector<BigComplex> roots;
            try {
                roots = durand_kerner(*cand, wbits);
            } catch (const RootIsolationFailure&) {
                continue;
            }
            std::vector<long> idx;
            bool all_matched = true;
            for (const auto& r : roots) {
                long found = -1;
                for (long ci = 0; ci < odeg; ++ci)
                    if (matches(r, os.cands[ci])) {
                        found = ci;
                        break;
                    }
                if (found < 0 ||
                    std::find(idx.begin(), idx.end(), found) != idx.end()) {
                    all_matched = false;
                    break;
                }
                idx.push_back(found);
            }
            if (!all_matched)
                continue;

            FoundFactor fac{*cand, idx, BigFloat(prec.total())};
            std::vector<BigComplex> conj;
            for (long ci : idx)
                conj.push_back(os.cands[ci]);
            fac.h_lambda = mahler_from_roots(cand->lead(), conj, prec.total());
            factors.push_back(fac);
            if (try_assign_factor(fi, factors.back())) {
                hit = true;
                break;
            }
        }
        /* unassigned forms keep the orbit polynomial fallback */
        if (!hit)
            assigned[fi] = true;
    }
    return out;
}

CMLambdaData cm_lambda_minpoly(const CMFiber& fiber, const Precision& prec)
{
    std::vector<QuadraticForm> forms = reduced_forms(fiber.disc);
    long idx = -1;
    for (size_t i = 0; i < forms.size(); ++i)
        if (forms[i] == fiber.form)
            idx = static_cast<long>(i);
    if (idx < 0)
        throw Error("cm_lambda_minpoly: fiber form is not a reduced form of its discriminant");
    return cm_lambda_minpoly_all(fiber.disc, prec)[idx];
}

IntPolynomial j_class_polynomial(const Discriminant& d, const Precision& prec)
{
    std::vector<QuadraticForm> forms = reduced_forms(d);
    const long h = static_cast<long>(forms.size());
    double sinva = 0.0;
    for (const auto& f : forms)
        sinva += 1.0 / static_cast<double>(f.a);
    double absd = static_cast<double>(d.abs());
    const long e_j =
        static_cast<long>(std::ceil(3.1415926535897932 * std::sqrt(absd) * sinva /
                                    std::log(2.0))) +
        4 * h + 96;

    auto build = [&](long wbits) {
        Precision wprec(wbits, 32);
        std::vector<BigComplex> js;
        js.reserve(h);
        for (const auto& f : forms)
            js.push_back(j_of_tau(cm_tau(f, wprec), wprec));
        std::vector<BigComplex> mp = monic_product(js, wbits);
        return round_scaled_product(mp, 0, wbits); /* j is an algebraic integer */
    };

    const long wbits = std::max<long>(prec.total(), e_j + 128);
    std::vector<mpz_class> r1 = build(wbits);
    if (r1.empty())
        throw PrecisionLoss("j_class_polynomial: rounding margin too thin");
    std::vector<mpz_class> r2 = build(2 * wbits);
    if (r2 != r1)
        throw PrecisionLoss("j_class_polynomial: coefficients unstable across precisions");
    return IntPolynomial(r1);
}

FiberHeightReport fiber_height_report(const CMFiber& fiber, const CMLambdaData& data,
                                      const Precision& prec)
{
    const mpfr_prec_t wp = prec.total();
    FiberHeightReport rep;
    rep.class_number = class_number(fiber.disc);
    rep.deg_lambda = data.annihilator.degree();
    rep.degree_ok =
        rep.deg_lambda >= rep.class_number && (6 * rep.class_number) % rep.deg_lambda == 0;
    rep.exact_minpoly = data.exact_minimal;
    rep.h_lambda = data.h_lambda.at(wp);

    long maxac = static_cast<long>(std::max(fiber.form.a, fiber.form.c));
    rep.H_tau = sqrt(BigFloat(maxac, wp));
    BigFloat absd(static_cast<long>(fiber.disc.abs()), wp);
    rep.ratio_h_disc = rep.h_lambda / sqrt(absd);
    rep.ratio_logH_logD = log(rep.H_tau) / log(absd);
    return rep;
}

FiberHeightReport fiber_height_report(const CMFiber& fiber, const Precision& prec)
{
    if (fiber.lambda_minpoly) {
        CMLambdaData data;
        data.annihilator = *fiber.lambda_minpoly;
        data.exact_minimal = data.annihilator.degree() <= 2;
        data.conjugates = polynomial_roots(data.annihilator, prec);
        data.h_lambda =
            mahler_from_roots(data.annihilator.lead(), data.conjugates, prec.total());
        data.precision_bits = prec.bits;
        return fiber_height_report(fiber, data, prec);
    }
    return fiber_height_report(fiber, cm_lambda_minpoly(fiber, prec), prec);
}

} // namespace cmscan
