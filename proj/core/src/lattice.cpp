#include "cmscan/lattice.hpp"

#include <algorithm>
#include <functional>

namespace cmscan {

namespace {

mpz_class ceil_to_mpz(const BigFloat& x)
{
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), x.raw(), MPFR_RNDU);
    return z;
}

/* round(num/den) for den > 0, ties toward +infinity */
mpz_class div_round(const mpz_class& num, const mpz_class& den)
{
    mpz_class q;
    mpz_class shifted = 2 * num + den;
    mpz_class twice = 2 * den;
    mpz_fdiv_q(q.get_mpz_t(), shifted.get_mpz_t(), twice.get_mpz_t());
    return q;
}

/* Exact integer LLL state (de Weger arithmetic): Gram determinants d[0..n]
 * with d[0] = 1, and scaled Gram-Schmidt coefficients lam[k][j] = d[j+1] *
 * mu[k][j].  All divisions below are exact. */
struct LLLState {
    IntMatrix b;
    IntMatrix u;
    std::vector<mpz_class> d;
    std::vector<std::vector<mpz_class>> lam;
    long kmax = 0;

    explicit LLLState(const IntMatrix& rows) : b(rows) {
        size_t n = b.size();
        u.assign(n, std::vector<mpz_class>(n, 0));
        for (size_t i = 0; i < n; ++i)
            u[i][i] = 1;
        d.assign(n + 1, 0);
        d[0] = 1;
        lam.assign(n, std::vector<mpz_class>(n, 0));
    }

    mpz_class dot(long i, long j) const {
        mpz_class s = 0;
        for (size_t t = 0; t < b[i].size(); ++t)
            s += b[i][t] * b[j][t];
        return s;
    }

    void gram_row(long k) {
        for (long j = 0; j <= k; ++j) {
            mpz_class x = dot(k, j);
            for (long i = 0; i < j; ++i) {
                x = d[i + 1] * x - lam[k][i] * lam[j][i];
                mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d[i].get_mpz_t());
            }
            if (j < k)
                lam[k][j] = x;
            else {
                d[k + 1] = x;
                if (d[k + 1] <= 0)
                    throw Error("lll_reduce: basis rows are linearly dependent");
            }
        }
    }

    void reduce_entry(long k, long l) {
        mpz_class two_lam = 2 * lam[k][l];
        if (::abs(two_lam) <= d[l + 1])
            return;
        mpz_class q = div_round(lam[k][l], d[l + 1]);
        for (size_t t = 0; t < b[k].size(); ++t)
            b[k][t] -= q * b[l][t];
        for (size_t t = 0; t < u[k].size(); ++t)
            u[k][t] -= q * u[l][t];
        lam[k][l] -= q * d[l + 1];
        for (long i = 0; i < l; ++i)
            lam[k][i] -= q * lam[l][i];
    }

    void swap_rows(long k) {
        std::swap(b[k], b[k - 1]);
        std::swap(u[k], u[k - 1]);
        for (long j = 0; j <= k - 2; ++j)
            std::swap(lam[k][j], lam[k - 1][j]);
        mpz_class lamv = lam[k][k - 1];
        mpz_class nd = d[k - 1] * d[k + 1] + lamv * lamv;
        mpz_divexact(nd.get_mpz_t(), nd.get_mpz_t(), d[k].get_mpz_t());
        for (long i = k + 1; i <= kmax; ++i) {
            mpz_class t = lam[i][k];
            mpz_class x = d[k + 1] * lam[i][k - 1] - lamv * t;
            mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d[k].get_mpz_t());
            lam[i][k] = x;
            x = nd * t + lamv * lam[i][k];
            mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), d[k + 1].get_mpz_t());
            lam[i][k - 1] = x;
        }
        d[k] = nd;
    }
};

} // namespace

IntLattice lll_reduce(const IntLattice& L, const mpq_class& delta, IntMatrix* transform)
{
    if (L.basis.empty())
        throw Error("lll_reduce: empty basis");
    size_t cols = L.basis.front().size();
    for (const auto& row : L.basis)
        if (row.size() != cols || cols == 0)
            throw Error("lll_reduce: ragged or empty rows");
    if (!(delta > mpq_class(1, 4) && delta < 1))
        throw Error("lll_reduce: delta outside (1/4, 1)");

    const mpz_class dnum = delta.get_num();
    const mpz_class dden = delta.get_den();

    LLLState st(L.basis);
    long n = static_cast<long>(L.basis.size());
    st.kmax = 0;
    st.gram_row(0);

    long k = 1;
    while (k < n) {
        if (k > st.kmax) {
            st.kmax = k;
            st.gram_row(k);
        }
        st.reduce_entry(k, k - 1);
        /* Lovasz: d[k+1] d[k-1] + lam^2 >= delta * d[k]^2, exact in integers */
        mpz_class lhs = (st.d[k + 1] * st.d[k - 1] + st.lam[k][k - 1] * st.lam[k][k - 1]) * dden;
        mpz_class rhs = st.d[k] * st.d[k] * dnum;
        if (lhs < rhs) {
            st.swap_rows(k);
            k = std::max(1L, k - 1);
        } else {
            for (long l = k - 2; l >= 0; --l)
                st.reduce_entry(k, l);
            ++k;
        }
    }

    if (transform)
        *transform = st.u;
    return IntLattice{st.b};
}

namespace {

/* Shared engine: relation search against `width` embedded value columns
 * built by `fill` (which appends the scaled columns for row i). */
std::optional<std::vector<mpz_class>> relation_search(
    size_t m, const std::function<void(size_t, std::vector<mpz_class>&)>& fill,
    const std::function<BigFloat(const std::vector<mpz_class>&, long)>& residual_at,
    const mpz_class& coeff_bound, const BigFloat& tol, const Precision& prec)
{
    if (m == 0)
        throw Error("relation search: empty input");
    if (tol < BigFloat::pow2(-prec.bits + 32, 64))
        throw PrecisionTooLow("relation search: tolerance below the precision floor");

    IntLattice lat;
    lat.basis.assign(m, {});
    for (size_t i = 0; i < m; ++i) {
        std::vector<mpz_class>& row = lat.basis[i];
        row.assign(m, 0);
        row[i] = 1;
        fill(i, row);
    }

    IntLattice red = lll_reduce(lat);

    std::optional<std::vector<mpz_class>> best;
    mpz_class best_norm = 0;
    for (const auto& row : red.basis) {
        std::vector<mpz_class> c(row.begin(), row.begin() + m);
        mpz_class cmax = 0;
        for (const auto& ci : c) {
            mpz_class a = ::abs(ci);
            if (a > cmax)
                cmax = a;
        }
        if (cmax == 0 || cmax > coeff_bound)
            continue;
        if (!(residual_at(c, prec.bits) < tol))
            continue;
        if (!(residual_at(c, 2 * prec.bits) < tol))
            continue;
        if (!best || cmax < best_norm) {
            best = c;
            best_norm = cmax;
        }
    }
    return best;
}

} // namespace

std::optional<std::vector<mpz_class>> integer_relation(const std::vector<BigFloat>& xs,
                                                       const mpz_class& coeff_bound,
                                                       const BigFloat& tol,
                                                       const Precision& prec)
{
    mpz_class scale = ceil_to_mpz(BigFloat(1L, prec.total()) / tol);
    auto fill = [&](size_t i, std::vector<mpz_class>& row) {
        BigFloat scaled = BigFloat(scale, prec.total()) * xs[i];
        row.push_back(scaled.round_to_mpz());
    };
    auto residual_at = [&](const std::vector<mpz_class>& c, long bits) {
        mpfr_prec_t wp = bits + prec.guard_bits;
        BigFloat s(0L, wp);
        for (size_t i = 0; i < xs.size(); ++i)
            s += BigFloat(c[i], wp) * xs[i].at(wp);
        return abs(s);
    };
    return relation_search(xs.size(), fill, residual_at, coeff_bound, tol, prec);
}

std::optional<std::vector<mpz_class>> complex_relation(const std::vector<BigComplex>& xs,
                                                       const mpz_class& coeff_bound,
                                                       const BigFloat& tol,
                                                       const Precision& prec)
{
    mpz_class scale = ceil_to_mpz(BigFloat(1L, prec.total()) / tol);
    auto fill = [&](size_t i, std::vector<mpz_class>& row) {
        BigFloat sc(scale, prec.total());
        row.push_back((sc * xs[i].real()).round_to_mpz());
        row.push_back((sc * xs[i].imag()).round_to_mpz());
    };
    auto residual_at = [&](const std::vector<mpz_class>& c, long bits) {
        mpfr_prec_t wp = bits + prec.guard_bits;
        BigComplex s(wp);
        for (size_t i = 0; i < xs.size(); ++i)
            s += xs[i].at(wp) * BigFloat(c[i], wp);
        return s.abs();
    };
    return relation_search(xs.size(), fill, residual_at, coeff_bound, tol, prec);
}

mpz_class h2_of_order_element(const mpz_class& u, const mpz_class& v, long long disc)
{
    if (v == 0) {
        mpz_class a = ::abs(u);
        return a > 1 ? a : mpz_class(1);
    }
    mpz_class D(static_cast<long>(disc));
    mpz_class A = 2 * u + v * D;
    mpz_class c0 = A * A - v * v * D;
    mpz_class c1 = -4 * A;
    mpz_class c2 = 4;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), c0.get_mpz_t(), c1.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c2.get_mpz_t());
    mpz_class m = ::abs(c0);
    if (mpz_class(::abs(c1)) > m)
        m = ::abs(c1);
    if (c2 > m)
        m = c2;
    mpz_class out;
    mpz_divexact(out.get_mpz_t(), m.get_mpz_t(), g.get_mpz_t());
    return out;
}

namespace {

BigComplex rho_of_disc(long long disc, mpfr_prec_t wp)
{
    BigFloat D(static_cast<long>(disc), wp);
    BigFloat root = sqrt(BigFloat(static_cast<long>(-disc), wp));
    return BigComplex(D / 2L, root / 2L);
}

BigFloat endo_residual(const std::vector<mpz_class>& u, const std::vector<mpz_class>& v,
                       const mpz_class& m1, const mpz_class& m2,
                       const std::vector<LatticeCoordinate>& zs, const BigComplex& tau,
                       long long disc, long bits, long guard)
{
    mpfr_prec_t wp = bits + guard;
    BigComplex rho = rho_of_disc(disc, wp);
    BigComplex s(wp);
    for (size_t i = 0; i < zs.size(); ++i) {
        BigComplex zi = zs[i].z.at(wp);
        BigComplex coeff = BigComplex(BigFloat(u[i], wp)) + rho * BigFloat(v[i], wp);
        s += coeff * zi;
    }
    s += BigComplex(BigFloat(m1, wp)) * (-1L);
    s += tau.at(wp) * BigFloat(m2, wp) * (-1L);
    return s.abs();
}

} // namespace

std::optional<RelationCertificate> find_endomorphism_relation(
    const std::vector<LatticeCoordinate>& zs, const CMFiber& fiber,
    const mpz_class& h2_budget, const BigFloat& tol, const Precision& prec)
{
    size_t n = zs.size();
    if (n == 0)
        throw Error("find_endomorphism_relation: no logarithms given");
    if (tol < BigFloat::pow2(-prec.bits + 32, 64))
        throw PrecisionTooLow("find_endomorphism_relation: tolerance below the precision floor");

    mpfr_prec_t wp = prec.total();
    long long disc = fiber.disc.value;
    BigComplex tau = fiber.tau.value.at(wp);
    BigComplex rho = rho_of_disc(disc, wp);

    std::vector<BigComplex> vals;
    vals.reserve(2 * n + 2);
    for (const auto& zc : zs)
        vals.push_back(zc.z.at(wp));
    for (const auto& zc : zs)
        vals.push_back(rho * zc.z.at(wp));
    vals.push_back(BigComplex(BigFloat(-1L, wp)));
    vals.push_back(-tau);

    mpz_class scale = ceil_to_mpz(BigFloat(1L, wp) / tol);
    size_t m = vals.size();
    IntLattice lat;
    lat.basis.assign(m, {});
    for (size_t i = 0; i < m; ++i) {
        auto& row = lat.basis[i];
        row.assign(m + 2, 0);
        row[i] = 1;
        BigFloat sc(scale, wp);
        row[m] = (sc * vals[i].real()).round_to_mpz();
        row[m + 1] = (sc * vals[i].imag()).round_to_mpz();
    }

    IntLattice red = lll_reduce(lat);

    std::optional<RelationCertificate> best;
    long best_vnz = 0;
    for (const auto& row : red.basis) {
        std::vector<mpz_class> u(row.begin(), row.begin() + n);
        std::vector<mpz_class> v(row.begin() + n, row.begin() + 2 * n);
        mpz_class m1 = row[2 * n];
        mpz_class m2 = row[2 * n + 1];
        int lead_sign = 0;
        for (size_t i = 0; i < 2 * n && lead_sign == 0; ++i) {
            const mpz_class& ci = i < n ? u[i] : v[i - n];
            if (ci != 0)
                lead_sign = ci > 0 ? 1 : -1;
        }
        if (lead_sign == 0)
            continue;
        if (lead_sign < 0) {
            for (auto& x : u)
                x = -x;
            for (auto& x : v)
                x = -x;
            m1 = -m1;
            m2 = -m2;
        }
        long vnz = 0;
        mpz_class h2 = 0;
        for (size_t i = 0; i < n; ++i) {
            if (v[i] != 0)
                ++vnz;
            mpz_class hi = h2_of_order_element(u[i], v[i], disc);
            if (hi > h2)
                h2 = hi;
        }
        if (h2 > h2_budget)
            continue;
        BigFloat r1 = endo_residual(u, v, m1, m2, zs, tau, disc, prec.bits, prec.guard_bits);
        if (!(r1 < tol))
            continue;
        BigFloat r2 = endo_residual(u, v, m1, m2, zs, tau, disc, 2 * prec.bits, prec.guard_bits);
        if (!(r2 < tol))
            continue;
        /* order by (h2, residual), then prefer plain integer relations */
        bool better = false;
        if (!best)
            better = true;
        else if (h2 != best->h2_bound)
            better = h2 < best->h2_bound;
        else if (!(r1 == best->residual))
            better = r1 < best->residual;
        else
            better = vnz < best_vnz;
        if (better) {
            best = RelationCertificate{std::move(u), std::move(v), m1, m2,
                                       r1,           prec.bits,    h2, disc};
            best_vnz = vnz;
        }
    }
    return best;
}

BigFloat relation_residual(const RelationCertificate& cert,
                           const std::vector<LatticeCoordinate>& zs,
                           const TauPoint& tau, const Precision& prec)
{
    if (zs.size() != cert.u.size() || zs.size() != cert.v.size())
        throw Error("relation_residual: size mismatch");
    return endo_residual(cert.u, cert.v, cert.m1, cert.m2, zs, tau.value, cert.disc,
                         prec.bits, prec.guard_bits);
}

namespace {

BigFloat pow_real(const BigFloat& base, double e, mpfr_prec_t wp)
{
    BigFloat ex(e, wp);
    BigFloat r(wp);
    mpfr_pow(r.raw(), base.raw(), ex.raw(), MPFR_RNDN);
    return r;
}

} // namespace

mpz_class relation_search_budget(const Discriminant& d, int n, double h_lambda,
                                 long kappa, const BudgetConstants& k)
{
    if (n < 1)
        throw Error("relation_search_budget: n must be positive");
    if (kappa < 1)
        throw Error("relation_search_budget: kappa must be positive");
    if (h_lambda < 0)
        throw Error("relation_search_budget: negative height");
    if (k.c_omega <= 0 || k.c_t <= 0 || k.c_q <= 0 || k.c_eta <= 0 || k.c_w <= 0)
        throw Error("relation_search_budget: constants must be positive");

    const mpfr_prec_t wp = 192;
    BigFloat absd(static_cast<long>(d.abs()), wp);
    BigFloat that = BigFloat(k.c_t, wp) * sqrt(absd);
    BigFloat qhat = BigFloat(k.c_q, wp) * pow_real(absd, 2.5, wp);
    BigFloat what = BigFloat(k.c_w, wp) * BigFloat(h_lambda + 1.0, wp);
    BigFloat kap(static_cast<long>(kappa), wp);
    BigFloat eta = BigFloat(k.c_eta, wp) * pow_real(kap, -k.gamma3, wp) *
                   pow_real(what, -k.gamma4, wp);
    BigFloat omega = BigFloat(k.c_omega, wp) * (kap * that + kap * log(kap));

    long e = 2 * n - 1;
    mpz_class lead;
    mpz_ui_pow_ui(lead.get_mpz_t(), static_cast<unsigned long>(2 * n),
                  static_cast<unsigned long>(e));
    BigFloat ratio = qhat / eta;
    BigFloat ratio_pow(1L, wp);
    for (long i = 0; i < e; ++i)
        ratio_pow *= ratio;
    BigFloat mfloat = BigFloat(lead, wp) * omega * sqrt(ratio_pow);
    mpz_class m = ceil_to_mpz(mfloat);
    if (m < 1)
        m = 1;
    return 4 * m * m;
}

} // namespace cmscan
