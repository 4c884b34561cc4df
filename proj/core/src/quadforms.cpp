#include "cmscan/quadforms.hpp"

#include <cmath>
#include <numeric>

namespace cmscan {

Discriminant validate_discriminant(long long v)
{
    return Discriminant(v);
}

bool is_fundamental(const Discriminant& d)
{
    long long v = d.value;
    auto squarefree = [](long long n) {
        for (long long p = 2; p * p <= n; ++p)
            if (n % (p * p) == 0)
                return false;
        return true;
    };
    long long m = ((v % 4) + 4) % 4;
    if (m == 1)
        return squarefree(-v);
    long long q = v / 4; /* exact, v = 0 mod 4 */
    long long qm = ((q % 4) + 4) % 4;
    return (qm == 2 || qm == 3) && squarefree(-q);
}

bool QuadraticForm::is_primitive() const
{
    return std::gcd(std::gcd(a, b < 0 ? -b : b), c) == 1;
}

std::vector<QuadraticForm> reduced_forms(const Discriminant& d)
{
    long long D = d.value;
    std::vector<QuadraticForm> out;
    /* |b| <= a <= c and b^2 - 4ac = D force 3b^2 <= |D|, b = D mod 2. */
    for (long long b = (D % 2 == 0) ? 0 : 1; 3 * b * b <= -D; b += 2) {
        long long four_ac = b * b - D;
        if (four_ac % 4 != 0)
            continue;
        long long ac = four_ac / 4;
        for (long long a = b > 0 ? b : 1; a * a <= ac; ++a) {
            if (ac % a != 0)
                continue;
            long long c = ac / a;
            if (std::gcd(std::gcd(a, b), c) != 1)
                continue;
            out.emplace_back(a, b, c);
            /* (a,-b,c) is a distinct class unless b = 0, |b| = a, or a = c */
            if (b > 0 && b < a && a < c)
                out.emplace_back(a, -b, c);
        }
    }
    std::sort(out.begin(), out.end(), [](const QuadraticForm& f, const QuadraticForm& g) {
        if (f.a != g.a)
            return f.a < g.a;
        return f.b > g.b;
    });
    return out;
}

long class_number(const Discriminant& d)
{
    return static_cast<long>(reduced_forms(d).size());
}

TauPoint cm_tau(const QuadraticForm& f, const Precision& prec)
{
    if (f.disc() >= 0)
        throw InvalidDiscriminant("cm_tau: form is not positive definite");
    mpfr_prec_t wp = prec.total();
    BigFloat root = sqrt(BigFloat(mpz_class(static_cast<long>(-f.disc())), wp));
    BigFloat den(static_cast<long>(2 * f.a), wp);
    return TauPoint(BigComplex(BigFloat(static_cast<long>(-f.b), wp) / den, root / den));
}

std::pair<long long, long long> rho_trace_norm(const Discriminant& d)
{
    return {d.value, (d.value * d.value - d.value) / 4};
}

std::vector<CMFiber> cm_fibers(const Discriminant& d, const Precision& prec)
{
    auto [tr, nm] = rho_trace_norm(d);
    std::vector<CMFiber> out;
    for (const QuadraticForm& f : reduced_forms(d)) {
        TauPoint tau = cm_tau(f, prec);
        BigComplex lam = lambda_of_tau(tau, prec);
        out.push_back(CMFiber{d, f, tau, lam, std::nullopt, tr, nm});
    }
    return out;
}

} // namespace cmscan
