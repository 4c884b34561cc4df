#pragma once

#include <optional>
#include <vector>

#include "cmscan/modular.hpp"
#include "cmscan/numerics.hpp"
#include "cmscan/polynomial.hpp"

namespace cmscan {

/* A negative discriminant congruent to 0 or 1 mod 4.  Construction is the
 * validation; invalid values cannot exist as Discriminant objects. */
struct Discriminant {
    long long value;

    explicit Discriminant(long long v) : value(v) {
        if (v >= 0)
            throw InvalidDiscriminant("discriminant must be negative");
        long long m = ((v % 4) + 4) % 4;
        if (m != 0 && m != 1)
            throw InvalidDiscriminant("discriminant must be 0 or 1 mod 4");
    }

    long long abs() const { return -value; }

    friend bool operator==(const Discriminant& a, const Discriminant& b) {
        return a.value == b.value;
    }
};

Discriminant validate_discriminant(long long v);

/* True when the discriminant is fundamental: squarefree if 1 mod 4, or
 * 4*m with m squarefree and m = 2 or 3 mod 4. */
bool is_fundamental(const Discriminant& d);

/* Positive-definite integral binary quadratic form a*x^2 + b*x*y + c*y^2.
 * Instances are only produced in reduced shape: |b| <= a <= c, and b >= 0
 * whenever |b| = a or a = c. */
struct QuadraticForm {
    long long a, b, c;

    QuadraticForm(long long a_, long long b_, long long c_) : a(a_), b(b_), c(c_) {
        if (a <= 0 || !is_reduced(a, b, c))
            throw Error("QuadraticForm: not a reduced positive form");
    }

    static bool is_reduced(long long a, long long b, long long c) {
        long long ab = b < 0 ? -b : b;
        if (ab > a || a > c)
            return false;
        if ((ab == a || a == c) && b < 0)
            return false;
        return true;
    }

    long long disc() const { return b * b - 4 * a * c; }

    bool is_primitive() const;

    friend bool operator==(const QuadraticForm& f, const QuadraticForm& g) {
        return f.a == g.a && f.b == g.b && f.c == g.c;
    }
};

/* All primitive reduced forms of discriminant d, sorted by a ascending and
 * b descending within equal a.  One form per proper equivalence class. */
std::vector<QuadraticForm> reduced_forms(const Discriminant& d);

/* Class number h(d) = number of primitive reduced forms. */
long class_number(const Discriminant& d);

/* The root tau = (-b + i*sqrt(|d|)) / (2a) of f in the upper half plane.
 * For a reduced form it lies in the standard fundamental domain, hence in
 * the identity coset of the level-2 domain, and Im tau >= sqrt(3)/2. */
TauPoint cm_tau(const QuadraticForm& f, const Precision& prec = Precision());

/* One fiber of the Legendre family with complex multiplication: the data
 * attached to an ideal class of the order of discriminant disc.  rho_trace
 * and rho_norm describe the endomorphism rho = (disc + sqrt(disc)) / 2,
 * which satisfies rho^2 - rho_trace*rho + rho_norm = 0. */
struct CMFiber {
    Discriminant disc;
    QuadraticForm form;
    TauPoint tau;
    BigComplex lambda0;
    std::optional<IntPolynomial> lambda_minpoly;
    long long rho_trace;
    long long rho_norm;
};

/* rho = (d + sqrt(d))/2: trace d, norm (d^2 - d)/4. */
std::pair<long long, long long> rho_trace_norm(const Discriminant& d);

/* One CMFiber per reduced form of d, in reduced_forms order.  lambda0 is
 * the value of lambda at the form's root; lambda_minpoly is left empty
 * (filled in by the height layer, which knows the whole conjugate orbit). */
std::vector<CMFiber> cm_fibers(const Discriminant& d, const Precision& prec = Precision());

} // namespace cmscan
