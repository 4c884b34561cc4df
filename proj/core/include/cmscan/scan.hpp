#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmscan/heights.hpp"
#include "cmscan/lattice.hpp"
#include "cmscan/legendre.hpp"

namespace cmscan {

/* Full configuration of one scan run.  tol_exp = 0 means "use bits/2".
 * with_timings adds wall-clock fields to the records and is off by default
 * so that identical configs produce identical bytes. */
struct ScanConfig {
    long d_max = 100;
    std::vector<Section> sections;
    long precision_bits = 256;
    long guard_bits = 32;
    long tol_exp = 0;
    long budget_cap = 1000000;
    BudgetConstants budget;
    bool all_orbit = false;
    bool with_timings = false;
    int jobs = 1;
};

/* One emitted row: a CM fiber, its heights, and the relation-search result.
 * Decimal fields are strings at value_precision bits; exact integers are
 * kept as mpz.  note records an expected skip (a section pole), error a
 * hard failure; only the latter affects the exit code. */
struct ScanRecord {
    long long disc = 0;
    long long a = 0, b = 0, c = 0;
    std::string tau_re, tau_im;
    std::string lambda0_re, lambda0_im;
    long value_precision = 0;
    std::optional<std::vector<mpz_class>> lambda_minpoly;
    bool lambda_minpoly_exact = false;
    std::string h_lambda;
    std::string H_tau;
    long class_number = 0;
    mpz_class budget_used;
    std::optional<RelationCertificate> result;
    std::vector<std::array<std::string, 2>> orbit_lambdas;
    std::string note;
    std::string error;
    double total_ms = 0.0;
};

struct ScanOutcome {
    long records = 0;
    long hard_errors = 0;
};

/* Negative discriminant magnitudes n <= d_max with -n = 0 or 1 mod 4,
 * ascending: 3, 4, 7, 8, 11, 12, ... */
std::vector<long long> valid_disc_magnitudes(long d_max);

/* Least-squares slope of y against x. */
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/* Parse a JSON array of sections: [{"x_num": [...], "x_den": [...],
 * "branch": "+"}].  Coefficients ascending; x_den defaults to [1];
 * branch is "+" or "-".  Throws Error on malformed input. */
std::vector<Section> parse_sections_json(const std::string& text);

/* Scan every (discriminant, reduced form) with |D| <= d_max: specialize the
 * sections, search for an endomorphism relation under the fiber budget, and
 * append one JSON record per line in (|D|, form) order.  Certificates are
 * re-verified from recomputed data at 4x precision before being kept.
 * Output bytes are independent of cfg.jobs. */
ScanOutcome run_scan(const ScanConfig& cfg, std::ostream& out);

/* CSV claims table: one row per fiber with heights for |D| <= min(d_max,
 * 500), one row per discriminant beyond that, then summary rows with the
 * fitted class-number exponent and the height ratio maxima. */
ScanOutcome verify_claims(long d_max, const Precision& prec, std::ostream& out);

/* The two constant sections x = 2 and x = 3: certify the order of the
 * first at the given rational lambda exactly, state the second's exact
 * coordinates there, then scan |D| <= 100 for relations between them. */
ScanOutcome run_example(const mpq_class& lambda0, std::ostream& out);

/* One record for a single fiber, no relation search.  Picks the form
 * matching the given (a, b, c) triple, or the principal form when absent. */
ScanOutcome print_fiber(long long disc, const std::optional<std::array<long long, 3>>& form,
                        const Precision& prec, std::ostream& out);

} // namespace cmscan
