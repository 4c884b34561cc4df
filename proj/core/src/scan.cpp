#include "cmscan/scan.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "cmscan/modular.hpp"

namespace cmscan {

namespace {

using ordered_json = nlohmann::ordered_json;

long decimal_digits(long bits)
{
    return static_cast<long>(static_cast<double>(bits) * 0.30103) + 3;
}

ordered_json decimal_json(const std::string& value, long precision_bits)
{
    ordered_json o;
    o["value"] = value;
    o["precision"] = precision_bits;
    return o;
}

ordered_json complex_json(const std::string& re, const std::string& im, long precision_bits)
{
    ordered_json o;
    o["re"] = decimal_json(re, precision_bits);
    o["im"] = decimal_json(im, precision_bits);
    return o;
}

ordered_json certificate_json(const RelationCertificate& cert)
{
    ordered_json o;
    ordered_json u = ordered_json::array();
    ordered_json v = ordered_json::array();
    for (const auto& x : cert.u)
        u.push_back(x.get_str());
    for (const auto& x : cert.v)
        v.push_back(x.get_str());
    o["u"] = std::move(u);
    o["v"] = std::move(v);
    o["m1"] = cert.m1.get_str();
    o["m2"] = cert.m2.get_str();
    o["residual"] = decimal_json(cert.residual.to_string(24), cert.precision_bits);
    o["precision_bits"] = cert.precision_bits;
    o["h2_bound"] = cert.h2_bound.get_str();
    o["disc"] = cert.disc;
    return o;
}

ordered_json record_json(const ScanRecord& rec, bool with_timings)
{
    ordered_json j;
    j["disc"] = rec.disc;
    ordered_json form;
    form["a"] = rec.a;
    form["b"] = rec.b;
    form["c"] = rec.c;
    j["form"] = std::move(form);
    if (!rec.tau_re.empty())
        j["tau"] = complex_json(rec.tau_re, rec.tau_im, rec.value_precision);
    else
        j["tau"] = nullptr;
    if (!rec.lambda0_re.empty())
        j["lambda0"] = complex_json(rec.lambda0_re, rec.lambda0_im, rec.value_precision);
    else
        j["lambda0"] = nullptr;
    if (rec.lambda_minpoly) {
        ordered_json coeffs = ordered_json::array();
        for (const auto& c : *rec.lambda_minpoly)
            coeffs.push_back(c.get_str());
        j["lambda_minpoly"] = std::move(coeffs);
        j["lambda_minpoly_exact"] = rec.lambda_minpoly_exact;
    } else {
        j["lambda_minpoly"] = nullptr;
        j["lambda_minpoly_exact"] = nullptr;
    }
    j["h_lambda"] = rec.h_lambda.empty() ? ordered_json(nullptr)
                                         : decimal_json(rec.h_lambda, rec.value_precision);
    j["H_tau"] = rec.H_tau.empty() ? ordered_json(nullptr)
                                   : decimal_json(rec.H_tau, rec.value_precision);
    j["class_number"] = rec.class_number;
    j["budget_used"] = rec.budget_used.get_str();
    j["result"] = rec.result ? certificate_json(*rec.result) : ordered_json(nullptr);
    if (!rec.orbit_lambdas.empty()) {
        ordered_json orb = ordered_json::array();
        for (const auto& pair : rec.orbit_lambdas)
            orb.push_back(complex_json(pair[0], pair[1], rec.value_precision));
        j["orbit_lambdas"] = std::move(orb);
    }
    j["note"] = rec.note.empty() ? ordered_json(nullptr) : ordered_json(rec.note);
    j["error"] = rec.error.empty() ? ordered_json(nullptr) : ordered_json(rec.error);
    if (with_timings)
        j["total_ms"] = rec.total_ms;
    return j;
}

ordered_json section_json(const Section& s)
{
    /* fold the content ratio back in so the emitted integer lists denote
     * exactly the section's x = scale * x_num / x_den */
    ordered_json o;
    ordered_json num = ordered_json::array();
    ordered_json den = ordered_json::array();
    for (const auto& c : s.x_num.coeffs())
        num.push_back(mpz_class(c * s.scale.get_num()).get_str());
    for (const auto& c : s.x_den.coeffs())
        den.push_back(mpz_class(c * s.scale.get_den()).get_str());
    o["x_num"] = std::move(num);
    o["x_den"] = std::move(den);
    o["branch"] = s.branch > 0 ? "+" : "-";
    return o;
}

long effective_tol_exp(const ScanConfig& cfg)
{
    return cfg.tol_exp > 0 ? cfg.tol_exp : cfg.precision_bits / 2;
}

/* Recompute the fiber and logarithms from scratch at 4x precision and
 * check the certificate residual there.  Any failure withdraws the
 * candidate rather than aborting the scan. */
bool escalation_check(const RelationCertificate& cert, const QuadraticForm& form,
                      const ScanConfig& cfg, const BigFloat& tol)
{
    try {
        Precision p4(4 * cfg.precision_bits, cfg.guard_bits);
        TauPoint tau4 = cm_tau(form, p4);
        BigComplex lam4 = lambda_of_tau(tau4, p4);
        std::vector<LatticeCoordinate> zs4;
        zs4.reserve(cfg.sections.size());
        for (const Section& s : cfg.sections)
            zs4.push_back(elliptic_log(specialize(s, lam4, p4), tau4, p4));
        return tol > relation_residual(cert, zs4, tau4, p4);
    } catch (const Error&) {
        return false;
    }
}

std::vector<ScanRecord> scan_one_disc(long long n, const ScanConfig& cfg)
{
    std::vector<ScanRecord> recs;
    Precision prec(cfg.precision_bits, cfg.guard_bits);
    const BigFloat tol = BigFloat::pow2(-effective_tol_exp(cfg), 64);
    const long digits = decimal_digits(cfg.precision_bits);

    Discriminant d(-n);
    std::vector<CMFiber> fibers;
    std::vector<CMLambdaData> data;
    try {
        fibers = cm_fibers(d, prec);
        data = cm_lambda_minpoly_all(d, prec);
    } catch (const Error& e) {
        ScanRecord rec;
        rec.disc = -n;
        rec.value_precision = cfg.precision_bits;
        rec.error = std::string("fiber setup: ") + e.what();
        recs.push_back(std::move(rec));
        return recs;
    }

    for (size_t i = 0; i < fibers.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        const CMFiber& fib = fibers[i];
        ScanRecord rec;
        rec.disc = -n;
        rec.a = fib.form.a;
        rec.b = fib.form.b;
        rec.c = fib.form.c;
        rec.value_precision = cfg.precision_bits;
        rec.tau_re = fib.tau.re().to_string(digits);
        rec.tau_im = fib.tau.im().to_string(digits);
        rec.lambda0_re = fib.lambda0.real().to_string(digits);
        rec.lambda0_im = fib.lambda0.imag().to_string(digits);
        rec.class_number = static_cast<long>(fibers.size());
        rec.lambda_minpoly = data[i].annihilator.coeffs();
        rec.lambda_minpoly_exact = data[i].exact_minimal;
        rec.h_lambda = data[i].h_lambda.to_string(digits);
        long maxac = static_cast<long>(std::max(fib.form.a, fib.form.c));
        rec.H_tau = sqrt(BigFloat(maxac, prec.total())).to_string(digits);
        if (cfg.all_orbit) {
            std::array<BigComplex, 6> orb = mobius_lambda_orbit(fib.lambda0);
            for (int k = 1; k < 6; ++k)
                rec.orbit_lambdas.push_back(
                    {orb[k].real().to_string(digits), orb[k].imag().to_string(digits)});
        }

        std::vector<LatticeCoordinate> zs;
        zs.reserve(cfg.sections.size());
        try {
            for (const Section& s : cfg.sections)
                zs.push_back(elliptic_log(specialize(s, fib.lambda0, prec), fib.tau, prec));
        } catch (const PoleOfSection& e) {
            rec.note = std::string("skipped: ") + e.what();
        } catch (const Error& e) {
            rec.error = std::string("section specialization: ") + e.what();
        }

        if (zs.size() == cfg.sections.size() && rec.error.empty()) {
            double hl = mpfr_get_d(data[i].h_lambda.raw(), MPFR_RNDN);
            mpz_class budget = relation_search_budget(
                d, static_cast<int>(cfg.sections.size()), hl, cfg.precision_bits, cfg.budget);
            if (budget > cfg.budget_cap)
                budget = cfg.budget_cap;
            rec.budget_used = budget;
            try {
                std::optional<RelationCertificate> cert =
                    find_endomorphism_relation(zs, fib, budget, tol, prec);
                if (cert) {
                    if (escalation_check(*cert, fib.form, cfg, tol))
                        rec.result = std::move(cert);
                    else
                        rec.note = "candidate withdrawn: failed recomputed 4x re-verification";
                }
            } catch (const Error& e) {
                rec.error = std::string("relation search: ") + e.what();
            }
        }

        if (cfg.with_timings) {
            auto t1 = std::chrono::steady_clock::now();
            rec.total_ms =
                std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
                    .count();
        }
        recs.push_back(std::move(rec));
    }
    return recs;
}

void validate_config(const ScanConfig& cfg)
{
    if (cfg.d_max < 3)
        throw Error("scan config: d_max must be at least 3");
    if (cfg.sections.empty())
        throw Error("scan config: at least one section is required");
    if (cfg.precision_bits < 64)
        throw Error("scan config: precision must be at least 64 bits");
    if (cfg.tol_exp < 0)
        throw Error("scan config: tol exponent must be nonnegative");
    if (effective_tol_exp(cfg) > cfg.precision_bits - 32)
        throw Error("scan config: tolerance below the verifiable floor at this precision");
    if (cfg.budget_cap < 1)
        throw Error("scan config: budget cap must be positive");
    if (cfg.jobs < 1)
        throw Error("scan config: jobs must be positive");
}

} // namespace

std::vector<long long> valid_disc_magnitudes(long d_max)
{
    std::vector<long long> out;
    for (long long n = 3; n <= d_max; ++n)
        if (n % 4 == 0 || n % 4 == 3)
            out.push_back(n);
    return out;
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error("fit_log_slope: need at least two samples");
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double num = 0, den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    if (den == 0)
        throw Error("fit_log_slope: degenerate abscissae");
    return num / den;
}

std::vector<Section> parse_sections_json(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("sections file: ") + e.what());
    }
    if (!doc.is_array() || doc.empty())
        throw Error("sections file: expected a nonempty JSON array");

    std::vector<Section> out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("x_num") || !item.contains("branch"))
            throw Error("sections file: each entry needs x_num and branch");
        auto coeff_list = [](const nlohmann::json& arr, const char* what) {
            if (!arr.is_array() || arr.empty())
                throw Error(std::string("sections file: ") + what +
                            " must be a nonempty array of integers");
            std::vector<mpz_class> cs;
            for (const auto& v : arr) {
                if (v.is_number_integer())
                    cs.emplace_back(static_cast<long>(v.get<long long>()));
                else if (v.is_string())
                    cs.emplace_back(v.get<std::string>());
                else
                    throw Error(std::string("sections file: ") + what +
                                " entries must be integers");
            }
            return cs;
        };
        std::vector<mpz_class> num = coeff_list(item["x_num"], "x_num");
        std::vector<mpz_class> den =
            item.contains("x_den") ? coeff_list(item["x_den"], "x_den")
                                   : std::vector<mpz_class>{mpz_class(1)};
        std::string br = item["branch"].get<std::string>();
        int branch;
        if (br == "+")
            branch = 1;
        else if (br == "-" || br == "−")
            branch = -1;
        else
            throw Error("sections file: branch must be \"+\" or \"-\"");
        try {
            out.emplace_back(num, den, branch);
        } catch (const Error& e) {
            throw Error(std::string("sections file: ") + e.what());
        }
    }
    return out;
}

ScanOutcome run_scan(const ScanConfig& cfg, std::ostream& out)
{
    validate_config(cfg);
    std::vector<long long> discs = valid_disc_magnitudes(cfg.d_max);
    std::vector<std::vector<ScanRecord>> results(discs.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= discs.size())
                return;
            try {
                results[i] = scan_one_disc(discs[i], cfg);
            } catch (const std::exception& e) {
                ScanRecord rec;
                rec.disc = -discs[i];
                rec.value_precision = cfg.precision_bits;
                rec.error = std::string("scan worker: ") + e.what();
                results[i] = {std::move(rec)};
            }
        }
    };

    size_t width = std::min<size_t>(std::max(1, cfg.jobs), discs.size());
    if (width <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(width);
        for (size_t t = 0; t < width; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    ScanOutcome oc;
    for (const auto& group : results)
        for (const auto& rec : group) {
            out << record_json(rec, cfg.with_timings).dump() << '\n';
            ++oc.records;
            if (!rec.error.empty())
                ++oc.hard_errors;
        }
    std::cerr << "records: " << oc.records << '\n';
    return oc;
}

ScanOutcome verify_claims(long d_max, const Precision& prec, std::ostream& out)
{
    if (d_max < 100)
        throw Error("verify-claims: d_max must be at least 100");

    out << "disc,class_number,h_lambda,H_tau,deg_lambda\n";
    std::vector<double> lx, ly;
    BigFloat max_hratio(0L, 64);
    BigFloat max_lratio(0L, 64);
    bool divisibility_ok = true;
    const long height_limit = std::min<long>(d_max, 500);
    ScanOutcome oc;

    for (long long n : valid_disc_magnitudes(d_max)) {
        Discriminant d(-n);
        long h = class_number(d);
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(static_cast<double>(h)));
        if (n > height_limit) {
            out << -n << ',' << h << ",,,\n";
            ++oc.records;
            continue;
        }
        try {
            std::vector<CMFiber> fibers = cm_fibers(d, prec);
            std::vector<CMLambdaData> data = cm_lambda_minpoly_all(d, prec);
            for (size_t i = 0; i < fibers.size(); ++i) {
                FiberHeightReport rep = fiber_height_report(fibers[i], data[i], prec);
                out << -n << ',' << h << ',' << rep.h_lambda.to_string(17) << ','
                    << rep.H_tau.to_string(17) << ',' << rep.deg_lambda << '\n';
                ++oc.records;
                if (rep.ratio_h_disc > max_hratio)
                    max_hratio = rep.ratio_h_disc;
                if (rep.ratio_logH_logD > max_lratio)
                    max_lratio = rep.ratio_logH_logD;
                if (!rep.degree_ok)
                    divisibility_ok = false;
            }
        } catch (const Error& e) {
            out << -n << ',' << h << ",error,error,error\n";
            ++oc.hard_errors;
            (void)e;
        }
    }

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", fit_log_slope(lx, ly));
    out << "summary,class_number_exponent," << buf << ",,\n";
    out << "summary,max_h_lambda_over_sqrt_abs_disc," << max_hratio.to_string(17) << ",,\n";
    out << "summary,max_log_H_tau_over_log_abs_disc," << max_lratio.to_string(17) << ",,\n";
    out << "summary,degree_divisibility_ok," << (divisibility_ok ? "true" : "false") << ",,\n";
    return oc;
}

ScanOutcome run_example(const mpq_class& lambda0, std::ostream& out)
{
    if (lambda0 == 0 || lambda0 == 1)
        throw Error("example: lambda must avoid 0 and 1");

    Section s1(std::vector<mpz_class>{mpz_class(2)}, std::vector<mpz_class>{mpz_class(1)}, 1);
    Section s2(std::vector<mpz_class>{mpz_class(3)}, std::vector<mpz_class>{mpz_class(1)}, 1);

    ordered_json t;
    t["kind"] = "torsion_certificate";
    t["lambda"] = lambda0.get_str();
    t["section"] = section_json(s1);
    TorsionResult tr = torsion_certificate(s1, lambda0);
    if (tr.finite) {
        t["result"] = "torsion";
        t["order"] = tr.order;
    } else {
        t["result"] = "infinite_order";
    }
    out << t.dump() << '\n';

    /* exact coordinates of the second section at lambda0: y^2 = x(x-1)(x-l),
     * presented as y = y_coeff * sqrt(y_radicand) with squarefree radicand */
    mpq_class xden = s2.x_den.eval_rational(lambda0);
    if (xden == 0)
        throw Error("example: section denominator vanishes at lambda");
    mpq_class x(s2.scale * (s2.x_num.eval_rational(lambda0) / xden));
    x.canonicalize();
    mpq_class y2 = x * (x - 1) * (x - lambda0);
    ordered_json p;
    p["kind"] = "section_value";
    p["lambda"] = lambda0.get_str();
    p["section"] = section_json(s2);
    p["x"] = x.get_str();
    p["y_squared"] = y2.get_str();
    mpz_class sroot;
    long long radicand = squarefree_part(y2.get_num() * y2.get_den(), sroot);
    mpq_class ycoeff(sroot, y2.get_den());
    ycoeff.canonicalize();
    p["y_coeff"] = ycoeff.get_str();
    p["y_radicand"] = radicand;
    p["on_curve"] = (ycoeff * ycoeff * mpz_class(static_cast<long>(radicand)) == y2);
    out << p.dump() << '\n';

    ScanConfig cfg;
    cfg.d_max = 100;
    cfg.sections = {s1, s2};
    cfg.precision_bits = 256;
    cfg.jobs = 1;
    ScanOutcome oc = run_scan(cfg, out);
    oc.records += 2;
    return oc;
}

ScanOutcome print_fiber(long long disc, const std::optional<std::array<long long, 3>>& form,
                        const Precision& prec, std::ostream& out)
{
    Discriminant d(disc);
    std::vector<CMFiber> fibers = cm_fibers(d, prec);
    size_t idx = 0;
    if (form) {
        bool found = false;
        for (size_t i = 0; i < fibers.size(); ++i)
            if (fibers[i].form.a == (*form)[0] && fibers[i].form.b == (*form)[1] &&
                fibers[i].form.c == (*form)[2]) {
                idx = i;
                found = true;
                break;
            }
        if (!found)
            throw Error("fiber: the given form is not a reduced form of this discriminant");
    }
    std::vector<CMLambdaData> data = cm_lambda_minpoly_all(d, prec);

    const CMFiber& fib = fibers[idx];
    const long digits = decimal_digits(prec.bits);
    ScanRecord rec;
    rec.disc = disc;
    rec.a = fib.form.a;
    rec.b = fib.form.b;
    rec.c = fib.form.c;
    rec.value_precision = prec.bits;
    rec.tau_re = fib.tau.re().to_string(digits);
    rec.tau_im = fib.tau.im().to_string(digits);
    rec.lambda0_re = fib.lambda0.real().to_string(digits);
    rec.lambda0_im = fib.lambda0.imag().to_string(digits);
    rec.class_number = static_cast<long>(fibers.size());
    rec.lambda_minpoly = data[idx].annihilator.coeffs();
    rec.lambda_minpoly_exact = data[idx].exact_minimal;
    rec.h_lambda = data[idx].h_lambda.to_string(digits);
    long maxac = static_cast<long>(std::max(fib.form.a, fib.form.c));
    rec.H_tau = sqrt(BigFloat(maxac, prec.total())).to_string(digits);
    rec.budget_used = 0;
    out << record_json(rec, false).dump() << '\n';
    return {1, 0};
}

} // namespace cmscan
