#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cmscan/scan.hpp"

namespace {

int outcome_exit(const cmscan::ScanOutcome& oc)
{
    return oc.hard_errors > 0 ? 3 : 0;
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw cmscan::Error("cannot open sections file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

mpq_class parse_rational(const std::string& s)
{
    mpq_class q;
    try {
        q = mpq_class(s);
    } catch (const std::invalid_argument&) {
        throw cmscan::Error("not a rational number: " + s);
    }
    if (q.get_den() == 0)
        throw cmscan::Error("zero denominator: " + s);
    q.canonicalize();
    return q;
}

std::array<long long, 3> parse_form_triple(const std::string& s)
{
    std::array<long long, 3> f{};
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lld,%lld,%lld%c", &f[0], &f[1], &f[2], &tail) != 3)
        throw cmscan::Error("form must be three comma-separated integers a,b,c");
    return f;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"CM fibers of the Legendre family: scans, heights, and relation certificates"};
    app.require_subcommand(1);

    cmscan::ScanConfig cfg;
    std::string sections_path, scan_out;
    CLI::App* scan_cmd = app.add_subcommand("scan", "Scan fibers for section relations");
    scan_cmd->add_option("--dmax", cfg.d_max, "Largest |discriminant| to scan")->required();
    scan_cmd->add_option("--sections", sections_path, "JSON file with the sections")->required();
    scan_cmd->add_option("--precision", cfg.precision_bits, "Working precision in bits");
    scan_cmd->add_option("--tol-exp", cfg.tol_exp, "Residual tolerance 2^-E (default bits/2)");
    scan_cmd->add_option("--budget-cap", cfg.budget_cap, "Hard cap on the coefficient budget");
    scan_cmd->add_flag("--all-orbit", cfg.all_orbit, "Also emit the five conjugate lambda values");
    scan_cmd->add_flag("--timings", cfg.with_timings, "Add wall-clock fields (breaks byte determinism)");
    scan_cmd->add_option("--jobs", cfg.jobs, "Worker threads");
    scan_cmd->add_option("--out", scan_out, "Output path (default stdout)");

    long vc_dmax = 0;
    long vc_prec = 256;
    std::string vc_out;
    CLI::App* vc_cmd = app.add_subcommand("verify-claims", "Emit the claims table as CSV");
    vc_cmd->add_option("--dmax", vc_dmax, "Largest |discriminant| to tabulate")->required();
    vc_cmd->add_option("--precision", vc_prec, "Working precision in bits");
    vc_cmd->add_option("--out", vc_out, "Output path (default stdout)");

    std::string lambda_str = "6";
    CLI::App* ex_cmd = app.add_subcommand("example", "Run the two-section worked example");
    ex_cmd->add_option("--lambda", lambda_str, "Rational specialization point (default 6)");

    long long fib_disc = 0;
    std::string form_str;
    CLI::App* fib_cmd = app.add_subcommand("fiber", "Print one CM fiber as a record");
    fib_cmd->add_option("--disc", fib_disc, "Negative discriminant")->required();
    fib_cmd->add_option("--form", form_str, "Reduced form a,b,c (default: principal)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::ofstream ofile;
        auto select_out = [&](const std::string& path) -> std::ostream& {
            if (path.empty())
                return std::cout;
            ofile.open(path);
            if (!ofile)
                throw cmscan::Error("cannot open output file: " + path);
            return ofile;
        };

        if (scan_cmd->parsed()) {
            cfg.sections = cmscan::parse_sections_json(slurp(sections_path));
            return outcome_exit(cmscan::run_scan(cfg, select_out(scan_out)));
        }
        if (vc_cmd->parsed()) {
            cmscan::Precision prec(vc_prec, 32);
            return outcome_exit(cmscan::verify_claims(vc_dmax, prec, select_out(vc_out)));
        }
        if (ex_cmd->parsed())
            return outcome_exit(cmscan::run_example(parse_rational(lambda_str), std::cout));
        if (fib_cmd->parsed()) {
            std::optional<std::array<long long, 3>> form;
            if (!form_str.empty())
                form = parse_form_triple(form_str);
            return outcome_exit(
                cmscan::print_fiber(fib_disc, form, cmscan::Precision(256, 32), std::cout));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
