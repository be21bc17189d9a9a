#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <variant>

#include "kk/errors.hpp"
#include "kk/hankel.hpp"
#include "kk/kernels.hpp"
#include "kk/measures.hpp"
#include "kk/mittag_leffler.hpp"
#include "kk/verify.hpp"

using namespace kk;
using nlohmann::json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string, bool>;

struct Report {
    std::string command;
    json params = json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<Check> checks;
    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
};

std::string csv_cell(const Cell& c) {
    char buf[64];
    if (auto* d = std::get_if<double>(&c)) {
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    return s.find_first_of(",\"\n") == std::string::npos ? s : "\"" + std::regex_replace(s, std::regex("\""), "\"\"") + "\"";
}

json json_cell(const Cell& c) {
    if (auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
    if (auto* i = std::get_if<long long>(&c)) return *i;
    if (auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

void write_csv(std::ostream& os, const Report& r) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    if (!r.columns.empty()) {
        line(r.columns);
        for (const auto& row : r.rows) {
            std::vector<std::string> cells;
            for (const auto& c : row) cells.push_back(csv_cell(c));
            line(cells);
        }
    }
    if (!r.checks.empty()) {
        if (!r.columns.empty()) os << '\n';
        line({"criterion", "suite", "check", "value", "threshold", "pass"});
        for (const auto& c : r.checks)
            line({csv_cell((long long)c.criterion), csv_cell(c.suite), csv_cell(c.name), csv_cell(c.value),
                  csv_cell(c.threshold), csv_cell(c.pass)});
    }
}

json to_json(const Report& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json o = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = json_cell(row[i]);
        rows.push_back(o);
    }
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"criterion", c.criterion},
                          {"suite", c.suite},
                          {"name", c.name},
                          {"value", json_cell(c.value)},
                          {"threshold", c.threshold},
                          {"pass", c.pass}});
    return {{"command", r.command}, {"params", r.params}, {"rows", rows}, {"checks", checks}, {"pass", r.pass()}};
}

// ---------------------------------------------------------------------------

struct Common {
    std::uint64_t seed = 42;
    int threads = 1;
    std::string output;
    std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--threads", c.threads, "worker threads (default $KK_THREADS or 1)")->check(CLI::PositiveNumber);
    sub->add_option("--output,-o", c.output, "output file (default stdout)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

struct FamilyFlags {
    std::string family = "bergman-beta";
    int n = 2;
    std::optional<double> s_flag;
    double c = 1, m = 1, exponent = 0, a = 1, b = 0, r = 0;
    // 0 for the ball weight, 1 for the exponential families
    double s() const { return s_flag.value_or(family == "bergman-beta" ? 0.0 : 1.0); }
    std::vector<double> values;
};

void add_family(CLI::App* sub, FamilyFlags& f, bool with_model = false) {
    std::vector<std::string> names{"bergman-beta", "power-exp", "jacobi", "stretched-exp", "tabulated"};
    if (with_model) names.push_back("model");
    sub->add_option("--family", f.family, "measure family")->check(CLI::IsMember(names));
    sub->add_option("--n", f.n, "dimension n >= 2");
    sub->add_option("--s", f.s_flag, "weight parameter s (default 0 for bergman-beta, else 1)");
    sub->add_option("--c", f.c, "power-exp scale c");
    sub->add_option("--m", f.m, "power-exp / stretched-exp exponent m");
    sub->add_option("--exponent", f.exponent, "jacobi profile exponent");
    sub->add_option("--values", f.values, "tabulated moments q_0,q_1,...")->delimiter(',');
    if (with_model) {
        sub->add_option("--a", f.a, "model moments: scale a");
        sub->add_option("--b", f.b, "model moments: correction b");
        sub->add_option("--r", f.r, "model moments: power r");
    }
}

RadialMeasureFamily make_family(const FamilyFlags& f) {
    if (f.family == "bergman-beta") return BergmanBeta{f.n, f.s()};
    if (f.family == "power-exp") return PowerExp{f.c, f.m, f.n, f.s()};
    if (f.family == "jacobi") return PhiRadial{f.n, JacobiProfile{f.exponent}};
    if (f.family == "stretched-exp") return PhiRadial{f.n, StretchedExpProfile{f.s(), f.m}};
    if (f.family == "tabulated") {
        if (f.values.empty()) throw UsageError("--family tabulated needs --values");
        return Tabulated{INFINITY, f.values};
    }
    throw UsageError("family '" + f.family + "' not available here");
}

json family_params(const FamilyFlags& f) {
    json p{{"family", f.family}, {"n", f.n}};
    if (f.family == "bergman-beta") p["s"] = f.s();
    if (f.family == "power-exp") p.update({{"c", f.c}, {"m", f.m}, {"s", f.s()}});
    if (f.family == "jacobi") p["exponent"] = f.exponent;
    if (f.family == "stretched-exp") p.update({{"s", f.s()}, {"m", f.m}});
    if (f.family == "tabulated") p["values"] = f.values;
    if (f.family == "model") p.update({{"a", f.a}, {"b", f.b}, {"r", f.r}});
    return p;
}

cplx parse_complex(const std::string& text) {
    static const std::regex re(R"(^\s*([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)?\s*(?:([-+]\s*[0-9.]*(?:[eE][-+]?[0-9]+)?)i)?\s*$)");
    std::smatch m;
    if (text.empty() || !std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched))
        throw UsageError("cannot parse complex number '" + text + "'");
    double re_part = m[1].matched ? std::stod(m[1].str()) : 0.0;
    double im_part = 0;
    if (m[2].matched) {
        std::string s = std::regex_replace(m[2].str(), std::regex("\\s"), "");
        im_part = (s == "+" || s == "-") ? (s == "-" ? -1.0 : 1.0) : std::stod(s);
    }
    return {re_part, im_part};
}

// ---------------------------------------------------------------------------

struct MomentsCmd {
    FamilyFlags fam;
    std::size_t kmax = 10;
    bool check_quadrature = false;
    double quad_tol = 1e-12;
};

Report run_moments(const MomentsCmd& c) {
    Report r;
    r.command = "moments";
    r.params = family_params(c.fam);
    r.params["kmax"] = c.kmax;
    auto family = make_family(c.fam);
    MomentSequence seq(family);
    r.columns = {"k", "q_k", "log_q_k"};
    if (c.check_quadrature) {
        r.columns.insert(r.columns.end(), {"q_k_quadrature", "rel_diff"});
        r.params["quad_tol"] = c.quad_tol;
    }
    double worst = 0;
    for (std::size_t k = 0; k <= c.kmax; ++k) {
        double lq = seq.log_moment(k), q = std::exp(lq);
        try {
            q = seq.moment(k);
        } catch (const OverflowError&) {
        }
        std::vector<Cell> row{(long long)k, q, lq};
        if (c.check_quadrature) {
            double qq = moment_quadrature_oracle(family, k, c.quad_tol);
            double rel = std::abs(qq - q) / q;
            worst = std::max(worst, rel);
            row.insert(row.end(), {qq, rel});
        }
        r.rows.push_back(row);
    }
    if (c.check_quadrature) r.checks.push_back({11, "moments", "exact vs quadrature", worst, 1e-9, worst <= 1e-9});
    return r;
}

struct KernelCmd {
    FamilyFlags fam;
    std::vector<std::string> points;
    bool compare_closed = false;
    double tol = 1e-9;
};

std::optional<cplx> closed_value(const FamilyFlags& f, cplx t) {
    if (f.family == "bergman-beta") return kernel_ball_closed(f.n, f.s(), t);
    if (f.family == "jacobi") return kernel_jacobi_closed(f.n, f.exponent, t);
    if (f.family == "stretched-exp") return kernel_alpha_weight_closed(f.n, f.m, f.s(), t);
    if (f.family == "power-exp") return kernel_tyz_closed(f.n, f.m, f.c, f.s(), t);
    return std::nullopt;
}

Report run_kernel(const KernelCmd& c) {
    Report r;
    r.command = "kernel";
    r.params = family_params(c.fam);
    r.params["points"] = c.points;
    r.params["compare_closed"] = c.compare_closed;
    if (c.points.empty()) throw UsageError("kernel needs --t or --points");
    if (c.compare_closed && !closed_value(c.fam, 0.0))
        throw UsageError("no closed form for family '" + c.fam.family + "'");
    KernelSpec spec = KernelSpec::from_family(make_family(c.fam), c.fam.n);
    r.columns = {"t_re", "t_im", "series_re", "series_im"};
    if (c.compare_closed) r.columns.insert(r.columns.end(), {"closed_re", "closed_im", "rel_err"});
    double worst = 0;
    for (const auto& text : c.points) {
        cplx t = parse_complex(text);
        cplx v = kernel_series(spec, t);
        std::vector<Cell> row{t.real(), t.imag(), v.real(), v.imag()};
        if (c.compare_closed) {
            auto cl = closed_value(c.fam, t);
            double e = relative_error(v, *cl);
            worst = std::max(worst, e);
            row.insert(row.end(), {cl->real(), cl->imag(), e});
        }
        r.rows.push_back(row);
    }
    if (c.compare_closed) r.checks.push_back({0, "kernel", "closed form vs series", worst, c.tol, worst <= c.tol});
    return r;
}

struct TyzCmd {
    int n = 2;
    double m = 1, c = 1, z = 1;
    std::vector<double> s_grid;
};

Report run_tyz(const TyzCmd& c) {
    Report r;
    r.command = "tyz";
    auto grid = c.s_grid.empty() ? default_tyz_grid() : c.s_grid;
    r.params = {{"n", c.n}, {"m", c.m}, {"c", c.c}, {"z", c.z}, {"s_grid", grid}};
    r.columns = {"s", "lhs"};
    for (int j = 0; j < c.n; ++j) r.columns.push_back("partial_" + std::to_string(j));
    r.columns.push_back("residual");
    for (double s : grid) {
        auto row = tyz_residual(c.n, c.m, c.c, s, c.z);
        std::vector<Cell> cells{row.s, row.lhs};
        for (double p : row.partial_sums) cells.push_back(p);
        cells.push_back(row.residual);
        r.rows.push_back(cells);
    }
    auto fit = tyz_fit_b1(c.n, c.m, c.c, c.z, grid);
    double exact = tyz_b1_closed(c.n, c.m);
    double err = exact == 0 ? std::abs(fit.b1) * 10 : std::abs(fit.b1 / exact - 1);
    r.params["b1_fit"] = fit.b1;
    r.params["b1_fit_error_estimate"] = fit.error_estimate;
    r.params["b1_closed"] = exact;
    r.checks.push_back({4, "tyz", "fitted b1 vs closed form", err, 1e-2, err <= 1e-2});
    return r;
}

struct SchattenCmd {
    FamilyFlags fam;
    int m = 1;
    std::vector<double> p;
    std::uint64_t L = 100000;
};

Report run_schatten(const SchattenCmd& c, int threads) {
    Report r;
    r.command = "schatten";
    r.params = family_params(c.fam);
    r.params.update({{"m", c.m}, {"p", c.p}, {"L", c.L}});
    if (c.p.empty()) throw UsageError("schatten needs --p");
    MomentSequence moments = c.fam.family == "model" ? model_moments(c.fam.a, c.fam.b, c.fam.r, c.m, c.L)
                                                     : MomentSequence(make_family(c.fam));
    HankelSpectrum spec(c.fam.n, c.m, moments);
    auto rows = cutoff_scan(spec, c.p, c.L, threads);
    r.columns = {"p", "L", "S_L", "growth_ratio", "verdict", "tail_estimate", "model_exponent", "empirical_exponent",
                 "reason"};
    for (const auto& x : rows)
        r.rows.push_back({x.p, (long long)x.L, x.S_L, x.growth_ratio, verdict_name(x.verdict), x.tail_estimate,
                          x.model_exponent, x.empirical_exponent, x.reason});
    return r;
}

struct VerifyCmd {
    std::string suite = "all";
    std::size_t samples = 100000;
    std::uint64_t L = 1000000;
};

Report run_verify(const VerifyCmd& c, const Common& common) {
    Report r;
    r.command = "verify";
    r.params = {{"suite", c.suite}, {"seed", common.seed}, {"samples", c.samples}, {"L", c.L}};
    VerifyOptions o;
    o.seed = common.seed;
    o.threads = common.threads;
    o.samples = c.samples;
    o.schatten_L = c.L;
    r.checks = run_suite(c.suite, o);
    return r;
}

int default_threads() {
    const char* env = std::getenv("KK_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError("KK_THREADS must be a positive integer");
    return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kepler-manifold kernels, TYZ expansions and Hankel spectra"};
    app.require_subcommand(1);
    Common common;
    MomentsCmd mc;
    KernelCmd kc;
    TyzCmd tc;
    SchattenCmd sc;
    VerifyCmd vc;
    try {
        common.threads = default_threads();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }

    auto* moments = app.add_subcommand("moments", "moment table of a radial measure");
    add_family(moments, mc.fam);
    moments->add_option("--kmax", mc.kmax, "largest moment index");
    moments->add_flag("--check-quadrature", mc.check_quadrature, "add the quadrature cross-check column");
    moments->add_option("--quad-tol", mc.quad_tol, "quadrature tolerance");
    add_common(moments, common);

    auto* kernel = app.add_subcommand("kernel", "reproducing kernel as a function of t = z·w̄");
    add_family(kernel, kc.fam);
    kernel->add_option("--t", kc.points, "evaluation point, e.g. 0.5 or 0.3-0.2i")->take_all();
    kernel->add_option("--points", kc.points, "comma-separated evaluation points")->delimiter(',');
    kernel->add_flag("--compare-closed", kc.compare_closed, "compare with the closed form");
    kernel->add_option("--tol", kc.tol, "pass threshold for --compare-closed");
    add_common(kernel, common);

    auto* tyz = app.add_subcommand("tyz", "TYZ residual table and fitted b1");
    tyz->add_option("--n", tc.n, "dimension n >= 2");
    tyz->add_option("--m", tc.m, "weight exponent m");
    tyz->add_option("--c", tc.c, "weight scale c");
    tyz->add_option("--z", tc.z, "|z|");
    tyz->add_option("--s-grid", tc.s_grid, "comma-separated increasing s values")->delimiter(',');
    add_common(tyz, common);

    auto* schatten = app.add_subcommand("schatten", "Schatten-class verdicts for the Hankel spectrum");
    add_family(schatten, sc.fam, true);
    schatten->add_option("--degree", sc.m, "Hankel symbol degree m >= 1");
    schatten->add_option("--p", sc.p, "comma-separated p-grid")->delimiter(',');
    schatten->add_option("--L", sc.L, "partial-sum length");
    add_common(schatten, common);

    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", vc.suite, "suite name")
        ->check(CLI::IsMember({"all", "kernels", "tyz", "ml", "hankel", "mb", "geometry", "moments"}));
    verify->add_option("--samples", vc.samples, "Monte Carlo samples per geometry check");
    verify->add_option("--L", vc.L, "partial-sum length for the Schatten checks");
    add_common(verify, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    Report report;
    try {
        if (moments->parsed()) report = run_moments(mc);
        else if (kernel->parsed()) report = run_kernel(kc);
        else if (tyz->parsed()) report = run_tyz(tc);
        else if (schatten->parsed()) report = run_schatten(sc, common.threads);
        else report = run_verify(vc, common);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        // domain, convergence, overflow and table exhaustion
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    }

    std::ofstream file;
    if (!common.output.empty()) {
        file.open(common.output);
        if (!file) {
            std::cerr << "error: cannot open " << common.output << '\n';
            return kUsage;
        }
    }
    std::ostream& os = common.output.empty() ? std::cout : file;
    if (common.format == "json") os << to_json(report).dump(2) << '\n';
    else write_csv(os, report);
    if (!report.checks.empty()) {
        std::size_t failed = std::count_if(report.checks.begin(), report.checks.end(), [](const Check& c) { return !c.pass; });
        std::cerr << report.checks.size() - failed << "/" << report.checks.size() << " checks passed\n";
    }
    return report.pass() ? kPass : kFail;
}
