// hofcli: command-line driver for the butterfly, critical-energy,
// renormalization and scaling computations.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "hof/amspec.hpp"
#include "hof/arith.hpp"
#include "hof/errors.hpp"
#include "hof/experiments.hpp"
#include "hof/io.hpp"
#include "hof/renorm.hpp"

using namespace hof;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    double lambda = 1.0;
    int qmax = 10;
    int ell = 3;
    double rho = 0.5;
    double tol = 1e-10;
    long iters = 0;  // command specific default when 0
    int workers = 1;
    std::string out;
    std::string format;
    std::string precision = "double";
};

void emit(const Common& c, const std::string& data)
{
    if (c.out.empty() || c.out == "-") {
        std::cout << data;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw Error("cannot open output file " + c.out);
    f << data;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void check_common(const Common& c)
{
    if (c.workers < 1) throw UsageError("--workers must be >= 1");
    if (!(c.tol > 0)) throw UsageError("--tol must be > 0");
    if (c.iters < 0) throw UsageError("--iters must be >= 0");
    if (c.precision != "double" && c.precision != "extended")
        throw UsageError("--precision must be double or extended");
}

void cmd_butterfly(const Common& c)
{
    if (c.qmax < 1) throw UsageError("--qmax must be >= 1");
    std::string fmt = c.format.empty() ? "csv" : c.format;
    auto sets = butterfly(c.qmax, c.lambda, c.workers);
    std::ostringstream os;
    if (fmt == "csv") {
        write_butterfly_csv(os, butterfly_rows(sets));
    } else if (fmt == "pgm") {
        const int w = 1024, h = 1024;
        double Emax = 2 + 2 * std::abs(c.lambda);
        write_pgm(os, w, h, butterfly_raster(sets, w, h, Emax));
    } else if (fmt == "json") {
        json rows = json::array();
        for (const auto& r : butterfly_rows(sets))
            rows.push_back({{"p", r.p}, {"q", r.q}, {"band_index", r.band_index}, {"E_lo", r.lo}, {"E_hi", r.hi},
                            {"gap_label", r.gap_label}});
        os << dump(with_schema({{"lambda", c.lambda}, {"q_max", c.qmax}, {"bands", rows}}));
    } else {
        throw UsageError("butterfly: --format must be csv, pgm or json");
    }
    emit(c, os.str());
}

void cmd_critical(const Common& c, const std::string& edge)
{
    if (!(c.rho > 0 && c.rho <= 0.5)) throw UsageError("critical: --rho must lie in (0, 1/2]");
    if (edge != "auto" && edge != "lower" && edge != "upper")
        throw UsageError("critical: --edge must be auto, lower or upper");
    if (!c.format.empty() && c.format != "json") throw UsageError("critical: only json output");
    CriticalResult r = find_critical_energy(c.rho, c.lambda, c.tol,
                                          edge == "auto"    ? LevelEdge::automatic
                                          : edge == "lower" ? LevelEdge::lower
                                                            : LevelEdge::upper);
    emit(c, dump(with_schema({{"rho_target", c.rho},
                              {"lambda", c.lambda},
                              {"edge", edge},
                              {"E", r.E},
                              {"rho", r.rho},
                              {"rho_err", r.rho_err},
                              {"ids", r.ids},
                              {"bracket", r.bracket}})));
}

template <class T>
json renorm_json(const Common& c, double energy, bool have_energy, bool polish)
{
    if (c.ell != 3 && c.ell != 6) throw UsageError("--ell must be 3 or 6");
    int k_max = c.iters > 0 ? int(c.iters) : 6;
    json j;
    if (!polish) {
        double E = have_energy ? energy : (c.ell == 3 ? constants().E3 : constants().E6);
        auto tr = iterate_renorm(am_pair<T>(T(E), T(c.lambda)), c.ell, k_max);
        return trace_json(tr.records, tr.status, c.ell, E);
    }
    PipelineOptions po;
    po.workers = c.workers;
    po.approach_periods = k_max;
    if (have_energy) {
        po.tune = false;
        po.E_tabulated = energy;
    }
    auto run = find_fixed_point<T>(c.ell, po);
    j = trace_json(run.approach.records, run.approach.status, c.ell, run.E);
    j["tune_bracket"] = run.tune.bracket;
    j["fixed_point"] = {{"sigma", double(run.polish.sigma)},
                        {"residual", double(run.polish.residual)},
                        {"comm_defect", double(run.polish.comm_defect)},
                        {"converged", run.polish.converged},
                        {"rev_defect", double(pair_reversibility_defect(run.polish.P))}};
    auto m = unstable_multiplier<T>(run.polish.P, T(run.E), T(1), c.ell, T(1e-6));
    j["unstable_multiplier"] = {{"mu", m.mu}, {"spread", m.spread}, {"ratios", m.ratios}};
    return j;
}

void cmd_renorm(const Common& c, double energy, bool have_energy, bool no_polish)
{
    if (!c.format.empty() && c.format != "json") throw UsageError("renorm: only json output");
    json j = c.precision == "extended" ? renorm_json<long double>(c, energy, have_energy, !no_polish)
                                       : renorm_json<double>(c, energy, have_energy, !no_polish);
    emit(c, dump(j));
}

template <class T>
json eigen_run(const Common& c, int modes)
{
    PipelineOptions po;
    po.workers = c.workers;
    auto run = find_fixed_point<T>(c.ell, po);
    EigenReport rep = jacobian_spectrum(run.polish.P, c.ell, modes, c.workers);
    json j = eigen_json(rep);
    j["ell"] = c.ell;
    j["sigma"] = double(run.polish.sigma);
    j["degree"] = run.polish.P.degree();
    return j;
}

void cmd_eigen(const Common& c, int modes)
{
    if (c.ell != 3 && c.ell != 6) throw UsageError("--ell must be 3 or 6");
    if (modes < 1) throw UsageError("--modes must be >= 1");
    if (!c.format.empty() && c.format != "json") throw UsageError("eigen: only json output");
    emit(c, dump(c.precision == "extended" ? eigen_run<long double>(c, modes) : eigen_run<double>(c, modes)));
}

void cmd_scaling(const Common& c, const std::string& side, const std::string& quantity, int points)
{
    if (c.ell != 3 && c.ell != 6) throw UsageError("--ell must be 3 or 6");
    if (side != "above" && side != "below") throw UsageError("scaling: --side must be above or below");
    if (quantity != "lyapunov" && quantity != "rotation")
        throw UsageError("scaling: --quantity must be lyapunov or rotation");
    if (points < 12) throw UsageError("scaling: --points must be >= 12");
    ScanOptions so;
    so.lambda = c.lambda;
    so.workers = c.workers;
    if (c.iters > 0) so.n_iter = c.iters;
    Side sd = side == "above" ? Side::above : Side::below;
    ScalingScan scan = quantity == "lyapunov" ? lyapunov_scaling_scan(c.ell, sd, points, so)
                                              : rotation_scaling_scan(c.ell, sd, points, so);
    std::string fmt = c.format.empty() ? "csv" : c.format;
    std::ostringstream os;
    if (fmt == "csv")
        write_scan_csv(os, scan);
    else if (fmt == "json")
        os << dump(scan_json(scan, fit_power_law(scan)));
    else
        throw UsageError("scaling: --format must be csv or json");
    emit(c, os.str());
}

void cmd_pisano(const Common& c, int nmax)
{
    if (nmax < 2) throw UsageError("pisano: --nmax must be >= 2");
    std::string fmt = c.format.empty() ? "csv" : c.format;
    std::ostringstream os;
    if (fmt == "csv") {
        os << "n,pisano,orbit_period\n";
        for (int n = 2; n <= nmax; ++n) os << n << ',' << pisano(n) << ',' << orbit_period({0, 1, n}) << '\n';
    } else if (fmt == "json") {
        json t = json::array();
        for (int n = 2; n <= nmax; ++n) t.push_back({{"n", n}, {"pisano", pisano(n)}, {"orbit_period", orbit_period({0, 1, n})}});
        os << dump(with_schema({{"table", t}}));
    } else {
        throw UsageError("pisano: --format must be csv or json");
    }
    emit(c, os.str());
}

void cmd_constants(const Common& c)
{
    if (!c.format.empty() && c.format != "json") throw UsageError("constants: only json output");
    emit(c, dump(with_schema(constants_json())));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hofstadter butterfly and golden-mean renormalization toolkit"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--lambda", c.lambda, "coupling lambda")->capture_default_str();
        s->add_option("--workers", c.workers, "worker threads")->capture_default_str();
        s->add_option("--out", c.out, "output file (default stdout)");
        s->add_option("--format", c.format, "output format: csv, json or pgm");
        s->add_option("--precision", c.precision, "numeric backend: double or extended")->capture_default_str();
    };

    auto* bf = app.add_subcommand("butterfly", "band edges of H at all p/q with q <= qmax");
    add_common(bf);
    bf->add_option("--qmax", c.qmax, "largest denominator")->capture_default_str();

    std::string edge = "auto";
    auto* cr = app.add_subcommand("critical", "energy with prescribed rotation number");
    add_common(cr);
    cr->add_option("--rho", c.rho, "target rotation number in (0, 1/2]")->capture_default_str();
    cr->add_option("--tol", c.tol, "bisection tolerance")->capture_default_str();
    cr->add_option("--edge", edge, "auto, lower or upper end of the level set")->capture_default_str();

    double energy = 0;
    bool no_polish = false;
    auto* rn = app.add_subcommand("renorm", "renormalization trace and fixed point");
    add_common(rn);
    rn->add_option("--ell", c.ell, "period 3 or 6")->capture_default_str();
    rn->add_option("--iters", c.iters, "renormalization periods (default 6)");
    auto* e_opt = rn->add_option("--energy", energy, "start energy (default: tuned E3, or 0 for ell 6)");
    rn->add_flag("--no-polish", no_polish, "plain iteration only");

    int modes = 12;
    auto* eg = app.add_subcommand("eigen", "leading eigenvalues of the linearized renormalization");
    add_common(eg);
    eg->add_option("--ell", c.ell, "period 3 or 6")->capture_default_str();
    eg->add_option("--modes", modes, "number of eigenvalues")->capture_default_str();

    std::string side = "above", quantity = "lyapunov";
    int points = 40;
    auto* sc = app.add_subcommand("scaling", "power-law scan near the critical energy");
    add_common(sc);
    sc->add_option("--ell", c.ell, "period 3 or 6")->capture_default_str();
    sc->add_option("--side", side, "above or below")->capture_default_str();
    sc->add_option("--quantity", quantity, "lyapunov or rotation")->capture_default_str();
    sc->add_option("--points", points, "grid points")->capture_default_str();
    sc->add_option("--iters", c.iters, "orbit length per point (default 1e7)");

    int nmax = 12;
    auto* ps = app.add_subcommand("pisano", "Pisano periods and torus orbit periods");
    add_common(ps);
    ps->add_option("--nmax", nmax, "largest modulus")->capture_default_str();

    auto* cs = app.add_subcommand("constants", "closed-form constants");
    add_common(cs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        check_common(c);
        if (bf->parsed()) cmd_butterfly(c);
        if (cr->parsed()) cmd_critical(c, edge);
        if (rn->parsed()) cmd_renorm(c, energy, e_opt->count() > 0, no_polish);
        if (eg->parsed()) cmd_eigen(c, modes);
        if (sc->parsed()) cmd_scaling(c, side, quantity, points);
        if (ps->parsed()) cmd_pisano(c, nmax);
        if (cs->parsed()) cmd_constants(c);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
