#include "hof/io.hpp"

#include <charconv>
#include <cmath>

namespace hof {

std::string fmt_double(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_butterfly_csv(std::ostream& os, const std::vector<ButterflyRow>& rows)
{
    os << "p,q,band_index,E_lo,E_hi,gap_label\n";
    for (const auto& r : rows)
        os << r.p << ',' << r.q << ',' << r.band_index << ',' << fmt_double(r.lo) << ',' << fmt_double(r.hi) << ','
           << r.gap_label << '\n';
}

std::vector<std::uint8_t> butterfly_raster(const std::vector<BandSet>& sets, int width, int height, double E_max)
{
    std::vector<std::uint8_t> px(std::size_t(width) * height, 0);
    double dE = 2 * E_max / width;
    for (const auto& bs : sets) {
        double a = double(bs.p) / double(bs.q);
        int i = std::min(height - 1, int(std::floor(a * height)));
        for (const auto& b : bs.bands) {
            int j0 = std::max(0, int(std::floor((b.lo + E_max) / dE)));
            int j1 = std::min(width - 1, int(std::floor((b.hi + E_max) / dE)));
            for (int j = j0; j <= j1; ++j) px[std::size_t(i) * width + j] = 255;
        }
    }
    return px;
}

void write_pgm(std::ostream& os, int width, int height, const std::vector<std::uint8_t>& pixels)
{
    os << "P5\n" << width << ' ' << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(pixels.data()), std::streamsize(pixels.size()));
}

void write_scan_csv(std::ostream& os, const ScalingScan& scan)
{
    os << "eps,E,f,f_error,flagged\n";
    double sgn = scan.side == Side::above ? 1.0 : -1.0;
    for (std::size_t i = 0; i < scan.eps_grid.size(); ++i)
        os << fmt_double(scan.eps_grid[i]) << ',' << fmt_double(scan.E_c + sgn * scan.eps_grid[i]) << ','
           << fmt_double(scan.f_values[i]) << ',' << fmt_double(scan.f_errors[i]) << ','
           << (scan.flagged[i] ? 1 : 0) << '\n';
}

nlohmann::json with_schema(nlohmann::json j)
{
    j["schema_version"] = kSchemaVersion;
    return j;
}

nlohmann::json scan_json(const ScalingScan& scan, const FitResult& fit)
{
    return with_schema({{"ell", scan.ell},
                        {"side", side_name(scan.side)},
                        {"E_c", scan.E_c},
                        {"eps", scan.eps_grid},
                        {"f", scan.f_values},
                        {"fit",
                         {{"exponent", fit.exponent},
                          {"oscillation_period", fit.oscillation_period},
                          {"oscillation_amplitude", fit.oscillation_amplitude},
                          {"residual", fit.residual},
                          {"noise", fit.noise},
                          {"line_exponent", fit.line_exponent},
                          {"envelope", fit.envelope},
                          {"n_used", fit.n_used}}}});
}

nlohmann::json trace_json(const std::vector<RenormRecord>& records, RenormStatus status, int ell, double E)
{
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& r : records)
        steps.push_back({{"step", r.step},
                         {"sigma", r.sigma},
                         {"comm_defect", r.comm_defect},
                         {"rev_defect", r.rev_defect},
                         {"norm_F", r.norm_F},
                         {"norm_G", r.norm_G},
                         {"dist", r.dist},
                         {"tr_F0", r.tr_F0},
                         {"tr_G0", r.tr_G0}});
    const char* st = status == RenormStatus::converged ? "converged"
                     : status == RenormStatus::diverged ? "diverged"
                                                        : "exhausted";
    return with_schema({{"ell", ell}, {"E", E}, {"status", st}, {"steps", steps}});
}

nlohmann::json eigen_json(const EigenReport& rep)
{
    nlohmann::json ev = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
        ev.push_back({{"re", rep.eigenvalues[i].real()},
                      {"im", rep.eigenvalues[i].imag()},
                      {"abs", std::abs(rep.eigenvalues[i])},
                      {"residual", rep.residuals[i]}});
    return with_schema({{"eigenvalues", ev}, {"iterations", rep.iterations}});
}

}  // namespace hof
