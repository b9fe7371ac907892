#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hof/amspec.hpp"
#include "hof/experiments.hpp"
#include "hof/renorm.hpp"

namespace hof {

inline constexpr int kSchemaVersion = 1;

// shortest round-trip decimal form
std::string fmt_double(double v);

void write_butterfly_csv(std::ostream& os, const std::vector<ButterflyRow>& rows);
// rows = alpha (p/q ascending), columns = E in [-E_max, E_max]
std::vector<std::uint8_t> butterfly_raster(const std::vector<BandSet>& sets, int width, int height,
                                           double E_max = 4.0);
void write_pgm(std::ostream& os, int width, int height, const std::vector<std::uint8_t>& pixels);

void write_scan_csv(std::ostream& os, const ScalingScan& scan);
nlohmann::json scan_json(const ScalingScan& scan, const FitResult& fit);
nlohmann::json trace_json(const std::vector<RenormRecord>& records, RenormStatus status, int ell, double E);
nlohmann::json eigen_json(const EigenReport& rep);
nlohmann::json with_schema(nlohmann::json j);

}  // namespace hof
