#ifndef LRR_IO_HPP
#define LRR_IO_HPP

#include <string>

#include <json.hpp>

#include "lrr/divisor.hpp"
#include "lrr/lattice.hpp"
#include "lrr/liouville.hpp"
#include "lrr/spectral.hpp"

namespace lrr {

using Json = nlohmann::json;

// Operator file: {"d":..,"cell":..,"shift":..,"terms":[{"i","j","g","re","im"}]}
Json operator_to_json(const PeriodicLatticeOperator& op);
PeriodicLatticeOperator operator_from_json(const Json& j);

// Divisor file: {"plus":[{"point":{"g":[..],"c":..}|{"x":[..]},"alphas":[[..]..]}],
//                "minus":[...]}
Json divisor_to_json(const RiggedPointDivisor& mu);
RiggedPointDivisor divisor_from_json(const Json& j);

Json fermi_points_to_json(const std::vector<FermiPoint>& pts);
Json lrr_report_to_json(const LRRReport& rep);
Json spectrum_to_json(const SpectrumIntervals& s);

// Deterministic serialization: sorted keys, floats with 17 significant
// digits, trailing newline. NaN/Inf anywhere is refused.
std::string render_report(const Json& j);
void emit_report(const Json& j, const std::string& path);

std::string bands_to_csv(const BandStructure& bs);
std::string fiber_samples_to_csv(const PeriodicLatticeOperator& op,
                                 const BrillouinGrid& grid);

void write_text(const std::string& path, const std::string& text);
Json read_json(const std::string& path);

}  // namespace lrr

#endif
