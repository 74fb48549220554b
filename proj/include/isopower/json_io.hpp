#ifndef ISOPOWER_JSON_IO_HPP
#define ISOPOWER_JSON_IO_HPP

#include "json.hpp"

#include "isopower/decide.hpp"

namespace isopower::json_io {

using json = nlohmann::ordered_json;

json module_nf_json(const modules::ModuleNF& nf);
modules::ModuleNF module_nf_from_json(const json& j);

json subgroup_json(const kernels::SubgroupData& g);
kernels::SubgroupData subgroup_from_json(const json& j);

json curve_json(const arith::EllipticCurve& E);
json verdict_json(const decide::EquivalenceVerdict& v);
json image_report_json(const decide::ImageReport& r);
json maximal_scan_json(const decide::MaximalScanReport& r);

json error_json(const Error& e);

} // namespace isopower::json_io

#endif
