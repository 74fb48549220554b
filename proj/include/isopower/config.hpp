#ifndef ISOPOWER_CONFIG_HPP
#define ISOPOWER_CONFIG_HPP

#include <cstdint>
#include <string>

namespace isopower {

// Global resource caps. Every potentially expensive operation checks these
// and raises BoundExceeded instead of silently grinding.
struct Bounds {
    // Largest finite field order we agree to work in (point enumeration,
    // torsion point searches, square-root tables).
    std::int64_t field_order = 1'000'000;
    // Largest extension degree over the curve's base field.
    int extension_degree = 24;
    // Largest |D| accepted for class-group enumeration.
    std::int64_t discriminant = 1'000'000;
    // Largest rank for module enumeration in image descriptions.
    int module_rank = 4;
};

struct Config {
    Bounds bounds;
    std::string format = "json"; // json | csv
    std::uint64_t seed = 1;      // sampled scan order
};

// Parses key=value lines (bound_q, bound_ext, bound_disc, bound_rank,
// format, seed). Unknown keys are a UsageError.
Config config_from_file(const std::string& path);

// Reads ISOPOWER_CONFIG if set, otherwise defaults.
Config config_from_env();

} // namespace isopower

#endif
