#include "isopower/config.hpp"

#include <cstdlib>
#include <fstream>

#include "isopower/errors.hpp"

namespace isopower {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotPrime: return "NotPrime";
        case ErrorKind::DegreeOutOfRange: return "DegreeOutOfRange";
        case ErrorKind::SingularCurve: return "SingularCurve";
        case ErrorKind::FieldMismatch: return "FieldMismatch";
        case ErrorKind::BoundExceeded: return "BoundExceeded";
        case ErrorKind::BadPrime: return "BadPrime";
        case ErrorKind::BadDiscriminant: return "BadDiscriminant";
        case ErrorKind::OwnerMismatch: return "OwnerMismatch";
        case ErrorKind::NonInvertible: return "NonInvertible";
        case ErrorKind::DegenerateLattice: return "DegenerateLattice";
        case ErrorKind::OwnerNotAbove: return "OwnerNotAbove";
        case ErrorKind::HasTorsion: return "HasTorsion";
        case ErrorKind::BaseMismatch: return "BaseMismatch";
        case ErrorKind::DenominatorClash: return "DenominatorClash";
        case ErrorKind::CrossCheckMismatch: return "CrossCheckMismatch";
        case ErrorKind::NotSubring: return "NotSubring";
        case ErrorKind::NotGaloisStable: return "NotGaloisStable";
        case ErrorKind::SingularMatrix: return "SingularMatrix";
        case ErrorKind::UnsupportedCase: return "UnsupportedCase";
        case ErrorKind::UsageError: return "UsageError";
    }
    return "UnknownError";
}

Config config_from_file(const std::string& path) {
    Config cfg;
    std::ifstream in(path);
    if (!in) fail(ErrorKind::UsageError, "cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::UsageError, "malformed config line: " + line);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        try {
            if (key == "bound_q")
                cfg.bounds.field_order = std::stoll(val);
            else if (key == "bound_ext")
                cfg.bounds.extension_degree = std::stoi(val);
            else if (key == "bound_disc")
                cfg.bounds.discriminant = std::stoll(val);
            else if (key == "bound_rank")
                cfg.bounds.module_rank = std::stoi(val);
            else if (key == "format")
                cfg.format = val;
            else if (key == "seed")
                cfg.seed = std::stoull(val);
            else
                fail(ErrorKind::UsageError, "unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            fail(ErrorKind::UsageError, "bad value for " + key + ": " + val);
        }
    }
    if (cfg.bounds.field_order <= 1 || cfg.bounds.extension_degree < 1 ||
        cfg.bounds.discriminant < 3 || cfg.bounds.module_rank < 1)
        fail(ErrorKind::UsageError, "bounds must be positive");
    return cfg;
}

Config config_from_env() {
    const char* path = std::getenv("ISOPOWER_CONFIG");
    if (!path) return Config{};
    return config_from_file(path);
}

} // namespace isopower
