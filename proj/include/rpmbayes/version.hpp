#pragma once
// Build and dataset identification for --version output and report
// provenance.

#include <sstream>
#include <string>

#include "rpmbayes/catalog.hpp"
#include "rpmbayes/experiment.hpp"
#include "rpmbayes/rng.hpp"

namespace rpmbayes {

inline constexpr char kVersion[] = "1.0.0";

// Fingerprint of the bundled material table; changes when the data change.
inline std::uint64_t dataset_fingerprint() {
    std::ostringstream os;
    os.precision(17);
    for (const auto& m : builtin_materials()) {
        os << m.label << ":" << (m.dangerous ? "d" : "n");
        for (double r : m.rates) os << ":" << r;
        os << ";";
    }
    return fnv1a_hash(os.str());
}

inline std::string version_string() {
    std::ostringstream os;
    os << kVersion << " (rng " << kRngName << ", dataset " << std::hex << dataset_fingerprint()
       << ")";
    return os.str();
}

} // namespace rpmbayes
