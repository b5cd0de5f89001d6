#pragma once
// The bundled material library and study-catalog builders. Rates are
// counts per unit quantity per time step in each energy window at zero
// distance, for a three-window portal configuration.
//
// The twenty-nine-class screening catalog crosses small man-made source
// quantities with NORM filler so that every class except background shows
// the same first-window mean rate (3000) at zero distance; a gross-count
// threshold cannot separate them, the spectra can.

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpmbayes/benchmark.hpp"
#include "rpmbayes/rng.hpp"
#include "rpmbayes/spectrum.hpp"

namespace rpmbayes {

inline constexpr double kSharedFirstWindowRate = 3000.0;

// Built-in six materials plus background.
inline const std::vector<MaterialClass>& builtin_materials() {
    static const std::vector<MaterialClass> materials = {
        {"HEU", {17700.0, 616.0, 247.0}, true},
        {"Fertilizer", {2718.0, 1040.0, 519.0}, false},
        {"Tile", {2220.0, 818.0, 338.0}, false},
        {"WGPu", {60900.0, 3950.0, 285.0}, true},
        {"Kitty litter", {1705.5, 792.0, 208.0}, false},
        {"Salt", {2100.0, 873.0, 208.0}, false},
        {"Background", {1400.0, 519.0, 207.0}, false},
    };
    return materials;
}

inline const MaterialClass& builtin_material(const std::string& label) {
    for (const auto& m : builtin_materials())
        if (m.label == label) return m;
    throw std::domain_error("unknown material '" + label + "'");
}

inline std::vector<std::string> norm_labels() {
    return {"Fertilizer", "Tile", "Kitty litter", "Salt"};
}

// Formats quantities the way class labels spell them (0.025, 0.05, ...).
inline std::string format_quantity(double q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

// One simulated truth: a label plus the mixture that generates its scans.
struct TruthClass {
    std::string label;
    MixtureSpec mixture;
    bool dangerous = false;

    EnergySpectrum spectrum() const { return mix(mixture); }
};

struct StudyCatalog {
    std::vector<TruthClass> classes;

    ClassCatalog class_catalog() const {
        std::vector<CatalogClass> out;
        out.reserve(classes.size());
        for (const auto& c : classes)
            out.push_back({c.label, c.spectrum(), c.dangerous});
        return ClassCatalog(std::move(out));
    }

    const TruthClass& at(const std::string& label) const {
        for (const auto& c : classes)
            if (c.label == label) return c;
        throw std::domain_error("unknown class '" + label + "'");
    }
};

// Eight classes: the pure man-made sources at one unit, a half-and-half
// man-made mixture, the four NORMs at one unit, and background.
inline StudyCatalog build_catalog_8() {
    StudyCatalog cat;
    const auto pure = [](const std::string& label, double quantity, bool dangerous) {
        return TruthClass{label, MixtureSpec{{{builtin_material(label), quantity}}}, dangerous};
    };
    cat.classes.push_back(pure("WGPu", 1.0, true));
    cat.classes.push_back(pure("HEU", 1.0, true));
    cat.classes.push_back(TruthClass{
        "0.5WGPu+0.5HEU",
        MixtureSpec{{{builtin_material("WGPu"), 0.5}, {builtin_material("HEU"), 0.5}}},
        true});
    cat.classes.push_back(pure("Fertilizer", 1.0, false));
    cat.classes.push_back(pure("Tile", 1.0, false));
    cat.classes.push_back(pure("Kitty litter", 1.0, false));
    cat.classes.push_back(pure("Salt", 1.0, false));
    cat.classes.push_back(pure("Background", 1.0, false));
    return cat;
}

// Twenty-nine classes: HEU at 0.025/0.05/0.1 and WGPu at 0.005/0.01/0.025
// crossed with the four NORMs (NORM quantity solved from the shared
// first-window rate), the four pure NORMs at that rate, and background.
inline StudyCatalog build_catalog_29() {
    StudyCatalog cat;
    const std::array<double, 3> heu_quantities{0.025, 0.05, 0.1};
    const std::array<double, 3> wgpu_quantities{0.005, 0.01, 0.025};

    const auto add_mixtures = [&](const std::string& man_label,
                                  const std::array<double, 3>& quantities) {
        const MaterialClass& man = builtin_material(man_label);
        for (double q : quantities) {
            for (const auto& norm_label : norm_labels()) {
                const MaterialClass& norm = builtin_material(norm_label);
                const double remaining = kSharedFirstWindowRate - q * man.rates[0];
                if (!(remaining > 0.0))
                    throw std::domain_error("man-made quantity too large for shared rate");
                const double norm_quantity = remaining / norm.rates[0];
                TruthClass cls;
                cls.label = format_quantity(q) + man_label + "+" + norm_label;
                cls.mixture = MixtureSpec{{{man, q}, {norm, norm_quantity}}};
                cls.dangerous = true;
                cat.classes.push_back(std::move(cls));
            }
        }
    };
    add_mixtures("HEU", heu_quantities);
    add_mixtures("WGPu", wgpu_quantities);

    for (const auto& norm_label : norm_labels()) {
        const MaterialClass& norm = builtin_material(norm_label);
        const double quantity = solve_quantity(norm, kSharedFirstWindowRate);
        cat.classes.push_back({norm_label, MixtureSpec{{{norm, quantity}}}, false});
    }
    cat.classes.push_back(
        {"Background", MixtureSpec{{{builtin_material("Background"), 1.0}}}, false});
    return cat;
}

// Randomized screening catalogs: dangerous classes mix one small man-made
// source with all four NORMs at Dirichlet-distributed quantities;
// nondangerous classes mix the NORMs at independent uniform quantities.
struct RandomCatalogSpec {
    int dangerous_classes = 75;
    int nondangerous_classes = 25;
    // each dangerous class picks one of these uniformly
    std::vector<std::pair<std::string, double>> man_made_choices{{"HEU", 0.025}, {"WGPu", 0.005}};
    std::vector<double> norm_dirichlet{0.25, 0.25, 0.25, 0.25};
    double norm_uniform_lo = 0.0;
    double norm_uniform_hi = 0.25;
    std::uint64_t seed = 0;

    void validate() const {
        if (dangerous_classes < 1 || nondangerous_classes < 1)
            throw std::domain_error("random catalog needs classes on both sides");
        if (man_made_choices.empty())
            throw std::domain_error("random catalog needs man-made choices");
        for (const auto& [label, q] : man_made_choices)
            if (!(q > 0.0))
                throw std::domain_error("man-made quantities must be positive");
        if (norm_dirichlet.size() != norm_labels().size())
            throw std::domain_error("Dirichlet parameter count must match NORM count");
        for (double a : norm_dirichlet)
            if (!(a > 0.0)) throw std::domain_error("Dirichlet parameters must be positive");
        if (!(norm_uniform_lo >= 0.0) || !(norm_uniform_hi > norm_uniform_lo))
            throw std::domain_error("invalid uniform quantity range");
    }
};

// Catalogs whose spectra nearly collide are rejected and redrawn: the
// screening model requires distinct spectra.
inline StudyCatalog generate_random_catalog(const RandomCatalogSpec& spec, std::uint64_t set_index) {
    spec.validate();
    const auto norms = norm_labels();
    for (std::uint64_t attempt = 0;; ++attempt) {
        RngStream rng(spec.seed, substream(set_index, attempt));
        StudyCatalog cat;
        for (int i = 0; i < spec.dangerous_classes; ++i) {
            const auto& [man_label, man_q] =
                spec.man_made_choices[rng.next_u64() % spec.man_made_choices.size()];
            MixtureSpec mixture;
            mixture.components.push_back({builtin_material(man_label), man_q});
            const auto weights = dirichlet_sample(spec.norm_dirichlet, rng);
            for (std::size_t j = 0; j < norms.size(); ++j)
                mixture.components.push_back({builtin_material(norms[j]), weights[j]});
            cat.classes.push_back({"D" + std::to_string(i + 1), std::move(mixture), true});
        }
        for (int i = 0; i < spec.nondangerous_classes; ++i) {
            MixtureSpec mixture;
            for (const auto& norm : norms)
                mixture.components.push_back(
                    {builtin_material(norm),
                     uniform_sample(spec.norm_uniform_lo, spec.norm_uniform_hi, rng)});
            bool positive = false;
            for (const auto& c : mixture.components) positive |= c.quantity > 0.0;
            if (!positive) mixture.components.front().quantity = spec.norm_uniform_hi * 0.5;
            cat.classes.push_back({"N" + std::to_string(i + 1), std::move(mixture), false});
        }
        bool distinct = true;
        for (std::size_t i = 0; i < cat.classes.size() && distinct; ++i)
            for (std::size_t j = i + 1; j < cat.classes.size() && distinct; ++j)
                if (symmetrized_kl(cat.classes[i].spectrum(), cat.classes[j].spectrum()) < 1e-10)
                    distinct = false;
        if (distinct) return cat;
    }
}

} // namespace rpmbayes
