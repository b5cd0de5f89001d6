// Command-line front end: simulate scans, classify them, train spectra,
// select screening benchmarks, and run the bundled Monte Carlo studies.
//
// Exit codes: 0 success, 2 usage error, 3 input parse error, 4 domain
// error, 5 --check threshold failure, 6 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rpmbayes/benchmark.hpp"
#include "rpmbayes/catalog.hpp"
#include "rpmbayes/classifier.hpp"
#include "rpmbayes/error.hpp"
#include "rpmbayes/experiment.hpp"
#include "rpmbayes/io.hpp"
#include "rpmbayes/report.hpp"
#include "rpmbayes/training.hpp"
#include "rpmbayes/version.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitDomain = 4;
constexpr int kExitCheck = 5;
constexpr int kExitIo = 6;

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes through a temporary file so failed runs never leave partial output.
void write_text_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoFailure("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw IoFailure("failed writing '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path)
        write_text_file(*out_path, content);
    else
        std::cout << content;
}

rpmbayes::MixtureSpec parse_components(const rpmbayes::ModelFile& model_file,
                                       const std::vector<std::string>& components) {
    rpmbayes::MixtureSpec mixture;
    for (const auto& text : components) {
        const auto at = text.rfind(':');
        if (at == std::string::npos)
            throw rpmbayes::ParseError("component must be LABEL:QUANTITY, got '" + text + "'");
        const std::string label = text.substr(0, at);
        const double quantity = rpmbayes::detail::parse_number(text.substr(at + 1), 0, "quantity");
        bool found = false;
        for (const auto& m : model_file.materials)
            if (m.label == label) {
                mixture.components.push_back({m, quantity});
                found = true;
                break;
            }
        if (!found) throw std::domain_error("component names unknown material '" + label + "'");
    }
    return mixture;
}

std::string mixture_description(const rpmbayes::MixtureSpec& mixture) {
    std::ostringstream os;
    for (std::size_t i = 0; i < mixture.components.size(); ++i) {
        if (i) os << " + ";
        os << mixture.components[i].quantity << " x " << mixture.components[i].material.label;
    }
    return os.str();
}

rpmbayes::GeometryProfile profile_by_name(const std::string& name) {
    rpmbayes::GeometryProfile profile = rpmbayes::default_portal_profile();
    profile.attenuation = rpmbayes::attenuation_from_name(name);
    return profile;
}

rpmbayes::StudyCatalog catalog_from_model_file(const rpmbayes::ModelFile& file) {
    rpmbayes::StudyCatalog catalog;
    for (const auto& m : file.materials)
        catalog.classes.push_back(
            {m.label, rpmbayes::MixtureSpec{{{m, 1.0}}}, m.dangerous});
    return catalog;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const std::string& model_path, const std::vector<std::string>& components,
                 std::uint64_t seed, std::uint64_t stream, const std::string& profile_name,
                 const std::optional<std::string>& out_path) {
    const auto model_file = rpmbayes::parse_model_file(model_path);
    const auto mixture = parse_components(model_file, components);
    const auto profile = profile_by_name(profile_name);
    rpmbayes::RngStream rng(seed, stream);
    rpmbayes::ScanMatrix scan = rpmbayes::simulate_scan(mixture, profile, rng);
    scan.meta.seed = seed;
    scan.meta.stream = stream;
    scan.meta.source = mixture_description(mixture);
    scan.meta.window_labels = model_file.window_labels;
    std::ostringstream os;
    rpmbayes::write_scan_file(os, scan);
    emit(out_path, os.str());
    return 0;
}

// ---------------------------------------------------------------- classify

int run_classify(const std::string& model_path, const std::vector<std::string>& scan_paths,
                 bool with_loss, std::optional<double> gof_threshold,
                 const std::optional<std::string>& out_path) {
    const auto model_file = rpmbayes::parse_model_file(model_path);
    const auto model = rpmbayes::build_model(model_file);
    const auto loss = rpmbayes::build_loss(model_file, model);
    if (with_loss && !loss)
        throw std::domain_error("--with-loss requires loss entries in the model file");
    std::ostringstream os;
    int screened = 0;
    for (const auto& path : scan_paths) {
        const rpmbayes::ScanMatrix scan = rpmbayes::parse_scan_file(path);
        const rpmbayes::Decision decision = with_loss
                                                ? rpmbayes::classify_with_loss(model, scan, *loss)
                                                : rpmbayes::classify(model, scan);
        nlohmann::json j;
        j["scan"] = path;
        j["label"] = decision.label;
        j["dangerous"] = model.entry(decision.index).dangerous;
        nlohmann::json posteriors;
        for (std::size_t k = 0; k < model.size(); ++k)
            posteriors[model.entry(k).label] = decision.posteriors[k];
        j["posteriors"] = std::move(posteriors);
        if (decision.expected_losses) {
            nlohmann::json losses;
            for (std::size_t k = 0; k < model.size(); ++k)
                losses[model.entry(k).label] = (*decision.expected_losses)[k];
            j["expected_losses"] = std::move(losses);
        }
        if (scan.total() > 0) {
            const auto gof =
                rpmbayes::goodness_of_fit(scan, model.entry(decision.index).spectrum);
            j["gof_statistic"] = gof.statistic;
            j["gof_p_value"] = gof.p_value;
            if (gof_threshold && gof.p_value < *gof_threshold) {
                j["screened"] = true;
                ++screened;
            }
        }
        os << j.dump() << "\n";
    }
    emit(out_path, os.str());
    return screened > 0 ? 0 : 0; // screening outcome is reported, not an error
}

// ------------------------------------------------------------------- train

int run_train(const std::string& model_path, const std::string& scans_dir,
              const std::string& out_path, std::optional<double> prior_strength) {
    namespace fs = std::filesystem;
    auto model_file = rpmbayes::parse_model_file(model_path);
    const std::size_t windows = model_file.windows();
    if (!fs::is_directory(scans_dir))
        throw IoFailure("'" + scans_dir + "' is not a directory");

    int trained = 0;
    for (const auto& entry : fs::directory_iterator(scans_dir)) {
        if (!entry.is_directory()) continue;
        const std::string label = entry.path().filename().string();
        auto material = std::find_if(model_file.materials.begin(), model_file.materials.end(),
                                     [&](const auto& m) { return m.label == label; });
        if (material == model_file.materials.end())
            throw std::domain_error("scan directory '" + label + "' matches no model material");

        rpmbayes::TrainingSet data{label, {}};
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(entry.path()))
            if (f.is_regular_file()) files.push_back(f.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) data.scans.push_back(rpmbayes::parse_scan_file(f.string()));
        if (data.scans.empty()) continue;

        rpmbayes::DirichletPrior prior = rpmbayes::DirichletPrior::uniform(windows);
        if (prior_strength) {
            const auto current = rpmbayes::spectrum_of(*material);
            for (std::size_t b = 0; b < windows; ++b)
                prior.theta[b] = *prior_strength * current[b];
        }
        const auto estimate = rpmbayes::posterior_spectrum(prior, data);
        // keep the material's overall intensity, update its shape
        const double total = material->total_rate();
        for (std::size_t b = 0; b < windows; ++b) material->rates[b] = total * estimate[b];
        ++trained;
    }
    if (trained == 0) throw std::domain_error("no labeled scan directories found");
    std::ostringstream os;
    rpmbayes::write_model_file(os, model_file);
    write_text_file(out_path, os.str());
    std::cout << "trained " << trained << " classes -> " << out_path << "\n";
    return 0;
}

// --------------------------------------------------------- select-benchmarks

int run_select(const std::string& model_path, const std::optional<std::string>& out_path) {
    const auto model_file = rpmbayes::parse_model_file(model_path);
    std::vector<rpmbayes::CatalogClass> classes;
    for (const auto& m : model_file.materials)
        classes.push_back({m.label, rpmbayes::spectrum_of(m), m.dangerous});
    const rpmbayes::ClassCatalog catalog(std::move(classes));
    const rpmbayes::BenchmarkResult result = rpmbayes::select_benchmarks(catalog);
    nlohmann::json j;
    j["kind"] = "benchmarks";
    j["dangerous"] = result.dangerous;
    j["nondangerous"] = result.nondangerous;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : result.steps) {
        steps.push_back({{"iteration", s.iteration},
                         {"at_risk_dangerous", s.at_risk_dangerous},
                         {"at_risk_nondangerous", s.at_risk_nondangerous},
                         {"added_dangerous", s.added_dangerous},
                         {"added_nondangerous", s.added_nondangerous}});
    }
    j["steps"] = std::move(steps);
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

// -------------------------------------------------------------- experiment

struct ExperimentFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    int threads = 1;
    bool check = false;
    std::string format = "json";
    std::optional<std::string> out_path;
};

void apply_flags(rpmbayes::ExperimentConfig& config, const ExperimentFlags& flags) {
    if (flags.seed) config.seed = *flags.seed;
    if (flags.replicates) config.replicates = *flags.replicates;
    config.threads = flags.threads;
}

std::string render_confusion(const rpmbayes::ConfusionResult& result, const std::string& format) {
    if (format == "text") return rpmbayes::confusion_to_text(result);
    return rpmbayes::confusion_to_json(result).dump(2) + "\n";
}

void check_or_throw(bool ok, const std::string& what, std::ostringstream& log) {
    log << (ok ? "PASS " : "FAIL ") << what << "\n";
    if (!ok) throw CheckFailure("check failed: " + what);
}

int run_experiment_eight_class(const ExperimentFlags& flags) {
    rpmbayes::ExperimentConfig config;
    config.name = "eight-class";
    config.catalog = rpmbayes::build_catalog_8();
    config.priors = rpmbayes::PriorsPreset::RareDangerous;
    apply_flags(config, flags);
    const auto result = rpmbayes::run_confusion(config);
    emit(flags.out_path, render_confusion(result, flags.format));
    if (flags.check) {
        const auto& m = result.matrix;
        std::ostringstream log;
        try {
            for (const auto* label :
                 {"WGPu", "HEU", "0.5WGPu+0.5HEU", "Fertilizer", "Kitty litter", "Salt"})
                check_or_throw(m.probability(label, label) >= 0.9995,
                               std::string("diagonal(") + label + ") >= 0.9995", log);
            const double tile_bg = m.probability("Tile", "Background");
            check_or_throw(tile_bg >= 0.053 && tile_bg <= 0.073,
                           "Tile->Background in [0.053, 0.073]", log);
            const double bg_tile = m.probability("Background", "Tile");
            check_or_throw(bg_tile >= 0.101 && bg_tile <= 0.121,
                           "Background->Tile in [0.101, 0.121]", log);
        } catch (...) {
            std::cerr << log.str();
            throw;
        }
        std::cerr << log.str();
    }
    return 0;
}

int run_experiment_screening_pair(const ExperimentFlags& flags) {
    rpmbayes::ExperimentConfig full;
    full.name = "twentynine-class";
    full.catalog = rpmbayes::build_catalog_29();
    full.priors = rpmbayes::PriorsPreset::RareDangerous;
    apply_flags(full, flags);
    const auto full_result = rpmbayes::run_confusion(full);

    rpmbayes::ExperimentConfig screening = full;
    screening.name = "twentynine-class-benchmarks";
    screening.benchmark_screening = true;
    screening.priors = rpmbayes::PriorsPreset::Uniform;
    const auto bench_result = rpmbayes::run_confusion(screening);

    nlohmann::json j;
    j["kind"] = "screening-pair";
    j["full"] = rpmbayes::confusion_to_json(full_result);
    j["benchmark"] = rpmbayes::confusion_to_json(bench_result);
    nlohmann::json parity = nlohmann::json::array();
    for (std::size_t i = 0; i < full_result.matrix.rows(); ++i) {
        parity.push_back({{"label", full_result.matrix.truth_labels()[i]},
                          {"dangerous", full_result.matrix.truth_dangerous(i)},
                          {"full_rate", full_result.matrix.dangerous_rate(i)},
                          {"benchmark_rate", bench_result.matrix.dangerous_rate(i)}});
    }
    j["dangerous_rates"] = std::move(parity);

    if (flags.format == "text") {
        std::ostringstream os;
        os << rpmbayes::confusion_to_text(full_result) << "\n"
           << rpmbayes::confusion_to_text(bench_result);
        emit(flags.out_path, os.str());
    } else {
        emit(flags.out_path, j.dump(2) + "\n");
    }

    if (flags.check) {
        std::ostringstream log;
        try {
            const auto& fm = full_result.matrix;
            for (std::size_t i = 0; i < fm.rows(); ++i) {
                const std::string& label = fm.truth_labels()[i];
                if (fm.truth_dangerous(i))
                    check_or_throw(1.0 - fm.probability(label, label) < 0.005,
                                   "misclassification(" + label + ") < 0.005", log);
            }
            const double tile_bg = fm.probability("Tile", "Background");
            check_or_throw(std::abs(tile_bg - 0.06) <= 0.02, "Tile->Background within 0.06+-0.02",
                           log);
            const double bg_tile = fm.probability("Background", "Tile");
            check_or_throw(std::abs(bg_tile - 0.11) <= 0.02, "Background->Tile within 0.11+-0.02",
                           log);
            check_or_throw(std::abs(fm.dangerous_rate(fm.truth_index("Salt")) - 0.011) <= 0.01,
                           "Salt false-dangerous within 0.011+-0.01", log);
            const std::vector<std::string> expected_benchmarks = {
                "0.005WGPu+Fertilizer", "0.005WGPu+Tile",  "0.025HEU+Kitty litter",
                "0.005WGPu+Kitty litter", "0.01WGPu+Kitty litter", "0.005WGPu+Salt",
                "Fertilizer", "Tile", "Kitty litter", "Salt"};
            auto got = bench_result.benchmark_labels;
            auto want = expected_benchmarks;
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            check_or_throw(got == want, "benchmark set matches the ten expected classes", log);
            for (std::size_t i = 0; i < fm.rows(); ++i)
                check_or_throw(std::abs(fm.dangerous_rate(i) -
                                        bench_result.matrix.dangerous_rate(i)) <= 0.005,
                               "parity(" + fm.truth_labels()[i] + ") within 0.005", log);
        } catch (...) {
            std::cerr << log.str();
            throw;
        }
        std::cerr << log.str();
    }
    return 0;
}

int run_experiment_screening100(const ExperimentFlags& flags) {
    rpmbayes::RandomCatalogSpec spec;
    spec.seed = flags.seed.value_or(20100501);
    const int sets = 50;
    const int replicates = flags.replicates.value_or(1000);
    const auto result = rpmbayes::run_screening_study(spec, sets, replicates, flags.threads);
    if (flags.format == "text")
        emit(flags.out_path, rpmbayes::screening_to_text(result));
    else
        emit(flags.out_path, rpmbayes::screening_to_json(result).dump(2) + "\n");
    if (flags.check) {
        std::ostringstream log;
        try {
            check_or_throw(result.benchmark_counts.median <= 10.0, "median benchmark count <= 10",
                           log);
            check_or_throw(result.dangerous_miss_rates.mean <= 0.01,
                           "mean dangerous->nondangerous rate <= 0.01", log);
            check_or_throw(result.nondangerous_false_alarm_rates.mean <= 0.02,
                           "mean nondangerous->dangerous rate <= 0.02", log);
        } catch (...) {
            std::cerr << log.str();
            throw;
        }
        std::cerr << log.str();
    }
    return 0;
}

rpmbayes::ExperimentConfig config_from_json(const nlohmann::json& j) {
    rpmbayes::ExperimentConfig config;
    config.name = j.value("name", "custom");
    if (!j.contains("catalog")) throw rpmbayes::ParseError("config needs a catalog");
    const auto& cat = j.at("catalog");
    if (cat.contains("preset")) {
        const std::string preset = cat.at("preset").get<std::string>();
        if (preset == "eight-class")
            config.catalog = rpmbayes::build_catalog_8();
        else if (preset == "twentynine-class")
            config.catalog = rpmbayes::build_catalog_29();
        else
            throw rpmbayes::ParseError("unknown catalog preset '" + preset + "'");
    } else if (cat.contains("file")) {
        config.catalog =
            catalog_from_model_file(rpmbayes::parse_model_file(cat.at("file").get<std::string>()));
    } else {
        throw rpmbayes::ParseError("catalog needs 'preset' or 'file'");
    }
    if (j.contains("truths"))
        for (const auto& label : j.at("truths"))
            config.truth_labels.push_back(label.get<std::string>());
    config.replicates = j.value("replicates", 10000);
    if (j.contains("profile")) config.profile = profile_by_name(j.at("profile").get<std::string>());
    if (j.contains("priors"))
        config.priors = rpmbayes::priors_preset_from_name(j.at("priors").get<std::string>());
    config.seed = j.value("seed", static_cast<std::uint64_t>(20100501));
    config.benchmark_screening = j.value("screening", false);
    return config;
}

int run_experiment_custom(const std::string& path, const ExperimentFlags& flags) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw rpmbayes::ParseError(std::string("config: ") + e.what());
    }
    rpmbayes::ExperimentConfig config = config_from_json(j);
    apply_flags(config, flags);
    const auto result = rpmbayes::run_confusion(config);
    emit(flags.out_path, render_confusion(result, flags.format));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radiation-portal scan simulation and Bayesian classification"};
    app.require_subcommand(0, 1);
    bool show_version = false;
    app.add_flag("--version", show_version, "Print version, RNG and dataset fingerprints");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Simulate a portal scan");
    std::string sim_model;
    std::vector<std::string> sim_components;
    std::uint64_t sim_seed = 1, sim_stream = 0;
    std::string sim_profile = "linear";
    std::optional<std::string> sim_out;
    simulate->add_option("--model", sim_model, "Material library file")->required();
    simulate->add_option("--component", sim_components, "Mixture component LABEL:QUANTITY")
        ->required();
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--stream", sim_stream, "RNG stream index");
    simulate->add_option("--profile", sim_profile, "Attenuation: linear or inverse-square");
    simulate->add_option("--out", sim_out, "Output scan file (default stdout)");

    // classify
    auto* classify = app.add_subcommand("classify", "Classify scan files");
    std::string cls_model;
    std::vector<std::string> cls_scans;
    bool cls_with_loss = false;
    std::optional<double> cls_gof_threshold;
    std::optional<std::string> cls_out;
    classify->add_option("--model", cls_model, "Material library file")->required();
    classify->add_option("scans", cls_scans, "Scan files")->required();
    classify->add_flag("--with-loss", cls_with_loss, "Use the model file's loss matrix");
    classify->add_option("--gof-threshold", cls_gof_threshold,
                         "Flag scans whose goodness-of-fit p-value falls below this");
    classify->add_option("--out", cls_out, "Output path (default stdout)");

    // train
    auto* train = app.add_subcommand("train", "Update class spectra from labeled scans");
    std::string trn_model, trn_scans, trn_out;
    std::optional<double> trn_strength;
    train->add_option("--model", trn_model, "Material library file")->required();
    train->add_option("--scans", trn_scans, "Directory with one subdirectory per class label")
        ->required();
    train->add_option("--out", trn_out, "Output model file")->required();
    train->add_option("--prior-strength", trn_strength,
                      "Use the current spectrum scaled by this as the Dirichlet prior");

    // select-benchmarks
    auto* select = app.add_subcommand("select-benchmarks",
                                      "Pick screening benchmark classes from a catalog");
    std::string sel_model;
    std::optional<std::string> sel_out;
    select->add_option("--model", sel_model, "Catalog file (material library format)")->required();
    select->add_option("--out", sel_out, "Output path (default stdout)");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo study");
    experiment->require_subcommand(1);
    ExperimentFlags flags;
    std::string custom_config;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", flags.seed, "Override the study seed");
        cmd->add_option("--replicates", flags.replicates, "Replicates per truth class");
        cmd->add_option("--threads", flags.threads, "Worker threads");
        cmd->add_flag("--check", flags.check, "Fail (exit 5) when study thresholds are violated");
        cmd->add_option("--format", flags.format, "Output format: json or text")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("--out", flags.out_path, "Output path (default stdout)");
    };
    auto* table3 = experiment->add_subcommand("table3", "Eight-class confusion study");
    add_common(table3);
    auto* table4 =
        experiment->add_subcommand("table4", "Twenty-nine-class study with benchmark screening");
    add_common(table4);
    auto* screening100 = experiment->add_subcommand(
        "screening100", "Randomized 100-class screening study (50 catalogs)");
    add_common(screening100);
    auto* custom = experiment->add_subcommand("custom", "Study from a JSON config file");
    custom->add_option("config", custom_config, "Config file")->required();
    add_common(custom);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (show_version) {
            std::cout << "rpmbayes " << rpmbayes::version_string() << "\n";
            return 0;
        }
        if (simulate->parsed())
            return run_simulate(sim_model, sim_components, sim_seed, sim_stream, sim_profile,
                                sim_out);
        if (classify->parsed())
            return run_classify(cls_model, cls_scans, cls_with_loss, cls_gof_threshold, cls_out);
        if (train->parsed()) return run_train(trn_model, trn_scans, trn_out, trn_strength);
        if (select->parsed()) return run_select(sel_model, sel_out);
        if (experiment->parsed()) {
            if (table3->parsed()) return run_experiment_eight_class(flags);
            if (table4->parsed()) return run_experiment_screening_pair(flags);
            if (screening100->parsed()) return run_experiment_screening100(flags);
            if (custom->parsed()) return run_experiment_custom(custom_config, flags);
        }
        std::cout << app.help();
        return 0;
    } catch (const CheckFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheck;
    } catch (const rpmbayes::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IoFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
