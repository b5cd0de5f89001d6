#pragma once
// Text file formats. Both formats are line-oriented, comma-separated, with
// a leading keyword per line; '#' starts a comment. Parsers report the line
// (and where useful, column) of the first problem and never return partial
// results.
//
// Model file:
//   windows,Window1,Window2,Window3
//   material,HEU,dangerous,17700,616,247
//   material,Salt,nondangerous,2100,873,208
//   priors,rare-dangerous            # or explicit: prior,HEU,1e-9
//   loss,HEU,Salt,25.0               # cost of assigning HEU when truth Salt
//
// Scan file:
//   scan,seed=1,stream=7,profile=linear,source=1 x HEU
//   windows,Window1,Window2,Window3
//   812,31,12                        # one row per time step
//   790,28,9

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rpmbayes/classifier.hpp"
#include "rpmbayes/error.hpp"
#include "rpmbayes/experiment.hpp"
#include "rpmbayes/simulate.hpp"
#include "rpmbayes/spectrum.hpp"

namespace rpmbayes {

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r");
    return s.substr(from, to - from + 1);
}

inline double parse_number(const std::string& text, int line, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("expected a number for ") + what + ", got '" + text + "'",
                         line);
    }
}

inline std::int64_t parse_count(const std::string& text, int line, int column) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        if (v < 0) throw ParseError("negative count '" + text + "'", line, column);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("expected a count, got '" + text + "'", line, column);
    }
}

} // namespace detail

struct ModelFile {
    std::vector<std::string> window_labels;
    std::vector<MaterialClass> materials;
    std::vector<int> material_lines; // source line of each material row
    std::optional<PriorsPreset> priors_preset;
    std::vector<std::pair<std::string, double>> explicit_priors;
    std::vector<std::tuple<std::string, std::string, double>> loss_entries;

    std::size_t windows() const { return window_labels.size(); }
};

inline ModelFile parse_model_file(std::istream& in) {
    ModelFile file;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        const std::string& kind = fields[0];
        if (kind == "windows") {
            if (!file.window_labels.empty())
                throw ParseError("duplicate windows line", line_no);
            if (fields.size() < 3)
                throw ParseError("windows line needs at least 2 labels", line_no);
            file.window_labels.assign(fields.begin() + 1, fields.end());
        } else if (kind == "material") {
            if (file.window_labels.empty())
                throw ParseError("material row before windows line", line_no);
            if (fields.size() != 3 + file.windows())
                throw ParseError("material row needs label, flag and " +
                                     std::to_string(file.windows()) + " rates",
                                 line_no);
            MaterialClass m;
            m.label = detail::trim(fields[1]);
            if (m.label.empty()) throw ParseError("empty material label", line_no);
            for (std::size_t i = 0; i < file.materials.size(); ++i)
                if (file.materials[i].label == m.label)
                    throw ParseError("duplicate material label '" + m.label + "' (lines " +
                                         std::to_string(file.material_lines[i]) + " and " +
                                         std::to_string(line_no) + ")",
                                     line_no);
            const std::string flag = detail::trim(fields[2]);
            if (flag == "dangerous")
                m.dangerous = true;
            else if (flag == "nondangerous")
                m.dangerous = false;
            else
                throw ParseError("flag must be 'dangerous' or 'nondangerous', got '" + flag + "'",
                                 line_no);
            for (std::size_t b = 0; b < file.windows(); ++b) {
                const double r = detail::parse_number(fields[3 + b], line_no, "rate");
                if (!(r > 0.0))
                    throw ParseError("material '" + m.label + "' has nonpositive rate in window " +
                                         std::to_string(b + 1),
                                     line_no);
                m.rates.push_back(r);
            }
            file.materials.push_back(std::move(m));
            file.material_lines.push_back(line_no);
        } else if (kind == "priors") {
            if (fields.size() != 2) throw ParseError("priors line needs a preset name", line_no);
            try {
                file.priors_preset = priors_preset_from_name(detail::trim(fields[1]));
            } catch (const std::domain_error& e) {
                throw ParseError(e.what(), line_no);
            }
        } else if (kind == "prior") {
            if (fields.size() != 3)
                throw ParseError("prior line needs label and value", line_no);
            file.explicit_priors.emplace_back(
                detail::trim(fields[1]), detail::parse_number(fields[2], line_no, "prior"));
        } else if (kind == "loss") {
            if (fields.size() != 4)
                throw ParseError("loss line needs assigned, truth and cost", line_no);
            file.loss_entries.emplace_back(detail::trim(fields[1]), detail::trim(fields[2]),
                                           detail::parse_number(fields[3], line_no, "cost"));
        } else {
            throw ParseError("unknown line kind '" + kind + "'", line_no);
        }
    }
    if (file.materials.empty()) throw ParseError("no material rows");
    if (file.priors_preset && !file.explicit_priors.empty())
        throw ParseError("cannot mix a priors preset with explicit prior lines");
    return file;
}

inline ModelFile parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path + "'");
    return parse_model_file(in);
}

// Resolves the parsed file into a validated classifier model.
inline ClassifierModel build_model(const ModelFile& file) {
    std::vector<bool> dangerous;
    for (const auto& m : file.materials) dangerous.push_back(m.dangerous);
    std::vector<double> priors;
    if (!file.explicit_priors.empty()) {
        if (file.explicit_priors.size() != file.materials.size())
            throw ParseError("explicit priors must cover every material");
        priors.resize(file.materials.size(), -1.0);
        for (const auto& [label, value] : file.explicit_priors) {
            bool found = false;
            for (std::size_t k = 0; k < file.materials.size(); ++k)
                if (file.materials[k].label == label) {
                    if (priors[k] >= 0.0)
                        throw ParseError("duplicate prior for '" + label + "'");
                    priors[k] = value;
                    found = true;
                }
            if (!found) throw ParseError("prior names unknown material '" + label + "'");
        }
        double sum = 0.0;
        for (double p : priors) sum += p;
        if (std::abs(sum - 1.0) > 1e-9)
            throw ParseError("priors sum to " + std::to_string(sum) + ", expected 1");
    } else {
        priors = preset_priors(file.priors_preset.value_or(PriorsPreset::Uniform), dangerous);
    }
    std::vector<ClassEntry> entries;
    for (std::size_t k = 0; k < file.materials.size(); ++k)
        entries.push_back({file.materials[k].label, spectrum_of(file.materials[k]), priors[k],
                           file.materials[k].dangerous});
    return ClassifierModel(std::move(entries));
}

inline std::optional<LossMatrix> build_loss(const ModelFile& file, const ClassifierModel& model) {
    if (file.loss_entries.empty()) return std::nullopt;
    std::vector<double> costs(model.size() * model.size(), 0.0);
    for (const auto& [assigned, truth, cost] : file.loss_entries) {
        const auto a = model.index_of(assigned);
        const auto t = model.index_of(truth);
        if (!a || !t)
            throw ParseError("loss entry names unknown material '" + (!a ? assigned : truth) + "'");
        costs[*a * model.size() + *t] = cost;
    }
    return LossMatrix(model.size(), std::move(costs));
}

inline void write_model_file(std::ostream& out, const ModelFile& file) {
    out << "windows";
    for (const auto& w : file.window_labels) out << "," << w;
    out << "\n";
    for (const auto& m : file.materials) {
        out << "material," << m.label << "," << (m.dangerous ? "dangerous" : "nondangerous");
        std::ostringstream rates;
        rates.precision(17);
        for (double r : m.rates) rates << "," << r;
        out << rates.str() << "\n";
    }
    if (file.priors_preset) out << "priors," << priors_preset_name(*file.priors_preset) << "\n";
    for (const auto& [label, value] : file.explicit_priors) {
        std::ostringstream v;
        v.precision(17);
        v << value;
        out << "prior," << label << "," << v.str() << "\n";
    }
    for (const auto& [a, t, c] : file.loss_entries) {
        std::ostringstream v;
        v.precision(17);
        v << c;
        out << "loss," << a << "," << t << "," << v.str() << "\n";
    }
}

inline ScanMatrix parse_scan_file(std::istream& in) {
    std::string raw;
    int line_no = 0;
    ScanMetadata meta;
    std::vector<std::vector<std::int64_t>> rows;
    bool saw_scan_line = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto fields = detail::split_csv(line);
        if (fields[0] == "scan") {
            if (saw_scan_line) throw ParseError("duplicate scan line", line_no);
            saw_scan_line = true;
            for (std::size_t i = 1; i < fields.size(); ++i) {
                const auto eq = fields[i].find('=');
                if (eq == std::string::npos)
                    throw ParseError("scan metadata must be key=value, got '" + fields[i] + "'",
                                     line_no);
                const std::string key = detail::trim(fields[i].substr(0, eq));
                const std::string value = fields[i].substr(eq + 1);
                if (key == "seed")
                    meta.seed = static_cast<std::uint64_t>(
                        std::strtoull(value.c_str(), nullptr, 10));
                else if (key == "stream")
                    meta.stream = static_cast<std::uint64_t>(
                        std::strtoull(value.c_str(), nullptr, 10));
                else if (key == "profile")
                    meta.profile = value;
                else if (key == "source")
                    meta.source = value;
                else
                    throw ParseError("unknown scan metadata key '" + key + "'", line_no);
            }
        } else if (fields[0] == "windows") {
            if (!meta.window_labels.empty()) throw ParseError("duplicate windows line", line_no);
            if (fields.size() < 3) throw ParseError("windows line needs at least 2 labels", line_no);
            meta.window_labels.assign(fields.begin() + 1, fields.end());
        } else {
            if (meta.window_labels.empty())
                throw ParseError("count row before windows line", line_no);
            if (fields.size() != meta.window_labels.size())
                throw ParseError("count row has " + std::to_string(fields.size()) +
                                     " fields, expected " +
                                     std::to_string(meta.window_labels.size()),
                                 line_no);
            std::vector<std::int64_t> row;
            for (std::size_t i = 0; i < fields.size(); ++i)
                row.push_back(detail::parse_count(detail::trim(fields[i]), line_no,
                                                  static_cast<int>(i + 1)));
            rows.push_back(std::move(row));
        }
    }
    if (meta.window_labels.empty()) throw ParseError("missing windows line");
    if (rows.empty()) throw ParseError("scan has no count rows");
    ScanMatrix scan(meta.window_labels.size(), rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t b = 0; b < meta.window_labels.size(); ++b) scan.at(b, t) = rows[t][b];
    scan.meta = std::move(meta);
    return scan;
}

inline ScanMatrix parse_scan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scan file '" + path + "'");
    return parse_scan_file(in);
}

inline void write_scan_file(std::ostream& out, const ScanMatrix& scan) {
    out << "scan,seed=" << scan.meta.seed << ",stream=" << scan.meta.stream;
    if (!scan.meta.profile.empty()) out << ",profile=" << scan.meta.profile;
    if (!scan.meta.source.empty()) out << ",source=" << scan.meta.source;
    out << "\n";
    out << "windows";
    if (scan.meta.window_labels.empty()) {
        for (std::size_t b = 0; b < scan.windows(); ++b) out << ",Window" << (b + 1);
    } else {
        for (const auto& w : scan.meta.window_labels) out << "," << w;
    }
    out << "\n";
    for (std::size_t t = 0; t < scan.steps(); ++t) {
        for (std::size_t b = 0; b < scan.windows(); ++b)
            out << (b ? "," : "") << scan.at(b, t);
        out << "\n";
    }
}

inline void write_scan_file(const std::string& path, const ScanMatrix& scan) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    write_scan_file(out, scan);
}

} // namespace rpmbayes
