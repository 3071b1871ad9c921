#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmq/errors.hpp"
#include "cmq/report.hpp"
#include "cmq/su2_domains.hpp"

namespace cmq {

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "cylinder-separability", "cylinder-vonneumann", "cylinder-dirac", "cylinder-prop2",
        "supertunnel-two-state", "supertunnel-line",    "supertunnel-decompactify",
        "fermi",                 "fermi-pressure",      "su2-domain-dim",
        "su2-cap-count",         "su2-thickness",       "su2-weyl",
        "su2-vn-dirac",          "su2-separability-ball", "su2-positivity",
    };
    return names;
}

/// {"metadata": {...}, "rows": [[p, m, r, res], ...]}
inline std::string report_to_json(const ConvergenceReport& rep) {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.metadata) j["metadata"][k] = v;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rep.rows)
        j["rows"].push_back({row.parameter, row.measured, row.reference, row.residual});
    return j.dump(2) + "\n";
}

/// Writes through a temp file in the target directory plus an atomic
/// rename; an interrupted run never leaves a partial file at the target.
inline void atomic_write_file(const std::string& path, const std::string& content,
                              bool overwrite) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (!overwrite && fs::exists(target))
        throw ArgumentError("output exists (pass --overwrite to replace): " + path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    const fs::path tmp = dir / (target.filename().string() + ".tmp." +
                                std::to_string(static_cast<unsigned long>(::getpid())));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ArgumentError("cannot open temporary output near " + path);
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ArgumentError("failed writing " + path);
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ArgumentError("failed to move output into place: " + path);
    }
}

/// Domain schema:
///   {"components": [{"polys": [
///       {"vars": "C,x3", "coeffs": [[c00, c01, ...], [c10, ...]]},
///       {"exact_units": true, "s2": 40},
///       {"exact_units": true, "s2": 40, "m2": 0}    (ball + plane, a cap)
///   ]}]}
inline SemialgebraicDomain parse_domain_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ArgumentError(std::string("domain JSON: ") + e.what());
    }
    if (!j.contains("components") || !j["components"].is_array() || j["components"].empty())
        throw ArgumentError("domain JSON: expected a nonempty 'components' array");

    SemialgebraicDomain dom;
    for (const auto& comp : j["components"]) {
        if (!comp.contains("polys") || !comp["polys"].is_array() || comp["polys"].empty())
            throw ArgumentError("domain JSON: each component needs a nonempty 'polys' array");
        SemialgebraicDomain::Component c;
        for (const auto& poly : comp["polys"]) {
            if (poly.value("exact_units", false)) {
                const bool has_s2 = poly.contains("s2");
                const bool has_m2 = poly.contains("m2");
                if (!has_s2 && !has_m2)
                    throw ArgumentError("domain JSON: exact_units poly needs s2 and/or m2");
                if (has_s2) c.polys.push_back(DiagonalPoly::exact_ball(poly["s2"].get<long long>()));
                if (has_m2) c.polys.push_back(DiagonalPoly::exact_above(poly["m2"].get<long long>()));
            } else {
                if (poly.value("vars", "") != "C,x3")
                    throw ArgumentError("domain JSON: grid polys must declare vars \"C,x3\"");
                std::vector<std::vector<double>> grid;
                for (const auto& row : poly.at("coeffs")) grid.push_back(row.get<std::vector<double>>());
                c.polys.push_back(DiagonalPoly(std::move(grid)));
            }
        }
        dom.components.push_back(std::move(c));
    }
    return dom;
}

/// Probability trace as CSV with the fixed header "t,probability".
inline std::string trace_to_csv(const std::vector<double>& times,
                                const std::vector<double>& probs) {
    std::string out = "t,probability\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out += detail::format_double(times[i]);
        out += ',';
        out += detail::format_double(probs[i]);
        out += '\n';
    }
    return out;
}

}  // namespace cmq
