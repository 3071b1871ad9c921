#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cmq/errors.hpp"

namespace cmq {

/// One row of a convergence study: parameter, measured value, reference
/// value, and residual = |measured - reference|.
struct ReportRow {
    double parameter;
    double measured;
    double reference;
    double residual;
};

inline ReportRow make_row(double parameter, double measured, double reference) {
    return {parameter, measured, reference, std::abs(measured - reference)};
}

/// The universal output record of every sweep and study.
struct ConvergenceReport {
    std::vector<ReportRow> rows;
    std::map<std::string, std::string> metadata;

    void add(double parameter, double measured, double reference) {
        rows.push_back(make_row(parameter, measured, reference));
    }

    double final_residual() const {
        return rows.empty() ? 0.0 : rows.back().residual;
    }
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// CSV with the fixed header "parameter,measured,reference,residual".
/// Raw doubles, no rounding; byte-identical for identical inputs.
inline std::string to_csv(const ConvergenceReport& r) {
    std::string out = "parameter,measured,reference,residual\n";
    for (const auto& row : r.rows) {
        out += detail::format_double(row.parameter);
        out += ',';
        out += detail::format_double(row.measured);
        out += ',';
        out += detail::format_double(row.reference);
        out += ',';
        out += detail::format_double(row.residual);
        out += '\n';
    }
    return out;
}

/// Validates that residuals are monotonically nonincreasing over the rows,
/// allowing a multiplicative slack factor (default 10%).
inline bool residuals_nonincreasing(const ConvergenceReport& r, double slack = 1.10,
                                    double abs_floor = 1e-14) {
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        if (r.rows[i].residual > slack * r.rows[i - 1].residual + abs_floor) return false;
    }
    return true;
}

}  // namespace cmq
