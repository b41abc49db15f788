#pragma once

#include <string>

#include "irflow/multiscale.hpp"

namespace irflow {

/// Per-scale table with the stable column set
/// (n, rho_n, E_n, gap_n, energy_step, proj_step, contraction_q,
///  sigma1_elem, residual_full); floats carry 17 significant digits and
/// missing trailing-step fields stay empty.
std::string to_csv(const CascadeReport& report);

/// Structured report: parameter echo, records, checks, ground-state
/// estimate, oracle rows and truncation diagnostics.
std::string to_json(const CascadeReport& report);

/// Summary line per sweep point: the swept value, deepest energy, worst
/// check margin and pass count.
std::string sweep_summary_csv(
    const std::string& param,
    const std::vector<std::pair<double, CascadeReport>>& points);

std::string format_float(double v);

}  // namespace irflow
