#pragma once

#include <string>
#include <vector>

#include "dynreg/harness.hpp"

namespace dynreg {

// Log-log chart of median offline regret against n, one colour per algorithm,
// with the fitted power law drawn when an algorithm has 4 or more distinct n.
// Throws DomainError when no record has a positive regret.
std::string regret_plot_svg(const std::vector<RegretRecord>& records);

// Series (grey) and its trend (blue) against the time index.
std::string trend_overlay_svg(const Vector& series, const Vector& trend,
                              const std::string& title = "");

}  // namespace dynreg
