#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "lacuna/clustering.hpp"

namespace lacuna {

/// Primary index diagram as standalone SVG 1.1: x = tau, y = eta, both axes
/// over [0, 1] with ticks every 0.2. With assignments, markers are colored
/// per cluster and a legend lists the cluster ids.
std::string primary_diagram_svg(std::span<const DiagramPoint> points,
                                std::span<const std::size_t> assignments = {});

void emit_primary_diagram_svg(std::span<const DiagramPoint> points,
                              std::span<const std::size_t> assignments, const std::string& path);

} // namespace lacuna
