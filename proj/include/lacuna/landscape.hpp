#pragma once

#include <cstddef>
#include <vector>

#include "lacuna/cubical.hpp"

namespace lacuna {

/// How essential (never dying) pairs enter a landscape or the interior
/// function: dropped, or truncated to die at `cap`. A cap without an
/// explicit value means "the largest filtration value of the complex".
struct EssentialPolicy
{
    enum class Kind { drop, cap };

    Kind kind = Kind::drop;
    bool has_value = false;
    double value = 0.0;

    static EssentialPolicy drop() { return {}; }
    static EssentialPolicy cap_at(double v) { return {Kind::cap, true, v}; }
    static EssentialPolicy cap_at_max() { return {Kind::cap, false, 0.0}; }
};

struct Breakpoint
{
    double t = 0.0;
    double value = 0.0;
};

/// Persistence landscape stored as breakpoint lists; level k (0-based here)
/// is zero outside [front().t, back().t] and linear between breakpoints.
struct Landscape
{
    std::vector<std::vector<Breakpoint>> levels;

    std::size_t depth() const { return levels.size(); }
};

/// Finite pairs of `diagram` after applying the essential policy. A cap
/// requires a value here; `cap_at_max` must be resolved by the caller.
std::vector<PersistencePair> finite_pairs(const PersistenceDiagram& diagram,
                                          const EssentialPolicy& policy);

Landscape landscape_from_diagram(const PersistenceDiagram& diagram,
                                 const EssentialPolicy& policy = EssentialPolicy::drop());

/// Level k is 1-based, matching the usual lambda_k notation.
double evaluate_landscape(const Landscape& ls, std::size_t k, double t);

/// p >= 1, or p = infinity for the sup norm.
double landscape_norm(const Landscape& ls, double p);

double landscape_sup_distance(const Landscape& a, const Landscape& b);

} // namespace lacuna
