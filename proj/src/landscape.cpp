#include "lacuna/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lacuna {

namespace {

struct Interval
{
    double birth;
    double death;
};

bool interval_before(const Interval& a, const Interval& b)
{
    if (a.birth != b.birth)
        return a.birth < b.birth;
    return a.death > b.death;
}

void push_point(std::vector<Breakpoint>& level, double t, double value)
{
    if (!level.empty() && level.back().t == t && level.back().value == value)
        return;
    level.push_back({t, value});
}

double interpolate(const std::vector<Breakpoint>& level, double t)
{
    if (level.empty() || t < level.front().t || t > level.back().t)
        return 0.0;
    auto hi = std::upper_bound(level.begin(), level.end(), t,
                               [](double x, const Breakpoint& b) { return x < b.t; });
    if (hi == level.end())
        return level.back().value;
    auto lo = std::prev(hi);
    const double span = hi->t - lo->t;
    if (span <= 0.0)
        return std::max(lo->value, hi->value);
    return lo->value + (hi->value - lo->value) * ((t - lo->t) / span);
}

// Integral of |f|^p over one linear piece from y0 to y1 of width h (f >= 0).
double segment_power_integral(double y0, double y1, double h, double p)
{
    if (h <= 0.0)
        return 0.0;
    if (y0 == y1)
        return h * std::pow(y0, p);
    return h * (std::pow(y1, p + 1.0) - std::pow(y0, p + 1.0)) / ((p + 1.0) * (y1 - y0));
}

} // namespace

std::vector<PersistencePair> finite_pairs(const PersistenceDiagram& diagram,
                                          const EssentialPolicy& policy)
{
    std::vector<PersistencePair> out;
    out.reserve(diagram.pairs.size());
    for (const auto& pair : diagram.pairs) {
        if (!pair.essential()) {
            out.push_back(pair);
            continue;
        }
        if (policy.kind == EssentialPolicy::Kind::drop)
            continue;
        if (!policy.has_value)
            throw std::invalid_argument("cap policy needs a resolved cap value");
        if (policy.value > pair.birth)
            out.push_back({pair.birth, policy.value, pair.degree});
    }
    return out;
}

Landscape landscape_from_diagram(const PersistenceDiagram& diagram, const EssentialPolicy& policy)
{
    std::vector<Interval> pending;
    for (const auto& pair : finite_pairs(diagram, policy))
        pending.push_back({pair.birth, pair.death});
    std::sort(pending.begin(), pending.end(), interval_before);

    // Sweep of Bubenik and Dlotko: each pass peels off the upper envelope of
    // the remaining tents as one level, re-queueing the parts of crossed
    // tents that lie underneath.
    Landscape ls;
    while (!pending.empty()) {
        std::vector<Breakpoint> level;
        Interval cur = pending.front();
        pending.erase(pending.begin());
        std::size_t p = 0;
        push_point(level, cur.birth, 0.0);
        push_point(level, (cur.birth + cur.death) / 2, (cur.death - cur.birth) / 2);

        for (;;) {
            auto next = std::find_if(pending.begin() + static_cast<std::ptrdiff_t>(p),
                                     pending.end(),
                                     [&](const Interval& iv) { return iv.death > cur.death; });
            if (next == pending.end()) {
                push_point(level, cur.death, 0.0);
                break;
            }
            const Interval nxt = *next;
            const std::size_t i = static_cast<std::size_t>(next - pending.begin());
            pending.erase(next);
            p = i;
            if (nxt.birth > cur.death)
                push_point(level, cur.death, 0.0);
            if (nxt.birth >= cur.death) {
                push_point(level, nxt.birth, 0.0);
            } else {
                push_point(level, (nxt.birth + cur.death) / 2, (cur.death - nxt.birth) / 2);
                const Interval under{nxt.birth, cur.death};
                auto at = std::lower_bound(pending.begin(), pending.end(), under, interval_before);
                const std::size_t q = static_cast<std::size_t>(at - pending.begin());
                pending.insert(at, under);
                if (q <= p)
                    ++p;
            }
            push_point(level, (nxt.birth + nxt.death) / 2, (nxt.death - nxt.birth) / 2);
            cur = nxt;
        }
        ls.levels.push_back(std::move(level));
    }
    return ls;
}

double evaluate_landscape(const Landscape& ls, std::size_t k, double t)
{
    if (k == 0 || k > ls.levels.size())
        return 0.0;
    return interpolate(ls.levels[k - 1], t);
}

double landscape_norm(const Landscape& ls, double p)
{
    if (std::isinf(p)) {
        double best = 0.0;
        for (const auto& level : ls.levels)
            for (const auto& bp : level)
                best = std::max(best, bp.value);
        return best;
    }
    if (!(p >= 1.0))
        throw std::invalid_argument("landscape norm requires p >= 1");
    double total = 0.0;
    for (const auto& level : ls.levels) {
        double integral = 0.0;
        for (std::size_t i = 1; i < level.size(); ++i)
            integral += segment_power_integral(level[i - 1].value, level[i].value,
                                               level[i].t - level[i - 1].t, p);
        total += std::pow(integral, 1.0 / p);
    }
    return total;
}

double landscape_sup_distance(const Landscape& a, const Landscape& b)
{
    static const std::vector<Breakpoint> zero;
    const std::size_t depth = std::max(a.depth(), b.depth());
    double best = 0.0;
    std::vector<double> ts;
    for (std::size_t k = 0; k < depth; ++k) {
        const auto& la = k < a.depth() ? a.levels[k] : zero;
        const auto& lb = k < b.depth() ? b.levels[k] : zero;
        ts.clear();
        for (const auto& bp : la)
            ts.push_back(bp.t);
        for (const auto& bp : lb)
            ts.push_back(bp.t);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        for (double t : ts)
            best = std::max(best, std::abs(interpolate(la, t) - interpolate(lb, t)));
    }
    return best;
}

} // namespace lacuna
