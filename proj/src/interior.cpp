#include "lacuna/interior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lacuna/parallel.hpp"
#include "lacuna/text.hpp"

namespace lacuna {

Metric parse_metric(const std::string& name)
{
    if (name == "euclidean")
        return Metric::euclidean;
    if (name == "manhattan")
        return Metric::manhattan;
    if (name == "chebyshev")
        return Metric::chebyshev;
    throw std::invalid_argument("unknown metric '" + name + "'");
}

const char* metric_name(Metric m)
{
    switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::chebyshev: return "chebyshev";
    }
    return "?";
}

double distance(Metric metric, Point2 a, Point2 b)
{
    const double dx = std::abs(a.x - b.x);
    const double dy = std::abs(a.y - b.y);
    switch (metric) {
    case Metric::euclidean: return std::hypot(dx, dy);
    case Metric::manhattan: return dx + dy;
    case Metric::chebyshev: return std::max(dx, dy);
    }
    return 0.0;
}

void EmbeddingSpec::validate() const
{
    if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(x_max - x_min) ||
        !std::isfinite(y_max - y_min))
        throw std::invalid_argument("embedding box must have positive finite area");
}

void GridSpec::validate() const
{
    if (resolution < 2)
        throw std::invalid_argument("grid resolution must be at least 2");
}

std::vector<Point2> pixel_centers(const BinaryMask& mask, const EmbeddingSpec& emb)
{
    const double w = static_cast<double>(mask.width());
    const double h = static_cast<double>(mask.height());
    std::vector<Point2> out;
    out.reserve(mask.size());
    for (std::size_t r = 0; r < mask.height(); ++r) {
        // flip: image row 0 is the top edge of the box
        const double y = emb.y_max - (static_cast<double>(r) + 0.5) * (emb.y_max - emb.y_min) / h;
        for (std::size_t c = 0; c < mask.width(); ++c) {
            const double x = emb.x_min + (static_cast<double>(c) + 0.5) * (emb.x_max - emb.x_min) / w;
            out.push_back({x, y});
        }
    }
    return out;
}

namespace {

void fill_field(const BinaryMask& mask, const std::vector<Point2>& centers, Point2 v, Metric metric,
                FiltrationField& field)
{
    field.values.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        field.values[i] = mask[i] ? -distance(metric, v, centers[i])
                                  : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

FiltrationField distance_filtration(const BinaryMask& mask, Point2 v, const EmbeddingSpec& emb)
{
    FiltrationField field;
    fill_field(mask, pixel_centers(mask, emb), v, emb.metric, field);
    return field;
}

InteriorEvaluator::InteriorEvaluator(const BinaryMask& mask, const EmbeddingSpec& emb,
                                     EssentialPolicy policy)
    : mask_(&mask), emb_(emb), policy_(policy), centers_(pixel_centers(mask, emb))
{
    emb_.validate();
    fill_field(mask, centers_, {0.0, 0.0}, emb_.metric, field_);
    if (!mask.empty())
        complex_ = build_filtered_complex(mask, field_);
}

void InteriorEvaluator::refilter(Point2 v)
{
    fill_field(*mask_, centers_, v, emb_.metric, field_);
    complex_.refilter(field_);
}

void InteriorEvaluator::refilter_node(std::size_t ix, std::size_t iy, std::size_t resolution)
{
    if (resolution < 2 || ix >= resolution || iy >= resolution)
        throw std::invalid_argument("lattice node out of range");
    const auto w = static_cast<std::int64_t>(mask_->width());
    const auto h = static_cast<std::int64_t>(mask_->height());
    const auto g1 = static_cast<std::int64_t>(resolution - 1);
    // node - center along x is span_x * (2W ix - (2c + 1)(G - 1)) / (2W (G - 1)),
    // and likewise along y with rows counted from the top edge
    const double ux = (emb_.x_max - emb_.x_min) / static_cast<double>(2 * w * g1);
    const double uy = (emb_.y_max - emb_.y_min) / static_cast<double>(2 * h * g1);
    const bool square_units = ux == uy;
    const auto px = 2 * w * static_cast<std::int64_t>(ix);
    const auto py = 2 * h * static_cast<std::int64_t>(iy);

    field_.values.resize(mask_->size());
    for (std::int64_t r = 0; r < h; ++r) {
        const std::int64_t ny = std::abs(py - (2 * h - 2 * r - 1) * g1);
        for (std::int64_t c = 0; c < w; ++c) {
            const auto i = static_cast<std::size_t>(r * w + c);
            if (!(*mask_)[i]) {
                field_.values[i] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const std::int64_t nx = std::abs(px - (2 * c + 1) * g1);
            double d = 0.0;
            switch (emb_.metric) {
            case Metric::euclidean:
                d = square_units ? ux * std::sqrt(static_cast<double>(nx * nx + ny * ny))
                                 : std::hypot(ux * static_cast<double>(nx), uy * static_cast<double>(ny));
                break;
            case Metric::manhattan:
                d = square_units ? ux * static_cast<double>(nx + ny)
                                 : ux * static_cast<double>(nx) + uy * static_cast<double>(ny);
                break;
            case Metric::chebyshev:
                d = square_units ? ux * static_cast<double>(std::max(nx, ny))
                                 : std::max(ux * static_cast<double>(nx), uy * static_cast<double>(ny));
                break;
            }
            field_.values[i] = -d;
        }
    }
    complex_.refilter(field_);
}

double InteriorEvaluator::longest_bar()
{
    if (policy_.kind == EssentialPolicy::Kind::drop)
        return longest_finite_h1(complex_);

    EssentialPolicy resolved = policy_;
    if (!resolved.has_value)
        resolved = EssentialPolicy::cap_at(complex_.max_value());
    double best = 0.0;
    for (const auto& pair : finite_pairs(persistence_diagram(complex_, 1), resolved))
        best = std::max(best, pair.length());
    return best;
}

PersistenceDiagram InteriorEvaluator::diagram(Point2 v)
{
    if (complex_.empty())
        return {};
    refilter(v);
    return persistence_diagram(complex_, 1);
}

double InteriorEvaluator::operator()(Point2 v)
{
    if (complex_.empty())
        return 0.0;
    refilter(v);
    return longest_bar();
}

PersistenceDiagram InteriorEvaluator::diagram_at_node(std::size_t ix, std::size_t iy,
                                                      std::size_t resolution)
{
    if (complex_.empty())
        return {};
    refilter_node(ix, iy, resolution);
    return persistence_diagram(complex_, 1);
}

double InteriorEvaluator::at_node(std::size_t ix, std::size_t iy, std::size_t resolution)
{
    if (complex_.empty())
        return 0.0;
    refilter_node(ix, iy, resolution);
    return longest_bar();
}

double interior_value(const BinaryMask& mask, Point2 v, const EmbeddingSpec& emb,
                      const EssentialPolicy& policy)
{
    InteriorEvaluator eval(mask, emb, policy);
    return eval(v);
}

Point2 InteriorGrid::node(std::size_t ix, std::size_t iy) const
{
    const double g = static_cast<double>(resolution - 1);
    return {box.x_min + (box.x_max - box.x_min) * static_cast<double>(ix) / g,
            box.y_min + (box.y_max - box.y_min) * static_cast<double>(iy) / g};
}

InteriorGrid make_grid(const EmbeddingSpec& emb, const GridSpec& grid)
{
    emb.validate();
    grid.validate();
    InteriorGrid out;
    out.resolution = grid.resolution;
    out.box = emb;
    const double g = static_cast<double>(grid.resolution - 1);
    out.dx = (emb.x_max - emb.x_min) / g;
    out.dy = (emb.y_max - emb.y_min) / g;
    out.values.assign(grid.resolution * grid.resolution, 0.0);
    return out;
}

InteriorGrid interior_grid(const BinaryMask& mask, const EmbeddingSpec& emb, const GridSpec& grid,
                           const EssentialPolicy& policy, std::size_t jobs)
{
    InteriorGrid out = make_grid(emb, grid);
    if (mask.empty())
        return out;

    const InteriorEvaluator prototype(mask, emb, policy);
    const std::size_t g = grid.resolution;
    const std::size_t workers = std::min(resolve_jobs(jobs), g);
    std::vector<InteriorEvaluator> evaluators(workers, prototype);
    // one task per lattice row keeps scheduling overhead negligible
    parallel_for(g, workers, [&](std::size_t iy, std::size_t worker) {
        auto& eval = evaluators[worker];
        for (std::size_t ix = 0; ix < g; ++ix)
            out.values[iy * g + ix] = eval.at_node(ix, iy, g);
    });
    return out;
}

double trapezoid_integral(const InteriorGrid& grid)
{
    const std::size_t g = grid.resolution;
    if (g < 2)
        throw std::invalid_argument("trapezoid rule needs at least 2 nodes per axis");
    double sum = 0.0;
    for (std::size_t iy = 0; iy < g; ++iy) {
        const double wy = (iy == 0 || iy == g - 1) ? 0.5 : 1.0;
        double row = 0.0;
        for (std::size_t ix = 0; ix < g; ++ix) {
            const double wx = (ix == 0 || ix == g - 1) ? 0.5 : 1.0;
            row += wx * grid.at(ix, iy);
        }
        sum += wy * row;
    }
    return sum * grid.dx * grid.dy;
}

void write_interior_csv(const InteriorGrid& grid, std::ostream& out)
{
    out << "x,y,value\n";
    for (std::size_t iy = 0; iy < grid.resolution; ++iy) {
        for (std::size_t ix = 0; ix < grid.resolution; ++ix) {
            const Point2 p = grid.node(ix, iy);
            out << format_real(p.x) << ',' << format_real(p.y) << ',' << format_real(grid.at(ix, iy))
                << '\n';
        }
    }
}

} // namespace lacuna
