#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lacuna/cubical.hpp"
#include "lacuna/landscape.hpp"
#include "lacuna/mask.hpp"

namespace lacuna {

enum class Metric { euclidean, manhattan, chebyshev };

Metric parse_metric(const std::string& name);
const char* metric_name(Metric m);

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

double distance(Metric metric, Point2 a, Point2 b);

/// Axis-aligned box the image is embedded into, plus the metric used for
/// the distance filtration.
struct EmbeddingSpec
{
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;
    Metric metric = Metric::euclidean;

    void validate() const;
    friend bool operator==(const EmbeddingSpec&, const EmbeddingSpec&) = default;
};

struct GridSpec
{
    std::size_t resolution = 100;

    void validate() const;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Pixel centers for every pixel of the mask, row-major. Row 0 (top of the
/// image) maps to the largest y.
std::vector<Point2> pixel_centers(const BinaryMask& mask, const EmbeddingSpec& emb);

/// Field -d(v, center) at activated pixels; inactive entries are NaN.
FiltrationField distance_filtration(const BinaryMask& mask, Point2 v, const EmbeddingSpec& emb);

/// Reusable evaluator of the interior function for one mask. Keeps the
/// cubical structure and only refilters per query point. Not thread-safe;
/// copy one per worker.
class InteriorEvaluator
{
public:
    InteriorEvaluator(const BinaryMask& mask, const EmbeddingSpec& emb, EssentialPolicy policy);

    double operator()(Point2 v);

    /// Degree-1 diagram of the filtration by -d(v, .).
    PersistenceDiagram diagram(Point2 v);

    /// Same as operator() at node (ix, iy) of the closed G x G lattice over
    /// the embedding box. Node-to-center offsets are integer multiples of a
    /// common unit, so distances that tie exactly also tie in floating point.
    double at_node(std::size_t ix, std::size_t iy, std::size_t resolution);
    PersistenceDiagram diagram_at_node(std::size_t ix, std::size_t iy, std::size_t resolution);

    const FilteredCubicalComplex& complex() const { return complex_; }

private:
    void refilter(Point2 v);
    void refilter_node(std::size_t ix, std::size_t iy, std::size_t resolution);
    double longest_bar();

    const BinaryMask* mask_;
    EmbeddingSpec emb_;
    EssentialPolicy policy_;
    std::vector<Point2> centers_;
    FiltrationField field_;
    FilteredCubicalComplex complex_;
};

/// I(v): longest finite degree-1 bar of the distance filtration from v
/// (essential bars handled by `policy`); 0 for an empty mask.
double interior_value(const BinaryMask& mask, Point2 v, const EmbeddingSpec& emb,
                      const EssentialPolicy& policy = EssentialPolicy::drop());

/// Samples of I over a closed, uniformly spaced G x G node lattice.
struct InteriorGrid
{
    std::size_t resolution = 0;
    EmbeddingSpec box;
    double dx = 0.0;
    double dy = 0.0;
    /// Row-major, iy outer: values[iy * resolution + ix]; y grows with iy.
    std::vector<double> values;

    Point2 node(std::size_t ix, std::size_t iy) const;
    double at(std::size_t ix, std::size_t iy) const { return values[iy * resolution + ix]; }
};

InteriorGrid make_grid(const EmbeddingSpec& emb, const GridSpec& grid);

InteriorGrid interior_grid(const BinaryMask& mask, const EmbeddingSpec& emb, const GridSpec& grid,
                           const EssentialPolicy& policy = EssentialPolicy::drop(),
                           std::size_t jobs = 1);

/// Composite trapezoidal rule: corner weight 1/4, edge 1/2, interior 1.
double trapezoid_integral(const InteriorGrid& grid);

/// CSV `x,y,value`, one line per node in storage order, 17 significant digits.
void write_interior_csv(const InteriorGrid& grid, std::ostream& out);

} // namespace lacuna
