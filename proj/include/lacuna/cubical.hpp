#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "lacuna/mask.hpp"

namespace lacuna {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Scalar field on the pixels of a mask, indexed like BinaryMask (row-major).
/// Only entries at activated pixels are read.
struct FiltrationField
{
    std::vector<double> values;
};

struct CubicalCell
{
    std::uint8_t dim = 0;
    std::uint8_t boundary_size = 0;
    double value = 0.0;
    /// Row-major index in the (2W+1) x (2H+1) cubical grid. Pixel (c, r)
    /// sits at grid (2c+1, 2r+1); edges and vertices fill the rest.
    std::size_t grid_id = 0;
    /// Positions of the faces in the owning complex's cell list.
    std::array<std::uint32_t, 4> boundary{};
};

/// Sublevel-filtered 2D cubical complex in the T-construction: activated
/// pixels are 2-cells and every face carries the minimum value over its
/// incident activated pixels.
class FilteredCubicalComplex
{
public:
    FilteredCubicalComplex() = default;

    /// Takes an explicit cell list over a width x height pixel grid. The
    /// cells may arrive in any order; the filtration order is recomputed.
    FilteredCubicalComplex(std::size_t width, std::size_t height, std::vector<CubicalCell> cells);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    bool empty() const { return cells_.empty(); }
    std::size_t size() const { return cells_.size(); }

    const std::vector<CubicalCell>& cells() const { return cells_; }

    /// Cell positions sorted by (value, dim, grid_id).
    const std::vector<std::uint32_t>& order() const { return order_; }

    /// Replaces pixel values with `field`, recomputes face minima and the
    /// filtration order. The cell structure is left untouched.
    void refilter(const FiltrationField& field);

    double max_value() const;

    /// Dual node of an edge side: a pixel index or `outside_node()`.
    std::size_t outside_node() const { return width_ * height_; }
    const std::array<std::size_t, 2>& edge_sides(std::uint32_t cell) const
    {
        return edge_sides_[cell];
    }
    /// Cell position of the 2-cell over pixel `index`, or npos when inactive.
    std::uint32_t pixel_cell(std::size_t index) const { return pixel_cell_[index]; }

    /// Union-find parents over dual nodes with inactive pixels and the
    /// outside already merged across edges absent from the complex.
    const std::vector<std::uint32_t>& dual_background() const { return dual_background_; }

    static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

private:
    void index_geometry();
    void propagate_face_values();
    void sort_order();

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<CubicalCell> cells_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> pixel_cell_;
    std::vector<std::array<std::size_t, 2>> edge_sides_;
    std::vector<std::uint32_t> dual_background_;
};

struct PersistencePair
{
    double birth = 0.0;
    double death = kInfinity;
    int degree = 0;

    bool essential() const { return death == kInfinity; }
    double length() const { return death - birth; }

    friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram
{
    std::vector<PersistencePair> pairs;

    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
    std::size_t essential_count() const;

    /// Pairs sorted by (degree, birth, death); canonical form for multiset
    /// comparison.
    PersistenceDiagram canonical() const;
};

FilteredCubicalComplex build_filtered_complex(const BinaryMask& mask, const FiltrationField& field);

/// Persistence pairs of the given degree (0 or 1) over Z/2. Degree 0 uses
/// union-find along the filtration; degree 1 uses union-find on the dual
/// graph in reverse filtration order (planar duality). Zero-length pairs are
/// dropped.
PersistenceDiagram persistence_diagram(const FilteredCubicalComplex& complex, int degree);

/// Longest finite degree-1 bar, 0 when none. Same pairing as
/// persistence_diagram without materializing the diagram.
double longest_finite_h1(const FilteredCubicalComplex& complex);

/// Textbook left-to-right column reduction over Z/2; test oracle.
inline constexpr std::size_t kOracleCellBudget = 10000;
PersistenceDiagram naive_reduction_oracle(const FilteredCubicalComplex& complex, int degree);

} // namespace lacuna
