#include "lacuna/cubical.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lacuna {

namespace {

// Union-find over dense ids with path halving. Roots are tracked by the
// callers; this only answers find/link.
struct DisjointSets
{
    std::vector<std::uint32_t> parent;

    std::uint32_t find(std::uint32_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

int grid_dim(std::size_t x, std::size_t y)
{
    return static_cast<int>(x & 1U) + static_cast<int>(y & 1U);
}

} // namespace

FilteredCubicalComplex::FilteredCubicalComplex(std::size_t width, std::size_t height,
                                               std::vector<CubicalCell> cells)
    : width_(width), height_(height), cells_(std::move(cells))
{
    index_geometry();
    sort_order();
}

void FilteredCubicalComplex::index_geometry()
{
    const std::size_t gw = 2 * width_ + 1;
    const std::size_t gh = 2 * height_ + 1;
    const std::size_t n = cells_.size();
    if (n >= npos)
        throw std::length_error("cubical complex too large");

    std::vector<std::uint32_t> at_grid(gw * gh, npos);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = cells_[i];
        if (c.grid_id >= gw * gh)
            throw std::invalid_argument("cell grid id " + std::to_string(c.grid_id) +
                                        " outside the cubical grid");
        const int dim = grid_dim(c.grid_id % gw, c.grid_id / gw);
        if (dim != c.dim || c.boundary_size != 2 * c.dim)
            throw std::invalid_argument("cell " + std::to_string(i) +
                                        " has inconsistent dimension or boundary size");
        if (at_grid[c.grid_id] != npos)
            throw std::invalid_argument("duplicate grid id " + std::to_string(c.grid_id));
        at_grid[c.grid_id] = static_cast<std::uint32_t>(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = cells_[i];
        for (std::uint8_t b = 0; b < c.boundary_size; ++b) {
            if (c.boundary[b] >= n || cells_[c.boundary[b]].dim + 1 != c.dim)
                throw std::invalid_argument("cell " + std::to_string(i) + " has a bad face");
        }
    }

    const std::size_t outside = outside_node();
    pixel_cell_.assign(width_ * height_, npos);
    edge_sides_.assign(n, {outside, outside});

    auto side_of_horizontal = [&](std::size_t x, std::size_t y) {
        // edge at (odd x, even y): pixel above and below
        const std::size_t c = (x - 1) / 2;
        std::array<std::size_t, 2> s{outside, outside};
        if (y > 0)
            s[0] = (y / 2 - 1) * width_ + c;
        if (y < 2 * height_)
            s[1] = (y / 2) * width_ + c;
        return s;
    };
    auto side_of_vertical = [&](std::size_t x, std::size_t y) {
        const std::size_t r = (y - 1) / 2;
        std::array<std::size_t, 2> s{outside, outside};
        if (x > 0)
            s[0] = r * width_ + (x / 2 - 1);
        if (x < 2 * width_)
            s[1] = r * width_ + x / 2;
        return s;
    };

    dual_background_.resize(width_ * height_ + 1);
    std::iota(dual_background_.begin(), dual_background_.end(), 0U);
    DisjointSets background{std::move(dual_background_)};

    for (std::size_t y = 0; y < gh; ++y) {
        for (std::size_t x = 0; x < gw; ++x) {
            const int dim = grid_dim(x, y);
            const std::size_t gid = y * gw + x;
            if (dim == 2) {
                if (at_grid[gid] != npos)
                    pixel_cell_[(y / 2) * width_ + x / 2] = at_grid[gid];
                continue;
            }
            if (dim != 1)
                continue;
            const auto sides = (x & 1U) ? side_of_horizontal(x, y) : side_of_vertical(x, y);
            if (at_grid[gid] != npos) {
                edge_sides_[at_grid[gid]] = sides;
            } else {
                const auto a = background.find(static_cast<std::uint32_t>(sides[0]));
                const auto b = background.find(static_cast<std::uint32_t>(sides[1]));
                if (a != b)
                    background.parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    for (std::uint32_t i = 0; i < background.parent.size(); ++i)
        background.parent[i] = background.find(i);
    dual_background_ = std::move(background.parent);
}

void FilteredCubicalComplex::propagate_face_values()
{
    for (auto& c : cells_)
        if (c.dim < 2)
            c.value = kInfinity;
    for (int dim = 2; dim >= 1; --dim) {
        for (const auto& c : cells_) {
            if (c.dim != dim)
                continue;
            for (std::uint8_t b = 0; b < c.boundary_size; ++b) {
                double& face = cells_[c.boundary[b]].value;
                face = std::min(face, c.value);
            }
        }
    }
}

void FilteredCubicalComplex::sort_order()
{
    order_.resize(cells_.size());
    std::iota(order_.begin(), order_.end(), 0U);
    std::sort(order_.begin(), order_.end(), [this](std::uint32_t a, std::uint32_t b) {
        const auto& ca = cells_[a];
        const auto& cb = cells_[b];
        if (ca.value != cb.value)
            return ca.value < cb.value;
        if (ca.dim != cb.dim)
            return ca.dim < cb.dim;
        return ca.grid_id < cb.grid_id;
    });
}

void FilteredCubicalComplex::refilter(const FiltrationField& field)
{
    if (field.values.size() != width_ * height_)
        throw std::invalid_argument("filtration field size does not match the pixel grid");
    for (std::size_t p = 0; p < pixel_cell_.size(); ++p)
        if (pixel_cell_[p] != npos)
            cells_[pixel_cell_[p]].value = field.values[p];
    propagate_face_values();
    sort_order();
}

double FilteredCubicalComplex::max_value() const
{
    double m = -kInfinity;
    for (const auto& c : cells_)
        m = std::max(m, c.value);
    return m;
}

std::size_t PersistenceDiagram::essential_count() const
{
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.essential(); }));
}

PersistenceDiagram PersistenceDiagram::canonical() const
{
    PersistenceDiagram out = *this;
    std::sort(out.pairs.begin(), out.pairs.end(), [](const auto& a, const auto& b) {
        if (a.degree != b.degree)
            return a.degree < b.degree;
        if (a.birth != b.birth)
            return a.birth < b.birth;
        return a.death < b.death;
    });
    return out;
}

FilteredCubicalComplex build_filtered_complex(const BinaryMask& mask, const FiltrationField& field)
{
    const std::size_t w = mask.width();
    const std::size_t h = mask.height();
    if (field.values.size() != mask.size())
        throw std::invalid_argument("filtration field size does not match the mask");

    const std::size_t gw = 2 * w + 1;
    const std::size_t gh = 2 * h + 1;
    std::vector<std::uint8_t> present(gw * gh, 0);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            if (mask.at(c, r))
                for (std::size_t dy = 0; dy < 3; ++dy)
                    for (std::size_t dx = 0; dx < 3; ++dx)
                        present[(2 * r + dy) * gw + 2 * c + dx] = 1;

    std::vector<std::uint32_t> at_grid(gw * gh, FilteredCubicalComplex::npos);
    std::vector<CubicalCell> cells;
    for (std::size_t gid = 0; gid < present.size(); ++gid) {
        if (!present[gid])
            continue;
        at_grid[gid] = static_cast<std::uint32_t>(cells.size());
        CubicalCell cell;
        cell.grid_id = gid;
        cell.dim = static_cast<std::uint8_t>(grid_dim(gid % gw, gid / gw));
        cells.push_back(cell);
    }
    for (auto& cell : cells) {
        const std::size_t x = cell.grid_id % gw;
        const std::size_t y = cell.grid_id / gw;
        auto add = [&](std::size_t fx, std::size_t fy) {
            cell.boundary[cell.boundary_size++] = at_grid[fy * gw + fx];
        };
        if (x & 1U) {
            add(x - 1, y);
            add(x + 1, y);
        }
        if (y & 1U) {
            add(x, y - 1);
            add(x, y + 1);
        }
        if (cell.dim == 2)
            cell.value = field.values[(y / 2) * w + x / 2];
    }

    FilteredCubicalComplex complex(w, h, std::move(cells));
    complex.refilter(field);
    return complex;
}

namespace {

// Degree 1 through the dual graph: walking the filtration backwards, pixels
// open dual components and edges merge them. The younger component (the one
// whose eldest pixel enters the forward filtration first) dies, pairing the
// edge (birth of the 1-cycle) with that pixel (the cycle is filled).
// Components seeded from inactive pixels or the outside never fill.
template <typename Emit>
void dual_h1_pairs(const FilteredCubicalComplex& complex, Emit&& emit)
{
    if (complex.empty())
        return;
    const auto& cells = complex.cells();
    const auto& order = complex.order();
    const std::size_t outside = complex.outside_node();
    constexpr auto npos = FilteredCubicalComplex::npos;

    DisjointSets sets{complex.dual_background()};
    const std::size_t nodes = sets.parent.size();
    // rank: forward position of the eldest pixel; background groups outrank
    // every pixel and the outside outranks everything.
    std::vector<std::uint64_t> rank(nodes, std::numeric_limits<std::uint64_t>::max() - 1);
    std::vector<std::uint32_t> rep(nodes, npos);
    rank[sets.find(static_cast<std::uint32_t>(outside))] = std::numeric_limits<std::uint64_t>::max();

    const std::size_t width = complex.width();
    const std::size_t gw = 2 * width + 1;

    for (std::size_t k = order.size(); k-- > 0;) {
        const std::uint32_t id = order[k];
        const auto& cell = cells[id];
        if (cell.dim == 2) {
            const std::size_t x = cell.grid_id % gw;
            const std::size_t y = cell.grid_id / gw;
            const std::size_t node = (y / 2) * width + x / 2;
            rank[node] = k;
            rep[node] = id;
        } else if (cell.dim == 1) {
            const auto& sides = complex.edge_sides(id);
            auto a = sets.find(static_cast<std::uint32_t>(sides[0]));
            auto b = sets.find(static_cast<std::uint32_t>(sides[1]));
            if (a == b)
                continue;
            if (rank[a] > rank[b] || (rank[a] == rank[b] && a < b))
                std::swap(a, b);
            // a is younger
            const double death = rep[a] == npos ? kInfinity : cells[rep[a]].value;
            if (cell.value < death)
                emit(cell.value, death);
            sets.parent[a] = b;
        }
    }
}

} // namespace

PersistenceDiagram persistence_diagram(const FilteredCubicalComplex& complex, int degree)
{
    if (degree != 0 && degree != 1)
        throw std::invalid_argument("persistence degree must be 0 or 1");
    PersistenceDiagram out;
    if (complex.empty())
        return out;

    if (degree == 1) {
        dual_h1_pairs(complex, [&](double birth, double death) {
            out.pairs.push_back({birth, death, 1});
        });
        return out;
    }

    const auto& cells = complex.cells();
    const auto& order = complex.order();
    DisjointSets sets;
    sets.parent.resize(cells.size());
    std::iota(sets.parent.begin(), sets.parent.end(), 0U);
    std::vector<std::uint32_t> position(cells.size());
    for (std::uint32_t k = 0; k < order.size(); ++k)
        position[order[k]] = k;

    // Root of a vertex component is always its eldest vertex.
    for (const std::uint32_t id : order) {
        const auto& cell = cells[id];
        if (cell.dim != 1)
            continue;
        auto a = sets.find(cell.boundary[0]);
        auto b = sets.find(cell.boundary[1]);
        if (a == b)
            continue;
        if (position[a] < position[b])
            std::swap(a, b);
        // a is younger
        if (cells[a].value < cell.value)
            out.pairs.push_back({cells[a].value, cell.value, 0});
        sets.parent[a] = b;
    }
    for (const std::uint32_t id : order)
        if (cells[id].dim == 0 && sets.find(id) == id)
            out.pairs.push_back({cells[id].value, kInfinity, 0});
    return out;
}

double longest_finite_h1(const FilteredCubicalComplex& complex)
{
    double best = 0.0;
    dual_h1_pairs(complex, [&](double birth, double death) {
        if (death != kInfinity)
            best = std::max(best, death - birth);
    });
    return best;
}

PersistenceDiagram naive_reduction_oracle(const FilteredCubicalComplex& complex, int degree)
{
    if (degree != 0 && degree != 1)
        throw std::invalid_argument("persistence degree must be 0 or 1");
    if (complex.size() > kOracleCellBudget)
        throw std::length_error("naive reduction oracle refuses complexes over " +
                                std::to_string(kOracleCellBudget) + " cells");

    const auto& cells = complex.cells();
    const auto& order = complex.order();
    const std::size_t n = cells.size();
    std::vector<std::uint32_t> position(n);
    for (std::uint32_t k = 0; k < n; ++k)
        position[order[k]] = k;

    std::vector<std::vector<std::uint32_t>> columns(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        const auto& cell = cells[order[j]];
        for (std::uint8_t b = 0; b < cell.boundary_size; ++b)
            columns[j].push_back(position[cell.boundary[b]]);
        std::sort(columns[j].begin(), columns[j].end());
    }

    constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> pivot_owner(n, none);
    std::vector<bool> paired(n, false);
    PersistenceDiagram out;
    std::vector<std::uint32_t> scratch;

    for (std::uint32_t j = 0; j < n; ++j) {
        auto& col = columns[j];
        while (!col.empty() && pivot_owner[col.back()] != none) {
            const auto& other = columns[pivot_owner[col.back()]];
            scratch.clear();
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(scratch));
            col.swap(scratch);
        }
        if (col.empty())
            continue;
        const std::uint32_t low = col.back();
        pivot_owner[low] = j;
        paired[low] = paired[j] = true;
        const auto& creator = cells[order[low]];
        const auto& destroyer = cells[order[j]];
        if (creator.dim == degree && creator.value < destroyer.value)
            out.pairs.push_back({creator.value, destroyer.value, degree});
    }
    for (std::uint32_t j = 0; j < n; ++j) {
        const auto& cell = cells[order[j]];
        if (!paired[j] && cell.dim == degree)
            out.pairs.push_back({cell.value, kInfinity, degree});
    }
    return out;
}

} // namespace lacuna
