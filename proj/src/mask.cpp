#include "lacuna/mask.hpp"

#include <algorithm>

namespace lacuna {

BinaryMask::BinaryMask(std::size_t width, std::size_t height, bool fill)
    : width_(width), height_(height), bits_(width * height, fill ? 1 : 0)
{
}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits))
{
    if (bits_.size() != width_ * height_)
        throw ValidationError("mask bit count " + std::to_string(bits_.size()) +
                              " does not match " + std::to_string(width_) + "x" +
                              std::to_string(height_));
    for (auto& b : bits_)
        b = b ? 1 : 0;
}

std::size_t BinaryMask::activation_count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::from_ascii(const std::vector<std::string>& rows)
{
    if (rows.empty())
        return {};
    const std::size_t w = rows.front().size();
    BinaryMask m(w, rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != w)
            throw ValidationError("ragged ascii mask at row " + std::to_string(r));
        for (std::size_t c = 0; c < w; ++c)
            m.set(c, r, rows[r][c] == '#');
    }
    return m;
}

bool find_uncontained(const BinaryMask& whole, const BinaryMask& sub,
                      std::size_t& col, std::size_t& row)
{
    if (!whole.same_shape(sub))
        throw ValidationError("mask dimensions differ: " + std::to_string(whole.width()) + "x" +
                              std::to_string(whole.height()) + " vs " +
                              std::to_string(sub.width()) + "x" + std::to_string(sub.height()));
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (sub[i] && !whole[i]) {
            col = i % sub.width();
            row = i / sub.width();
            return true;
        }
    }
    return false;
}

void require_subset(const BinaryMask& whole, const BinaryMask& sub, const std::string& what)
{
    std::size_t col = 0, row = 0;
    if (find_uncontained(whole, sub, col, row))
        throw ValidationError(what + ": pixel (col " + std::to_string(col) + ", row " +
                              std::to_string(row) + ") is active outside the containing mask");
}

} // namespace lacuna
