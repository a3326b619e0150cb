#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lacuna {

/// Raised when inputs violate a structural contract (mask containment,
/// dimension mismatch, malformed files). Carries a human readable reason.
class ValidationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// W x H grid of activated pixels, row-major, row 0 is the top image row.
class BinaryMask
{
public:
    BinaryMask() = default;
    BinaryMask(std::size_t width, std::size_t height, bool fill = false);
    BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool at(std::size_t col, std::size_t row) const { return bits_[row * width_ + col] != 0; }
    void set(std::size_t col, std::size_t row, bool on) { bits_[row * width_ + col] = on ? 1 : 0; }

    bool operator[](std::size_t index) const { return bits_[index] != 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    std::size_t activation_count() const;
    bool empty() const { return activation_count() == 0; }

    bool same_shape(const BinaryMask& other) const
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) = default;

    /// Parses rows of '#' (on) and '.' (off); all rows must share a length.
    static BinaryMask from_ascii(const std::vector<std::string>& rows);

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// First pixel set in `sub` but not in `whole`, as (col, row); throws
/// ValidationError on shape mismatch. Returns false when sub is contained.
bool find_uncontained(const BinaryMask& whole, const BinaryMask& sub,
                      std::size_t& col, std::size_t& row);

/// Throws ValidationError naming the first pixel of `sub` outside `whole`.
void require_subset(const BinaryMask& whole, const BinaryMask& sub, const std::string& what);

} // namespace lacuna
