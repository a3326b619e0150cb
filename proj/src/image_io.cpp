#include "lacuna/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

namespace lacuna {

namespace {

bool has_png_signature(const std::string& bytes)
{
    static const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= 8 && std::equal(sig, sig + 8, reinterpret_cast<const unsigned char*>(bytes.data()));
}

class PgmReader
{
public:
    PgmReader(const std::string& path, const std::string& bytes) : path_(path), bytes_(bytes) {}

    GrayImage read()
    {
        if (bytes_.size() < 2 || bytes_[0] != 'P' || (bytes_[1] != '2' && bytes_[1] != '5'))
            fail("not a P2/P5 PGM or PNG file");
        const bool binary = bytes_[1] == '5';
        pos_ = 2;
        GrayImage img;
        img.width = next_number();
        img.height = next_number();
        const std::size_t maxval = next_number();
        if (img.width == 0 || img.height == 0)
            fail("zero image dimension");
        if (maxval == 0 || maxval > 255)
            fail("unsupported PGM maxval " + std::to_string(maxval) + " (8-bit only)");

        const std::size_t count = img.width * img.height;
        img.pixels.resize(count);
        if (binary) {
            if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
                fail("malformed P5 header");
            ++pos_;
            if (bytes_.size() - pos_ < count)
                fail("truncated P5 pixel data");
            for (std::size_t i = 0; i < count; ++i)
                img.pixels[i] = static_cast<std::uint8_t>(bytes_[pos_ + i]);
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t v = next_number();
                if (v > maxval)
                    fail("pixel value exceeds maxval");
                img.pixels[i] = static_cast<std::uint8_t>(v);
            }
        }
        return img;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw ValidationError(path_ + ": " + why);
    }

    void skip_space()
    {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t next_number()
    {
        skip_space();
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
            fail("expected a number at byte " + std::to_string(pos_));
        std::size_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            if (v > (1U << 30))
                fail("number too large");
            ++pos_;
        }
        return v;
    }

    const std::string& path_;
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

GrayImage read_png(const std::string& path, const std::string& bytes)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw ValidationError(path + ": unreadable PNG (" + image.message + ")");
    const auto format = image.format;
    if (format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw ValidationError(path + ": 16-bit PNG is not supported (8-bit only)");
    }
    if ((format & PNG_FORMAT_FLAG_COLOR) && !(format & PNG_FORMAT_FLAG_COLORMAP)) {
        png_image_free(&image);
        throw ValidationError(path + ": truecolor PNG is not supported (grayscale or palette only)");
    }
    image.format = PNG_FORMAT_GRAY;
    GrayImage out;
    out.width = image.width;
    out.height = image.height;
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw ValidationError(path + ": PNG decode failed (" + msg + ")");
    }
    return out;
}

} // namespace

GrayImage load_gray(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(path + ": cannot open image");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (has_png_signature(bytes))
        return read_png(path, bytes);
    return PgmReader(path, bytes).read();
}

BinaryMask threshold_image(const GrayImage& image, int threshold)
{
    std::vector<std::uint8_t> bits(image.pixels.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = image.pixels[i] >= threshold ? 1 : 0;
    return BinaryMask(image.width, image.height, std::move(bits));
}

BinaryMask load_mask(const std::string& path, int threshold)
{
    if (threshold < 0 || threshold > 255)
        throw ValidationError("threshold must lie in [0, 255]");
    return threshold_image(load_gray(path), threshold);
}

void write_pgm(const BinaryMask& mask, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(path + ": cannot write image");
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    for (std::size_t i = 0; i < mask.size(); ++i)
        out.put(mask[i] ? static_cast<char>(255) : static_cast<char>(0));
    if (!out)
        throw ValidationError(path + ": write failed");
}

} // namespace lacuna
