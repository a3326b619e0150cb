#include "lacuna/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lacuna/mask.hpp"

namespace lacuna {

namespace {

constexpr double kLeft = 70.0;
constexpr double kTop = 30.0;
constexpr double kSide = 360.0;
constexpr double kWidth = 560.0;
constexpr double kHeight = 460.0;

// Tableau 10
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

double to_x(double tau) { return kLeft + tau * kSide; }
double to_y(double eta) { return kTop + (1.0 - eta) * kSide; }

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::string primary_diagram_svg(std::span<const DiagramPoint> points,
                                std::span<const std::size_t> assignments)
{
    const bool colored = !assignments.empty();
    if (colored && assignments.size() != points.size())
        throw ValidationError("svg: one cluster assignment per point required");

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth)
        << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' '
        << num(kHeight) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"white\"/>\n";

    // frame, grid and ticks
    svg << "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
        << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kSide)
        << "\" height=\"" << num(kSide) << "\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i * 0.2;
        svg << "<line x1=\"" << num(to_x(v)) << "\" y1=\"" << num(to_y(0.0)) << "\" x2=\""
            << num(to_x(v)) << "\" y2=\"" << num(to_y(0.0) + 5) << "\"/>\n"
            << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(to_y(v)) << "\" x2=\""
            << num(kLeft) << "\" y2=\"" << num(to_y(v)) << "\"/>\n";
    }
    svg << "</g>\n<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i * 0.2;
        char label[8];
        std::snprintf(label, sizeof(label), "%.1f", v);
        svg << "<text x=\"" << num(to_x(v)) << "\" y=\"" << num(to_y(0.0) + 20)
            << "\" text-anchor=\"middle\">" << label << "</text>\n"
            << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(to_y(v) + 4)
            << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + kSide / 2) << "\" y=\"" << num(to_y(0.0) + 42)
        << "\" text-anchor=\"middle\">tumour mass lacunarity (tau)</text>\n"
        << "<text x=\"" << num(20) << "\" y=\"" << num(kTop + kSide / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << num(kTop + kSide / 2)
        << ")\">necrotic lacunarity (eta)</text>\n</g>\n";

    svg << "<g id=\"points\" stroke=\"black\" stroke-width=\"0.5\">\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const char* fill = colored ? kPalette[assignments[i] % kPaletteSize] : kPalette[0];
        svg << "<circle cx=\"" << num(to_x(points[i].tau)) << "\" cy=\"" << num(to_y(points[i].eta))
            << "\" r=\"3\" fill=\"" << fill << "\"";
        if (colored)
            svg << " class=\"cluster-" << assignments[i] << "\"";
        svg << "><title>" << xml_escape(points[i].patient_id) << ' '
            << xml_escape(points[i].image_id) << "</title></circle>\n";
    }
    svg << "</g>\n";

    if (colored) {
        const std::set<std::size_t> ids(assignments.begin(), assignments.end());
        svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
        double y = kTop + 10;
        for (std::size_t id : ids) {
            svg << "<circle cx=\"" << num(kLeft + kSide + 25) << "\" cy=\"" << num(y)
                << "\" r=\"4\" fill=\"" << kPalette[id % kPaletteSize]
                << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n"
                << "<text x=\"" << num(kLeft + kSide + 35) << "\" y=\"" << num(y + 4)
                << "\">cluster " << id << "</text>\n";
            y += 18;
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_primary_diagram_svg(std::span<const DiagramPoint> points,
                              std::span<const std::size_t> assignments, const std::string& path)
{
    const std::string doc = primary_diagram_svg(points, assignments);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(path + ": cannot write svg");
    out << doc;
    if (!out)
        throw ValidationError(path + ": svg write failed");
}

} // namespace lacuna
