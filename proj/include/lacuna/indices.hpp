#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lacuna/interior.hpp"
#include "lacuna/mask.hpp"

namespace lacuna {

/// Collects non-fatal conditions (zero denominators, out-of-range indices).
struct Diagnostics
{
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

/// Shared settings for every interior-function evaluation of one analysis.
struct AnalysisConfig
{
    EmbeddingSpec embedding;
    GridSpec grid;
    EssentialPolicy policy = EssentialPolicy::drop();
    std::size_t jobs = 1;
};

/// Core K, enhanced E and necrosis N masks with E, N inside K and E u N = K.
struct ImageTriple
{
    BinaryMask core;
    BinaryMask enhanced;
    BinaryMask necrosis;

    /// Necrosis derived as core minus enhanced.
    static ImageTriple derive(BinaryMask core, BinaryMask enhanced);
    /// User supplied necrosis, checked for containment and coverage only.
    static ImageTriple with_necrosis(BinaryMask core, BinaryMask enhanced, BinaryMask necrosis);
};

/// Pixel-wise core AND NOT enhanced. Throws ValidationError naming the first
/// enhanced pixel outside the core.
BinaryMask derive_necrosis(const BinaryMask& core, const BinaryMask& enhanced);

/// Ratio of trapezoid integrals; 0 (with a warning) when the whole integral
/// vanishes. Both grids must share resolution and box.
double lacunarity_from_grids(const InteriorGrid& sub, const InteriorGrid& whole,
                             Diagnostics* diag = nullptr);

double subcomplex_lacunarity(const BinaryMask& whole, const BinaryMask& sub,
                             const AnalysisConfig& cfg, Diagnostics* diag = nullptr);

struct PrimaryIndices
{
    double eta = 0.0;
    double tau = 0.0;
    double integral_core = 0.0;
};

/// eta = omega(K, N), tau = omega(K, E), sharing one evaluation of the core.
PrimaryIndices primary_indices(const ImageTriple& triple, const AnalysisConfig& cfg,
                               Diagnostics* diag = nullptr);

struct SecondaryIndices
{
    double sigma = 0.0;
    double rho = 0.0;
};

SecondaryIndices secondary_indices(double eta, double tau);

struct IndexRecord
{
    std::string patient_id;
    std::string image_id;
    std::size_t active_core = 0;
    std::size_t active_enhanced = 0;
    std::size_t active_necrosis = 0;
    double integral_core = 0.0;
    double eta = 0.0;
    double tau = 0.0;
    double sigma = 0.0;
    double rho = 0.0;
};

/// Full per-image computation. Values of eta or tau above 1 are reported in
/// `diag`, never clipped.
IndexRecord compute_index_record(const std::string& patient_id, const std::string& image_id,
                                 const ImageTriple& triple, const AnalysisConfig& cfg,
                                 Diagnostics* diag = nullptr);

} // namespace lacuna
