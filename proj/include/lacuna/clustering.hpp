#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lacuna/indices.hpp"

namespace lacuna {

/// One point of the primary index diagram: x = tau, y = eta.
struct DiagramPoint
{
    double eta = 0.0;
    double tau = 0.0;
    std::string patient_id;
    std::string image_id;
};

struct KMeansConfig
{
    std::size_t k = 4;
    std::uint64_t seed = 0;
    std::size_t restarts = 10;
    std::size_t max_iters = 300;
    double tol = 1e-6;

    void validate() const;
};

struct Centroid
{
    double tau = 0.0;
    double eta = 0.0;
};

struct ClusterResult
{
    std::vector<std::size_t> assignments;
    std::vector<Centroid> centroids;
    double inertia = 0.0;
    /// NaN when fewer than two clusters are populated.
    double silhouette_mean = 0.0;
    std::vector<double> silhouette_per_point;

    /// Inertia after every assignment step of the winning restart.
    std::vector<double> inertia_trace;
    std::size_t iterations = 0;
    std::size_t restart = 0;
};

/// Lloyd iterations from k-means++ seeds, best of `restarts` by inertia.
/// Deterministic for a given point order and config.
ClusterResult kmeans_fit(std::span<const DiagramPoint> points, const KMeansConfig& cfg);

/// Per-point silhouette on Euclidean (tau, eta); singleton clusters score 0.
std::vector<double> silhouette_samples(std::span<const DiagramPoint> points,
                                       std::span<const std::size_t> assignments);

struct ScanRow
{
    std::size_t k = 0;
    double mean_silhouette = 0.0;
};

struct ScanResult
{
    std::vector<ScanRow> rows;
    std::size_t best_k = 0;
    ClusterResult best;
};

/// kmeans_fit and mean silhouette for every k in [k_min, k_max]. The argmax
/// keeps the smallest k on ties.
ScanResult silhouette_scan(std::span<const DiagramPoint> points, std::size_t k_min,
                           std::size_t k_max, const KMeansConfig& cfg);

/// Component-wise median of (tau, eta) per patient, sorted by patient id.
std::vector<DiagramPoint> patient_medians(std::span<const IndexRecord> records);

} // namespace lacuna
