#include "lacuna/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace lacuna {

namespace {

double squared_distance(const DiagramPoint& p, const Centroid& c)
{
    const double dx = p.tau - c.tau;
    const double dy = p.eta - c.eta;
    return dx * dx + dy * dy;
}

double point_distance(const DiagramPoint& a, const DiagramPoint& b)
{
    return std::hypot(a.tau - b.tau, a.eta - b.eta);
}

// Uniform in [0, 1) from the top 53 bits; the std distributions are not
// specified bit-exactly across standard libraries.
double unit_uniform(std::mt19937_64& gen)
{
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::vector<Centroid> seed_plus_plus(std::span<const DiagramPoint> points, std::size_t k,
                                     std::mt19937_64& gen)
{
    const std::size_t n = points.size();
    std::vector<Centroid> centroids;
    std::vector<bool> chosen(n, false);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t i) {
        chosen[i] = true;
        centroids.push_back({points[i].tau, points[i].eta});
        for (std::size_t j = 0; j < n; ++j)
            nearest[j] = std::min(nearest[j], squared_distance(points[j], centroids.back()));
    };

    take(std::min(n - 1, static_cast<std::size_t>(unit_uniform(gen) * static_cast<double>(n))));
    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : nearest)
            total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = unit_uniform(gen) * total;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (nearest[j] <= 0.0)
                    continue;
                acc += nearest[j];
                pick = j;
                if (acc > target)
                    break;
            }
        } else {
            // every point coincides with a centroid already
            for (std::size_t j = 0; j < n && pick == n; ++j)
                if (!chosen[j])
                    pick = j;
        }
        take(pick);
    }
    return centroids;
}

std::size_t nearest_centroid(const DiagramPoint& p, const std::vector<Centroid>& centroids)
{
    std::size_t best = 0;
    double best_d = squared_distance(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

double assign(std::span<const DiagramPoint> points, std::vector<Centroid>& centroids,
              std::vector<std::size_t>& labels)
{
    const std::size_t k = centroids.size();
    for (std::size_t i = 0; i < points.size(); ++i)
        labels[i] = nearest_centroid(points[i], centroids);

    // An emptied centroid moves onto the point farthest from its own centroid.
    std::vector<std::size_t> counts(k, 0);
    for (auto l : labels)
        ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0)
            continue;
        std::size_t far = points.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (counts[labels[i]] < 2)
                continue;
            const double d = squared_distance(points[i], centroids[labels[i]]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == points.size())
            break;
        --counts[labels[far]];
        labels[far] = c;
        counts[c] = 1;
        centroids[c] = {points[far].tau, points[far].eta};
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        inertia += squared_distance(points[i], centroids[labels[i]]);
    return inertia;
}

ClusterResult lloyd(std::span<const DiagramPoint> points, const KMeansConfig& cfg,
                    std::mt19937_64& gen)
{
    ClusterResult res;
    res.centroids = seed_plus_plus(points, cfg.k, gen);
    res.assignments.assign(points.size(), 0);

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        res.inertia_trace.push_back(assign(points, res.centroids, res.assignments));
        res.iterations = it + 1;

        std::vector<Centroid> sums(cfg.k);
        std::vector<std::size_t> counts(cfg.k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[res.assignments[i]].tau += points[i].tau;
            sums[res.assignments[i]].eta += points[i].eta;
            ++counts[res.assignments[i]];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < cfg.k; ++c) {
            if (counts[c] == 0)
                continue;
            const Centroid next{sums[c].tau / static_cast<double>(counts[c]),
                                sums[c].eta / static_cast<double>(counts[c])};
            shift = std::max(shift, std::hypot(next.tau - res.centroids[c].tau,
                                               next.eta - res.centroids[c].eta));
            res.centroids[c] = next;
        }
        if (shift <= cfg.tol)
            break;
    }
    res.inertia = assign(points, res.centroids, res.assignments);
    res.inertia_trace.push_back(res.inertia);
    return res;
}

std::size_t populated_clusters(std::span<const std::size_t> assignments)
{
    std::vector<std::size_t> ids(assignments.begin(), assignments.end());
    std::sort(ids.begin(), ids.end());
    return static_cast<std::size_t>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1)
        return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2;
}

} // namespace

void KMeansConfig::validate() const
{
    if (k < 2)
        throw std::invalid_argument("k-means needs k >= 2");
    if (restarts < 1)
        throw std::invalid_argument("k-means needs at least one restart");
    if (max_iters < 1)
        throw std::invalid_argument("k-means needs max_iters >= 1");
    if (!(tol >= 0.0))
        throw std::invalid_argument("k-means tolerance must be non-negative");
}

ClusterResult kmeans_fit(std::span<const DiagramPoint> points, const KMeansConfig& cfg)
{
    cfg.validate();
    if (points.size() < cfg.k)
        throw std::invalid_argument("k-means needs at least k points (have " +
                                    std::to_string(points.size()) + ", k = " +
                                    std::to_string(cfg.k) + ")");
    for (const auto& p : points)
        if (!std::isfinite(p.tau) || !std::isfinite(p.eta))
            throw std::invalid_argument("non-finite diagram point " + p.patient_id + "/" +
                                        p.image_id);

    ClusterResult best;
    bool have = false;
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                          static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 gen(seq);
        ClusterResult res = lloyd(points, cfg, gen);
        res.restart = r;
        if (!have || res.inertia < best.inertia) {
            best = std::move(res);
            have = true;
        }
    }

    if (populated_clusters(best.assignments) >= 2) {
        best.silhouette_per_point = silhouette_samples(points, best.assignments);
        double sum = 0.0;
        for (double s : best.silhouette_per_point)
            sum += s;
        best.silhouette_mean = sum / static_cast<double>(points.size());
    } else {
        best.silhouette_mean = std::numeric_limits<double>::quiet_NaN();
    }
    return best;
}

std::vector<double> silhouette_samples(std::span<const DiagramPoint> points,
                                       std::span<const std::size_t> assignments)
{
    if (points.size() != assignments.size())
        throw std::invalid_argument("silhouette: one assignment per point required");
    if (populated_clusters(assignments) < 2)
        throw std::invalid_argument("silhouette is undefined for a single cluster");

    const std::size_t k = *std::max_element(assignments.begin(), assignments.end()) + 1;
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assignments)
        ++sizes[a];

    std::vector<double> out(points.size(), 0.0);
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t own = assignments[i];
        if (sizes[own] < 2)
            continue;
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < points.size(); ++j)
            if (j != i)
                sums[assignments[j]] += point_distance(points[i], points[j]);
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own && sizes[c] > 0)
                b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        const double denom = std::max(a, b);
        out[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return out;
}

ScanResult silhouette_scan(std::span<const DiagramPoint> points, std::size_t k_min,
                           std::size_t k_max, const KMeansConfig& cfg)
{
    if (k_min < 2 || k_max < k_min || k_max + 1 > points.size())
        throw std::invalid_argument("k range must lie within [2, n - 1] for n = " +
                                    std::to_string(points.size()));
    ScanResult out;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KMeansConfig c = cfg;
        c.k = k;
        ClusterResult res = kmeans_fit(points, c);
        if (std::isnan(res.silhouette_mean))
            throw std::invalid_argument("silhouette undefined at k = " + std::to_string(k) +
                                        ": only one cluster populated");
        out.rows.push_back({k, res.silhouette_mean});
        if (res.silhouette_mean > best) {
            best = res.silhouette_mean;
            out.best_k = k;
            out.best = std::move(res);
        }
    }
    return out;
}

std::vector<DiagramPoint> patient_medians(std::span<const IndexRecord> records)
{
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : records) {
        auto& g = groups[r.patient_id];
        g.first.push_back(r.tau);
        g.second.push_back(r.eta);
    }
    std::vector<DiagramPoint> out;
    out.reserve(groups.size());
    for (auto& [patient, g] : groups) {
        DiagramPoint p;
        p.patient_id = patient;
        p.image_id = "median";
        p.tau = median_of(std::move(g.first));
        p.eta = median_of(std::move(g.second));
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace lacuna
