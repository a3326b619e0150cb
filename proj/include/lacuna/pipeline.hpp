#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lacuna/clustering.hpp"
#include "lacuna/indices.hpp"

namespace lacuna {

struct ManifestRow
{
    std::string patient_id;
    std::string image_id;
    std::string core_path;
    std::string enhanced_path;
    std::optional<std::string> necrosis_path;
};

/// Rows of `patient_id,image_id,core_path,enhanced_path[,necrosis_path]`.
/// Relative paths resolve against the manifest's directory.
struct Manifest
{
    std::vector<ManifestRow> rows;

    static Manifest parse(std::istream& in, const std::string& base_dir,
                          const std::string& source = "manifest");
    /// Also checks that every referenced file exists.
    static Manifest load(const std::string& path);
};

struct RunConfig
{
    AnalysisConfig analysis;
    int threshold = 1;
    double drop_fraction = 0.10;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ActivationEntry
{
    std::size_t row = 0; ///< position in the candidate list
    std::size_t activation = 0;
    std::string patient_id;
    std::string image_id;
};

struct FilterResult
{
    std::vector<std::size_t> retained; ///< candidate positions, input order
    std::vector<std::size_t> dropped;  ///< candidate positions, lowest count first
};

/// Drops floor(drop_fraction * n) entries with the lowest activation count;
/// ties broken by (patient_id, image_id).
FilterResult filter_low_activation(std::span<const ActivationEntry> entries, double drop_fraction);

struct RowError
{
    ManifestRow row;
    std::string message;
};

struct DroppedRow
{
    ManifestRow row;
    std::size_t active_core = 0;
};

struct RowTiming
{
    std::string patient_id;
    std::string image_id;
    double seconds = 0.0;
};

struct BatchResult
{
    std::vector<IndexRecord> records; ///< manifest order
    std::vector<DroppedRow> dropped;
    std::vector<RowError> errors;     ///< manifest order
    std::vector<std::string> warnings;
    std::vector<RowTiming> timings;   ///< parallel to records
    double total_seconds = 0.0;
};

/// Loads every row, applies the activation filter, computes indices with
/// `cfg.jobs` workers. Row failures land in `errors`; an empty retained set
/// throws ValidationError. Progress and timing lines go to `log` if given.
BatchResult run_batch(const Manifest& manifest, const RunConfig& cfg, std::ostream* log = nullptr);

inline constexpr const char* kIndicesHeader =
    "patient_id,image_id,active_core,active_enhanced,active_necrosis,integral_core,eta,tau,sigma,rho";

void write_indices_csv(std::span<const IndexRecord> records, std::ostream& out);
/// Throws ValidationError with the offending line number on malformed input.
std::vector<IndexRecord> read_indices_csv(std::istream& in, const std::string& source = "indices");

void write_dropped_csv(std::span<const DroppedRow> rows, std::ostream& out);
void write_errors_csv(std::span<const RowError> rows, std::ostream& out);
void write_timing_csv(std::span<const RowTiming> rows, double total_seconds, std::ostream& out);

/// Writes the indices CSV to `out_path` plus `<out_path>.dropped.csv` and
/// `<out_path>.errors.csv`.
void write_batch_outputs(const BatchResult& result, const std::string& out_path);

struct ClusterRequest
{
    std::optional<std::size_t> k; ///< single k; otherwise scan [k_min, k_max]
    std::size_t k_min = 3;
    std::size_t k_max = 6;
    bool per_patient_median = false;
    KMeansConfig kmeans;
};

struct ClusterReport
{
    std::vector<DiagramPoint> points;
    ClusterResult result;
    std::optional<std::vector<ScanRow>> scan;
    std::size_t chosen_k = 0;
};

ClusterReport run_cluster(std::span<const IndexRecord> records, const ClusterRequest& request);

/// Keeps records whose (patient_id, image_id) was assigned `cluster_id` in a
/// previous cluster CSV.
std::vector<IndexRecord> select_cluster(std::span<const IndexRecord> records,
                                        std::istream& cluster_csv, std::size_t cluster_id,
                                        const std::string& source = "clusters");

void write_cluster_csv(const ClusterReport& report, std::ostream& out);
void write_scan_csv(std::span<const ScanRow> rows, std::ostream& out);

} // namespace lacuna
