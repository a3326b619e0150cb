// lacuna: interior functions, lacunarity indices and primary-index-diagram
// clustering for binary image masks.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lacuna/image_io.hpp"
#include "lacuna/indices.hpp"
#include "lacuna/interior.hpp"
#include "lacuna/pipeline.hpp"
#include "lacuna/svg.hpp"
#include "lacuna/text.hpp"

namespace {

using namespace lacuna;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ComputeOptions
{
    std::size_t grid = 100;
    std::string metric = "euclidean";
    std::string essential = "drop";
    double cap_value = std::numeric_limits<double>::quiet_NaN();
    std::string box = "-1,1,-1,1";
    int threshold = 1;
    std::size_t jobs = 0;
};

void add_compute_options(CLI::App* cmd, ComputeOptions& o)
{
    cmd->add_option("--grid", o.grid, "Grid nodes per axis")->check(CLI::Range(2, 100000));
    cmd->add_option("--metric", o.metric, "euclidean | manhattan | chebyshev")
        ->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));
    cmd->add_option("--essential", o.essential, "Essential interval policy: drop | cap")
        ->check(CLI::IsMember({"drop", "cap"}));
    cmd->add_option("--cap-value", o.cap_value,
                    "Death value for capped essential intervals (default: max filtration value)");
    cmd->add_option("--box", o.box, "Embedding box xmin,xmax,ymin,ymax");
    cmd->add_option("--threshold", o.threshold, "Gray level at or above which a pixel is active")
        ->check(CLI::Range(0, 255));
    cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores; LACUNA_THREADS overrides)");
}

std::size_t effective_jobs(std::size_t requested)
{
    if (const char* env = std::getenv("LACUNA_THREADS")) {
        try {
            return static_cast<std::size_t>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError("LACUNA_THREADS must be a non-negative integer");
        }
    }
    return requested;
}

AnalysisConfig analysis_config(const ComputeOptions& o)
{
    AnalysisConfig cfg;
    cfg.grid.resolution = o.grid;
    cfg.embedding.metric = parse_metric(o.metric);
    std::stringstream ss(o.box);
    std::string part;
    double v[4];
    int count = 0;
    while (std::getline(ss, part, ',')) {
        if (count == 4)
            throw UsageError("--box takes exactly four comma separated numbers");
        try {
            std::size_t used = 0;
            v[count] = std::stod(part, &used);
            if (used != part.size())
                throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw UsageError("--box: bad number '" + part + "'");
        }
        ++count;
    }
    if (count != 4)
        throw UsageError("--box takes exactly four comma separated numbers");
    cfg.embedding.x_min = v[0];
    cfg.embedding.x_max = v[1];
    cfg.embedding.y_min = v[2];
    cfg.embedding.y_max = v[3];
    try {
        cfg.embedding.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (o.essential == "cap")
        cfg.policy = std::isnan(o.cap_value) ? EssentialPolicy::cap_at_max()
                                              : EssentialPolicy::cap_at(o.cap_value);
    cfg.jobs = effective_jobs(o.jobs);
    return cfg;
}

void write_text(const std::string& path, const std::string& content)
{
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(path + ": cannot open for writing");
    out << content;
    if (!out)
        throw ValidationError(path + ": write failed");
}

void print_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

std::string file_stem(const std::string& path)
{
    const auto slash = path.find_last_of('/');
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s)
{
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos)
            throw std::invalid_argument(s);
        std::size_t used_a = 0, used_b = 0;
        const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
        const auto lo = std::stoul(a, &used_a);
        const auto hi = std::stoul(b, &used_b);
        if (used_a != a.size() || used_b != b.size() || lo > hi)
            throw std::invalid_argument(s);
        return {lo, hi};
    } catch (const std::exception&) {
        throw UsageError("--k-range expects A:B with A <= B, got '" + s + "'");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interior functions, lacunarity indices and primary index diagram clustering"};
    app.require_subcommand(1);

    // interior
    ComputeOptions interior_opts;
    std::string interior_mask, interior_out;
    auto* interior = app.add_subcommand("interior", "Sample the interior function of one mask");
    interior->add_option("--mask", interior_mask, "PGM or PNG mask")->required();
    interior->add_option("--out", interior_out, "CSV output (x,y,value) or - for stdout")->required();
    add_compute_options(interior, interior_opts);

    // indices
    ComputeOptions indices_opts;
    std::string core_path, enhanced_path, necrosis_path, indices_out, patient_id = "single", image_id;
    auto* indices = app.add_subcommand("indices", "Lacunarity indices of one core/enhanced pair");
    indices->add_option("--core", core_path, "Core mask")->required();
    indices->add_option("--enhanced", enhanced_path, "Enhanced mask")->required();
    indices->add_option("--necrosis", necrosis_path, "Necrosis mask (default: core minus enhanced)");
    indices->add_option("--patient-id", patient_id, "Patient id written to the record");
    indices->add_option("--image-id", image_id, "Image id (default: core file stem)");
    indices->add_option("--out", indices_out, "Indices CSV or - for stdout")->required();
    add_compute_options(indices, indices_opts);

    // batch
    ComputeOptions batch_opts;
    std::string manifest_path, batch_out, timing_out;
    double drop_bottom = 0.10;
    auto* batch = app.add_subcommand("batch", "Indices for every row of a manifest");
    batch->add_option("--manifest", manifest_path, "Manifest CSV")->required();
    batch->add_option("--drop-bottom", drop_bottom,
                      "Fraction of lowest-activation images to exclude")
        ->check(CLI::Range(0.0, 0.999999999));
    batch->add_option("--out", batch_out, "Indices CSV")->required();
    batch->add_option("--timing-out", timing_out, "Per-row timing CSV");
    add_compute_options(batch, batch_opts);

    // cluster
    std::string cluster_indices, cluster_out, scan_out, svg_out, k_range, from_clusters;
    std::size_t k = 0, cluster_id = 0;
    bool per_patient = false;
    KMeansConfig kmeans;
    auto* cluster = app.add_subcommand("cluster", "K-means and silhouette analysis of indices");
    cluster->add_option("--indices", cluster_indices, "Indices CSV")->required();
    auto* k_opt = cluster->add_option("--k", k, "Single cluster count")->check(CLI::Range(2, 100000));
    auto* range_opt = cluster->add_option("--k-range", k_range, "Cluster count range A:B");
    k_opt->excludes(range_opt);
    cluster->add_flag("--per-patient-median", per_patient, "Cluster per-patient median vectors");
    cluster->add_option("--seed", kmeans.seed, "Seed for k-means++ initialization");
    cluster->add_option("--restarts", kmeans.restarts, "Independent initializations")
        ->check(CLI::Range(1, 100000));
    cluster->add_option("--max-iters", kmeans.max_iters, "Lloyd iterations per restart")
        ->check(CLI::Range(1, 10000000));
    cluster->add_option("--out", cluster_out, "Cluster assignment CSV")->required();
    cluster->add_option("--scan-out", scan_out, "Silhouette scan CSV (k-range mode)");
    cluster->add_option("--svg", svg_out, "Primary index diagram SVG");
    auto* from_opt = cluster->add_option("--from-clusters", from_clusters,
                                         "Restrict to one cluster of a previous cluster CSV");
    cluster->add_option("--cluster-id", cluster_id, "Cluster id selected by --from-clusters")
        ->needs(from_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*interior) {
            const auto cfg = analysis_config(interior_opts);
            const BinaryMask mask = load_mask(interior_mask, interior_opts.threshold);
            const auto grid = interior_grid(mask, cfg.embedding, cfg.grid, cfg.policy, cfg.jobs);
            std::ostringstream csv;
            write_interior_csv(grid, csv);
            write_text(interior_out, csv.str());
            std::cerr << "integral=" << format_real(trapezoid_integral(grid)) << '\n';
        } else if (*indices) {
            const auto cfg = analysis_config(indices_opts);
            BinaryMask core = load_mask(core_path, indices_opts.threshold);
            BinaryMask enhanced = load_mask(enhanced_path, indices_opts.threshold);
            const ImageTriple triple =
                necrosis_path.empty()
                    ? ImageTriple::derive(std::move(core), std::move(enhanced))
                    : ImageTriple::with_necrosis(std::move(core), std::move(enhanced),
                                                 load_mask(necrosis_path, indices_opts.threshold));
            Diagnostics diag;
            const IndexRecord rec = compute_index_record(
                patient_id, image_id.empty() ? file_stem(core_path) : image_id, triple, cfg, &diag);
            print_warnings(diag.warnings);
            std::ostringstream csv;
            write_indices_csv(std::span<const IndexRecord>(&rec, 1), csv);
            write_text(indices_out, csv.str());
        } else if (*batch) {
            RunConfig cfg;
            cfg.analysis = analysis_config(batch_opts);
            cfg.jobs = cfg.analysis.jobs;
            cfg.threshold = batch_opts.threshold;
            cfg.drop_fraction = drop_bottom;
            const Manifest manifest = Manifest::load(manifest_path);
            const BatchResult result = run_batch(manifest, cfg, &std::cerr);
            write_batch_outputs(result, batch_out);
            if (!timing_out.empty()) {
                std::ostringstream t;
                write_timing_csv(result.timings, result.total_seconds, t);
                write_text(timing_out, t.str());
            }
            print_warnings(result.warnings);
            std::cerr << "rows=" << manifest.rows.size() << " computed=" << result.records.size()
                      << " dropped=" << result.dropped.size() << " errors=" << result.errors.size()
                      << '\n';
            if (!result.errors.empty())
                std::cerr << "warning: " << result.errors.size() << " row(s) failed; see "
                          << batch_out << ".errors.csv\n";
        } else if (*cluster) {
            if (!*k_opt && k_range.empty())
                throw UsageError("cluster needs --k or --k-range");
            std::ifstream in(cluster_indices);
            if (!in)
                throw ValidationError(cluster_indices + ": cannot open indices CSV");
            std::vector<IndexRecord> records = read_indices_csv(in, cluster_indices);
            if (!from_clusters.empty()) {
                std::ifstream cin(from_clusters);
                if (!cin)
                    throw ValidationError(from_clusters + ": cannot open cluster CSV");
                records = select_cluster(records, cin, cluster_id, from_clusters);
            }
            ClusterRequest req;
            req.kmeans = kmeans;
            req.per_patient_median = per_patient;
            if (*k_opt) {
                req.k = k;
            } else {
                std::tie(req.k_min, req.k_max) = parse_range(k_range);
            }
            const ClusterReport report = run_cluster(records, req);
            std::ostringstream csv;
            write_cluster_csv(report, csv);
            write_text(cluster_out, csv.str());
            if (report.scan && !scan_out.empty()) {
                std::ostringstream scan;
                write_scan_csv(*report.scan, scan);
                write_text(scan_out, scan.str());
            }
            if (!svg_out.empty())
                emit_primary_diagram_svg(report.points, report.result.assignments, svg_out);
            if (report.scan)
                for (const auto& row : *report.scan)
                    std::cout << "k=" << row.k << " mean_silhouette=" << format_real(row.mean_silhouette)
                              << '\n';
            std::cout << "best_k=" << report.chosen_k
                      << " mean_silhouette=" << format_real(report.result.silhouette_mean) << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
