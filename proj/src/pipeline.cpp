#include "lacuna/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "lacuna/image_io.hpp"
#include "lacuna/parallel.hpp"
#include "lacuna/text.hpp"

namespace lacuna {

namespace fs = std::filesystem;

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& p)
{
    const fs::path path(p);
    if (path.is_absolute() || base_dir.empty())
        return path.string();
    return (fs::path(base_dir) / path).string();
}

double parse_real(const std::string& field, const std::string& where)
{
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (field.empty() || end != begin + field.size())
        throw ValidationError(where + ": expected a number, got '" + field + "'");
    return v;
}

std::size_t parse_count(const std::string& field, const std::string& where)
{
    if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError(where + ": expected a non-negative integer, got '" + field + "'");
    return static_cast<std::size_t>(std::stoull(field));
}

std::string strip_cr(std::string line)
{
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return line;
}

bool entry_before(const ActivationEntry& a, const ActivationEntry& b)
{
    if (a.activation != b.activation)
        return a.activation < b.activation;
    if (a.patient_id != b.patient_id)
        return a.patient_id < b.patient_id;
    return a.image_id < b.image_id;
}

} // namespace

Manifest Manifest::parse(std::istream& in, const std::string& base_dir, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(source + ": empty manifest");
    const auto header = split_csv_line(line);
    const std::vector<std::string> required{"patient_id", "image_id", "core_path", "enhanced_path"};
    const bool has_necrosis = header.size() == 5 && header[4] == "necrosis_path";
    if (header.size() < 4 || !std::equal(required.begin(), required.end(), header.begin()) ||
        (header.size() == 5 && !has_necrosis) || header.size() > 5)
        throw ValidationError(source + ":1: manifest header must be "
                              "patient_id,image_id,core_path,enhanced_path[,necrosis_path]");

    Manifest m;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (f.size() != header.size())
            throw ValidationError(where + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(f.size()));
        ManifestRow row{f[0], f[1], resolve_path(base_dir, f[2]), resolve_path(base_dir, f[3]),
                        std::nullopt};
        if (has_necrosis && !f[4].empty())
            row.necrosis_path = resolve_path(base_dir, f[4]);
        if (row.patient_id.empty() || row.image_id.empty())
            throw ValidationError(where + ": empty patient_id or image_id");
        if (!seen.emplace(row.patient_id, row.image_id).second)
            throw ValidationError(where + ": duplicate (patient_id, image_id) " + row.patient_id +
                                  "/" + row.image_id);
        m.rows.push_back(std::move(row));
    }
    return m;
}

Manifest Manifest::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError(path + ": cannot open manifest");
    Manifest m = parse(in, fs::path(path).parent_path().string(), path);
    for (const auto& row : m.rows) {
        for (const std::string* p : {&row.core_path, &row.enhanced_path}) {
            if (!fs::exists(*p))
                throw ValidationError(path + ": missing file " + *p);
        }
        if (row.necrosis_path && !fs::exists(*row.necrosis_path))
            throw ValidationError(path + ": missing file " + *row.necrosis_path);
    }
    return m;
}

void RunConfig::validate() const
{
    analysis.embedding.validate();
    analysis.grid.validate();
    if (threshold < 0 || threshold > 255)
        throw ValidationError("threshold must lie in [0, 255]");
    if (!(drop_fraction >= 0.0 && drop_fraction < 1.0))
        throw ValidationError("drop fraction must lie in [0, 1)");
}

FilterResult filter_low_activation(std::span<const ActivationEntry> entries, double drop_fraction)
{
    if (!(drop_fraction >= 0.0 && drop_fraction < 1.0))
        throw ValidationError("drop fraction must lie in [0, 1)");
    std::vector<std::size_t> idx(entries.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return entry_before(entries[a], entries[b]); });
    const auto drop = static_cast<std::size_t>(
        std::floor(drop_fraction * static_cast<double>(entries.size())));

    FilterResult out;
    std::vector<bool> dropped(entries.size(), false);
    for (std::size_t i = 0; i < drop; ++i) {
        out.dropped.push_back(entries[idx[i]].row);
        dropped[idx[i]] = true;
    }
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (!dropped[i])
            out.retained.push_back(entries[i].row);
    return out;
}

BatchResult run_batch(const Manifest& manifest, const RunConfig& cfg, std::ostream* log)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = manifest.rows.size();
    std::mutex log_mutex;
    auto say = [&](const std::string& msg) {
        if (!log)
            return;
        std::lock_guard lock(log_mutex);
        *log << msg << '\n';
        log->flush();
    };

    // Stage 1: cores, for the activation filter.
    std::vector<BinaryMask> cores(n);
    std::vector<std::optional<std::string>> failure(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i, std::size_t) {
        try {
            cores[i] = load_mask(manifest.rows[i].core_path, cfg.threshold);
        } catch (const std::exception& e) {
            failure[i] = e.what();
        }
    });

    std::vector<ActivationEntry> entries;
    for (std::size_t i = 0; i < n; ++i)
        if (!failure[i])
            entries.push_back({i, cores[i].activation_count(), manifest.rows[i].patient_id,
                               manifest.rows[i].image_id});
    const FilterResult filtered = filter_low_activation(entries, cfg.drop_fraction);
    if (filtered.retained.empty())
        throw ValidationError("no manifest rows left to process after loading and filtering");

    BatchResult result;
    for (std::size_t row : filtered.dropped)
        result.dropped.push_back({manifest.rows[row], cores[row].activation_count()});

    // Stage 2: indices for retained rows.
    const auto& retained = filtered.retained;
    const std::size_t row_workers = std::min(resolve_jobs(cfg.jobs), retained.size());
    AnalysisConfig analysis = cfg.analysis;
    analysis.jobs = std::max<std::size_t>(1, resolve_jobs(cfg.jobs) / row_workers);

    std::vector<std::optional<IndexRecord>> records(retained.size());
    std::vector<Diagnostics> diags(retained.size());
    std::vector<double> seconds(retained.size(), 0.0);
    parallel_for(retained.size(), row_workers, [&](std::size_t slot, std::size_t) {
        const std::size_t i = retained[slot];
        const auto& row = manifest.rows[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            BinaryMask enhanced = load_mask(row.enhanced_path, cfg.threshold);
            ImageTriple triple =
                row.necrosis_path
                    ? ImageTriple::with_necrosis(cores[i], std::move(enhanced),
                                                 load_mask(*row.necrosis_path, cfg.threshold))
                    : ImageTriple::derive(cores[i], std::move(enhanced));
            records[slot] =
                compute_index_record(row.patient_id, row.image_id, triple, analysis, &diags[slot]);
        } catch (const std::exception& e) {
            failure[i] = e.what();
        }
        seconds[slot] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        say("timing patient_id=" + row.patient_id + " image_id=" + row.image_id +
            " seconds=" + format_real(seconds[slot]) + (failure[i] ? " status=error" : " status=ok"));
    });

    for (std::size_t slot = 0; slot < retained.size(); ++slot) {
        const auto& row = manifest.rows[retained[slot]];
        for (auto& w : diags[slot].warnings)
            result.warnings.push_back(row.patient_id + "/" + row.image_id + ": " + w);
        if (records[slot]) {
            result.records.push_back(std::move(*records[slot]));
            result.timings.push_back({row.patient_id, row.image_id, seconds[slot]});
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (failure[i])
            result.errors.push_back({manifest.rows[i], *failure[i]});

    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    say("timing total rows=" + std::to_string(retained.size()) +
        " seconds=" + format_real(result.total_seconds));
    return result;
}

void write_indices_csv(std::span<const IndexRecord> records, std::ostream& out)
{
    out << kIndicesHeader << '\n';
    for (const auto& r : records) {
        out << csv_field(r.patient_id) << ',' << csv_field(r.image_id) << ',' << r.active_core << ','
            << r.active_enhanced << ',' << r.active_necrosis << ',' << format_real(r.integral_core)
            << ',' << format_real(r.eta) << ',' << format_real(r.tau) << ','
            << format_real(r.sigma) << ',' << format_real(r.rho) << '\n';
    }
}

std::vector<IndexRecord> read_indices_csv(std::istream& in, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kIndicesHeader)
        throw ValidationError(source + ":1: expected header " + std::string(kIndicesHeader));
    std::vector<IndexRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto f = split_csv_line(line);
        if (f.size() != 10)
            throw ValidationError(where + ": expected 10 fields, got " + std::to_string(f.size()));
        IndexRecord r;
        r.patient_id = f[0];
        r.image_id = f[1];
        r.active_core = parse_count(f[2], where);
        r.active_enhanced = parse_count(f[3], where);
        r.active_necrosis = parse_count(f[4], where);
        r.integral_core = parse_real(f[5], where);
        r.eta = parse_real(f[6], where);
        r.tau = parse_real(f[7], where);
        r.sigma = parse_real(f[8], where);
        r.rho = parse_real(f[9], where);
        if (!std::isfinite(r.eta) || !std::isfinite(r.tau))
            throw ValidationError(where + ": non-finite eta or tau");
        out.push_back(std::move(r));
    }
    return out;
}

void write_dropped_csv(std::span<const DroppedRow> rows, std::ostream& out)
{
    out << "patient_id,image_id,active_core\n";
    for (const auto& d : rows)
        out << csv_field(d.row.patient_id) << ',' << csv_field(d.row.image_id) << ','
            << d.active_core << '\n';
}

void write_errors_csv(std::span<const RowError> rows, std::ostream& out)
{
    out << "patient_id,image_id,error\n";
    for (const auto& e : rows)
        out << csv_field(e.row.patient_id) << ',' << csv_field(e.row.image_id) << ','
            << csv_field(e.message) << '\n';
}

void write_timing_csv(std::span<const RowTiming> rows, double total_seconds, std::ostream& out)
{
    out << "patient_id,image_id,seconds\n";
    for (const auto& t : rows)
        out << csv_field(t.patient_id) << ',' << csv_field(t.image_id) << ','
            << format_real(t.seconds) << '\n';
    out << "TOTAL,," << format_real(total_seconds) << '\n';
}

namespace {

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError(path + ": cannot open for writing");
    out << content;
    if (!out)
        throw ValidationError(path + ": write failed");
}

} // namespace

void write_batch_outputs(const BatchResult& result, const std::string& out_path)
{
    std::ostringstream main, dropped, errors;
    write_indices_csv(result.records, main);
    write_dropped_csv(result.dropped, dropped);
    write_errors_csv(result.errors, errors);
    write_file(out_path, main.str());
    write_file(out_path + ".dropped.csv", dropped.str());
    write_file(out_path + ".errors.csv", errors.str());
}

ClusterReport run_cluster(std::span<const IndexRecord> records, const ClusterRequest& request)
{
    ClusterReport report;
    if (request.per_patient_median) {
        report.points = patient_medians(records);
    } else {
        for (const auto& r : records)
            report.points.push_back({r.eta, r.tau, r.patient_id, r.image_id});
    }

    if (request.k) {
        KMeansConfig cfg = request.kmeans;
        cfg.k = *request.k;
        report.result = kmeans_fit(report.points, cfg);
        report.chosen_k = cfg.k;
        return report;
    }
    ScanResult scan = silhouette_scan(report.points, request.k_min, request.k_max, request.kmeans);
    report.result = std::move(scan.best);
    report.chosen_k = scan.best_k;
    report.scan = std::move(scan.rows);
    return report;
}

std::vector<IndexRecord> select_cluster(std::span<const IndexRecord> records,
                                        std::istream& cluster_csv, std::size_t cluster_id,
                                        const std::string& source)
{
    std::string line;
    if (!std::getline(cluster_csv, line) ||
        strip_cr(line) != "patient_id,image_id,eta,tau,cluster,silhouette")
        throw ValidationError(source + ":1: expected a cluster CSV header");
    std::set<std::pair<std::string, std::string>> keep;
    std::size_t line_no = 1;
    while (std::getline(cluster_csv, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (f.size() != 6)
            throw ValidationError(where + ": expected 6 fields, got " + std::to_string(f.size()));
        if (parse_count(f[4], where) == cluster_id)
            keep.emplace(f[0], f[1]);
    }
    std::vector<IndexRecord> out;
    for (const auto& r : records)
        if (keep.count({r.patient_id, r.image_id}))
            out.push_back(r);
    return out;
}

void write_cluster_csv(const ClusterReport& report, std::ostream& out)
{
    out << "patient_id,image_id,eta,tau,cluster,silhouette\n";
    const auto& res = report.result;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const auto& p = report.points[i];
        const double s = res.silhouette_per_point.empty() ? 0.0 : res.silhouette_per_point[i];
        out << csv_field(p.patient_id) << ',' << csv_field(p.image_id) << ',' << format_real(p.eta)
            << ',' << format_real(p.tau) << ',' << res.assignments[i] << ',' << format_real(s)
            << '\n';
    }
}

void write_scan_csv(std::span<const ScanRow> rows, std::ostream& out)
{
    out << "k,mean_silhouette\n";
    for (const auto& r : rows)
        out << r.k << ',' << format_real(r.mean_silhouette) << '\n';
}

} // namespace lacuna
