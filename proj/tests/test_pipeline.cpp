#include <doctest.h>

#include <png.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lacuna/image_io.hpp"
#include "lacuna/pipeline.hpp"
#include "lacuna/svg.hpp"
#include "support/oracles.hpp"

using namespace lacuna;
using namespace lacuna::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;

    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("lacuna-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_png(const std::string& path, std::uint32_t w, std::uint32_t h, std::uint32_t format,
               const std::vector<std::uint8_t>& bytes)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = w;
    image.height = h;
    image.format = format;
    REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr) != 0);
}

IndexRecord record(std::string patient, std::string image, double eta, double tau)
{
    IndexRecord r;
    r.patient_id = std::move(patient);
    r.image_id = std::move(image);
    r.eta = eta;
    r.tau = tau;
    const auto s = secondary_indices(eta, tau);
    r.sigma = s.sigma;
    r.rho = s.rho;
    return r;
}

} // namespace

TEST_CASE("PGM decoding")
{
    TempDir dir;
    write_text(dir.file("a.pgm"), "P2\n# comment\n2 2\n255\n255 0\n0 255\n");
    const auto m = load_mask(dir.file("a.pgm"));
    CHECK(m.width() == 2);
    CHECK(m.at(0, 0));
    CHECK_FALSE(m.at(1, 0));
    CHECK_FALSE(m.at(0, 1));
    CHECK(m.at(1, 1));

    write_pgm(m, dir.file("b.pgm"));
    CHECK(load_mask(dir.file("b.pgm")) == m);
    CHECK(read_text(dir.file("b.pgm")).rfind("P5\n2 2\n255\n", 0) == 0);

    write_text(dir.file("gray.pgm"), "P2 3 1 255 10 128 200");
    CHECK(load_mask(dir.file("gray.pgm"), 128).bits() == std::vector<std::uint8_t>{0, 1, 1});
    CHECK(load_mask(dir.file("gray.pgm"), 0).activation_count() == 3);

    write_text(dir.file("short.pgm"), std::string("P5\n4 4\n255\n") + "abc");
    CHECK_THROWS_AS(load_mask(dir.file("short.pgm")), ValidationError);
    write_text(dir.file("junk.pgm"), "hello");
    CHECK_THROWS_AS(load_mask(dir.file("junk.pgm")), ValidationError);
    try {
        load_mask(dir.file("missing.pgm"));
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("missing.pgm") != std::string::npos);
    }
}

TEST_CASE("PNG decoding")
{
    TempDir dir;
    write_png(dir.file("g.png"), 3, 2, PNG_FORMAT_GRAY, {0, 255, 7, 255, 0, 0});
    const auto m = load_mask(dir.file("g.png"));
    CHECK(m.bits() == std::vector<std::uint8_t>{0, 1, 1, 1, 0, 0});
    CHECK(load_mask(dir.file("g.png"), 8).activation_count() == 2);

    write_png(dir.file("ga.png"), 2, 1, PNG_FORMAT_GA, {255, 255, 0, 255});
    CHECK(load_mask(dir.file("ga.png")).bits() == std::vector<std::uint8_t>{1, 0});

    write_png(dir.file("rgb.png"), 1, 1, PNG_FORMAT_RGB, {255, 255, 255});
    CHECK_THROWS_AS(load_mask(dir.file("rgb.png")), ValidationError);

    write_png(dir.file("deep.png"), 1, 1, PNG_FORMAT_LINEAR_Y, {0xff, 0xff});
    CHECK_THROWS_AS(load_mask(dir.file("deep.png")), ValidationError);
}

TEST_CASE("manifest parsing")
{
    std::istringstream ok("patient_id,image_id,core_path,enhanced_path\r\n"
                          "P1,img1,c1.pgm,/abs/e1.pgm\n"
                          "\n"
                          "P1,img2,c2.pgm,e2.pgm\n");
    const auto m = Manifest::parse(ok, "/data");
    REQUIRE(m.rows.size() == 2);
    CHECK(m.rows[0].core_path == "/data/c1.pgm");
    CHECK(m.rows[0].enhanced_path == "/abs/e1.pgm");
    CHECK_FALSE(m.rows[0].necrosis_path);

    std::istringstream with_n("patient_id,image_id,core_path,enhanced_path,necrosis_path\n"
                              "P1,i,c,e,n\n");
    CHECK(Manifest::parse(with_n, "d").rows[0].necrosis_path.has_value());

    auto error_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            Manifest::parse(in, ".", "m.csv");
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of("").find("m.csv") != std::string::npos);
    CHECK(error_of("patient,image,core,enh\n").find("m.csv:1") != std::string::npos);
    CHECK(error_of("patient_id,image_id,core_path,enhanced_path\nP,i,c\n").find("m.csv:2") !=
          std::string::npos);
    CHECK(error_of("patient_id,image_id,core_path,enhanced_path\nP,i,c,e\nP,i,c,e\n")
              .find("m.csv:3") != std::string::npos);

    TempDir dir;
    write_text(dir.file("m.csv"), "patient_id,image_id,core_path,enhanced_path\nP,i,nope.pgm,e.pgm\n");
    CHECK_THROWS_AS(Manifest::load(dir.file("m.csv")), ValidationError);
}

TEST_CASE("low activation filter")
{
    std::vector<ActivationEntry> entries;
    for (std::size_t i = 0; i < 10; ++i)
        entries.push_back({i, 100 + (i * 7) % 10, "P" + std::to_string(i), "x"});
    entries[6].activation = 3;
    auto f = filter_low_activation(entries, 0.10);
    CHECK(f.retained.size() == 9);
    CHECK(f.dropped == std::vector<std::size_t>{6});
    CHECK(std::is_sorted(f.retained.begin(), f.retained.end()));

    f = filter_low_activation(entries, 0.0);
    CHECK(f.retained.size() == 10);
    CHECK(f.dropped.empty());

    std::vector<ActivationEntry> many;
    for (std::size_t i = 0; i < 1183; ++i)
        many.push_back({i, (i * 37) % 101, "P" + std::to_string(i % 93), std::to_string(i)});
    f = filter_low_activation(many, 0.10);
    CHECK(f.dropped.size() == 118);
    CHECK(f.retained.size() == 1065);

    // ties fall back to patient then image id
    std::vector<ActivationEntry> tied{{0, 5, "B", "1"}, {1, 5, "A", "2"}, {2, 5, "A", "1"}};
    CHECK(filter_low_activation(tied, 0.5).dropped == std::vector<std::size_t>{2});
}

TEST_CASE("batch run")
{
    TempDir dir;
    std::ostringstream manifest;
    manifest << "patient_id,image_id,core_path,enhanced_path\n";
    for (int i = 0; i < 10; ++i) {
        const auto core = disk_mask(9, 2.5 + 0.2 * i);
        auto enh = core;
        for (std::size_t r = 3; r < 6; ++r)
            for (std::size_t c = 3; c < 6; ++c)
                if (i % 2)
                    enh.set(c, r, false);
        const std::string id = std::to_string(i);
        write_pgm(core, dir.file("c" + id + ".pgm"));
        write_pgm(enh, dir.file("e" + id + ".pgm"));
        manifest << "P" << i / 3 << ",img" << i << ",c" << id << ".pgm,e" << id << ".pgm\n";
    }
    // enhanced outside the core, and an undecodable core
    write_pgm(block_mask(9, 9, 0, 0, 9, 9), dir.file("big.pgm"));
    manifest << "P9,bad,c9.pgm,big.pgm\n";
    write_text(dir.file("broken.pgm"), "P5\n9 9\n255\n");
    manifest << "P9,broken,broken.pgm,e0.pgm\n";
    write_text(dir.file("m.csv"), manifest.str());

    const auto m = Manifest::load(dir.file("m.csv"));
    REQUIRE(m.rows.size() == 12);

    RunConfig cfg;
    cfg.analysis.grid.resolution = 11;
    std::ostringstream log;
    const auto serial = run_batch(m, cfg, &log);
    CHECK(serial.dropped.size() == 1);
    CHECK(serial.dropped[0].row.image_id == "img0");
    CHECK(serial.errors.size() == 2);
    CHECK(serial.records.size() == 9);
    CHECK(serial.timings.size() == serial.records.size());
    CHECK(log.str().find("timing total rows=10") != std::string::npos);
    CHECK(log.str().find("status=error") != std::string::npos);

    std::set<std::string> seen;
    for (const auto& r : serial.records)
        CHECK(seen.insert(r.image_id).second);
    for (const auto& d : serial.dropped)
        CHECK(seen.insert(d.row.image_id).second);
    for (const auto& e : serial.errors)
        CHECK(seen.insert(e.row.image_id).second);
    CHECK(seen.size() == 12);

    for (const auto& r : serial.records) {
        CHECK(r.sigma == r.tau - r.eta);
        CHECK(r.rho == (r.tau + r.eta) / 2);
    }

    cfg.jobs = 4;
    const auto parallel = run_batch(m, cfg);
    std::ostringstream a, b;
    write_indices_csv(serial.records, a);
    write_indices_csv(parallel.records, b);
    CHECK(a.str() == b.str());

    write_batch_outputs(serial, dir.file("out.csv"));
    CHECK(read_text(dir.file("out.csv")) == a.str());
    CHECK(read_text(dir.file("out.csv.dropped.csv")).rfind("patient_id,image_id,active_core\n", 0) == 0);
    const auto errors = read_text(dir.file("out.csv.errors.csv"));
    CHECK(errors.find("P9,bad,") != std::string::npos);
    CHECK(errors.find("P9,broken,") != std::string::npos);

    Manifest only_bad;
    only_bad.rows = {m.rows[11]};
    CHECK_THROWS_AS(run_batch(only_bad, cfg), ValidationError);
}

TEST_CASE("indices CSV round trip")
{
    std::vector<IndexRecord> recs{record("P,1", "a\"b", 0.1, 1.0 / 3.0), record("P2", "x", 0.0, 0.25)};
    recs[0].active_core = 12;
    recs[0].integral_core = 0.123456789012345678;
    std::ostringstream out;
    write_indices_csv(recs, out);
    CHECK(out.str().rfind(std::string(kIndicesHeader) + "\n", 0) == 0);
    std::istringstream in(out.str());
    const auto back = read_indices_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0].patient_id == "P,1");
    CHECK(back[0].image_id == "a\"b");
    CHECK(back[0].tau == 1.0 / 3.0);
    CHECK(back[0].integral_core == recs[0].integral_core);
    CHECK(back[0].active_core == 12);

    std::istringstream bad(std::string(kIndicesHeader) + "\nP,i,1,1,0,0.5,zero,0,0,0\n");
    try {
        read_indices_csv(bad, "in.csv");
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("in.csv:2") != std::string::npos);
    }
    std::istringstream header("a,b\n");
    CHECK_THROWS_AS(read_indices_csv(header), ValidationError);
}

TEST_CASE("primary diagram SVG")
{
    const auto empty = primary_diagram_svg({});
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("</svg>") != std::string::npos);
    CHECK(empty.find("<circle") == std::string::npos);

    std::vector<DiagramPoint> corner{{1.0, 0.0, "P", "i"}};
    const auto one = primary_diagram_svg(corner);
    CHECK(one.find("cx=\"70.000\" cy=\"30.000\"") != std::string::npos);

    const auto blobs = gaussian_blobs(2, four_blob_centers(), 5, 0.01);
    const auto svg = primary_diagram_svg(blobs.points, blobs.labels);
    std::set<std::string> fills;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
         pos = svg.find("<circle", pos + 1)) {
        const auto f = svg.find("fill=\"", pos) + 6;
        fills.insert(svg.substr(f, svg.find('"', f) - f));
    }
    CHECK(fills.size() >= 4);
    for (int c = 0; c < 4; ++c)
        CHECK(svg.find("cluster " + std::to_string(c)) != std::string::npos);
}

TEST_CASE("cluster command plumbing")
{
    const auto blobs = gaussian_blobs(8, four_blob_centers(), 25, 0.02);
    std::vector<IndexRecord> recs;
    for (const auto& p : blobs.points)
        recs.push_back(record(p.patient_id, p.image_id, p.eta, p.tau));

    ClusterRequest scan;
    const auto report = run_cluster(recs, scan);
    CHECK(report.chosen_k == 4);
    REQUIRE(report.scan);
    CHECK(report.scan->size() == 4);

    ClusterRequest fixed;
    fixed.k = 2;
    CHECK(run_cluster(recs, fixed).result.centroids.size() == 2);
    CHECK_FALSE(run_cluster(recs, fixed).scan);

    ClusterRequest medians;
    medians.per_patient_median = true;
    medians.k = 2;
    const auto med = run_cluster(recs, medians);
    CHECK(med.points.size() == 4);
    CHECK(med.points[0].image_id == "median");

    std::ostringstream csv;
    write_cluster_csv(report, csv);
    std::istringstream back(csv.str());
    const std::size_t target = report.result.assignments[0];
    const auto chosen = select_cluster(recs, back, target);
    std::size_t expected = 0;
    for (auto a : report.result.assignments)
        expected += a == target;
    CHECK(chosen.size() == expected);
    CHECK(chosen.size() >= 20);

    std::istringstream junk("nope\n");
    CHECK_THROWS_AS(select_cluster(recs, junk, 0), ValidationError);

    std::ostringstream scan_csv;
    write_scan_csv(*report.scan, scan_csv);
    CHECK(scan_csv.str().rfind("k,mean_silhouette\n3,", 0) == 0);
}
