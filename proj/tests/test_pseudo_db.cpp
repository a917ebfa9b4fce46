#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fixture_corpus.hpp"
#include "pseudo/error.hpp"
#include "pseudo/gazetteer.hpp"

using namespace pseudo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
    fs::path dir = fs::temp_directory_path() / "pseudo_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Critical value of chi-square with 1 df at alpha = 0.01.
constexpr double kChi2Crit1Df = 6.634896601021213;

}  // namespace

TEST_CASE("parse_list: entries, attrs, header, and comments") {
    auto entries = PseudoDatabase::parse_list(
        "surface\tweight\n"
        "# comment\n"
        "Mary\t51475\tgender=F\n"
        "\n"
        "James\t86224\tgender=M\tyear=1960\n",
        "x.tsv");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].surface == "Mary");
    CHECK(entries[0].weight == 51475.0);
    CHECK(entries[0].attrs.at("gender") == "F");
    CHECK(entries[1].attrs.at("year") == "1960");
}

TEST_CASE("parse_list: malformed rows name file and line") {
    CHECK_THROWS_WITH_AS(
        PseudoDatabase::parse_list("Smith\t0\n", "x.tsv"),
        "x.tsv:1: weight must be > 0, got '0'", Error);
    CHECK_THROWS_AS(PseudoDatabase::parse_list("Smith\t-1\n", "x.tsv"),
                    Error);
    CHECK_THROWS_AS(PseudoDatabase::parse_list("Smith\tnan\n", "x.tsv"),
                    Error);
    CHECK_THROWS_AS(PseudoDatabase::parse_list("OnlyOneField\n", "x.tsv"),
                    Error);
    CHECK_THROWS_AS(
        PseudoDatabase::parse_list("Smith\t3\tbadattr\n", "x.tsv"), Error);
}

TEST_CASE("serialize_list round trip preserves everything") {
    auto entries = PseudoDatabase::parse_list(
        "Mary\t51475.5\tgender=F\tstate=MA\nJames\t86224\n", "x.tsv");
    std::string text = PseudoDatabase::serialize_list(entries);
    auto reloaded = PseudoDatabase::parse_list(text, "y.tsv");
    REQUIRE(reloaded.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(reloaded[i].surface == entries[i].surface);
        CHECK(reloaded[i].weight == entries[i].weight);
        CHECK(reloaded[i].attrs == entries[i].attrs);
    }
    CHECK(PseudoDatabase::serialize_list(reloaded) == text);
}

TEST_CASE("load_dir: fixture lists load with their line counts") {
    fs::path dir = temp_dir("db_fixture");
    pseudo::testsupport::write_db_fixture(dir);
    PseudoDatabase db = PseudoDatabase::load_dir(dir);
    auto counts = db.counts();
    CHECK(counts.at("first_names") == 8);
    CHECK(counts.at("last_names") == 6);
    CHECK(counts.at("hospitals") == 5);
    CHECK(counts.at("companies") == 3);
    CHECK(counts.at("universities") == 3);
    CHECK(counts.at("states") == 5);
}

TEST_CASE("load_dir: empty directory and unknown list are errors") {
    fs::path dir = temp_dir("db_empty");
    CHECK_THROWS_AS(PseudoDatabase::load_dir(dir), Error);
    CHECK_THROWS_AS(PseudoDatabase::load_dir(dir / "nope"), Error);

    pseudo::testsupport::write_db_fixture(dir);
    PseudoDatabase db = PseudoDatabase::load_dir(dir);
    RandomStream rng(1, 0);
    CHECK_THROWS_WITH_AS(db.sample("nope", rng), "unknown list 'nope'",
                         Error);
}

TEST_CASE("sample: single entry is degenerate") {
    PseudoDatabase db;
    db.add_list("only", {{"Smith", 1.0, {}}});
    RandomStream rng(7, 3);
    for (int i = 0; i < 50; ++i)
        CHECK(db.sample("only", rng).surface == "Smith");
}

TEST_CASE("sample: weighted draws pass chi-square at alpha 0.01") {
    PseudoDatabase db;
    db.add_list("ab", {{"A", 3.0, {}}, {"B", 1.0, {}}});
    RandomStream rng(42, 9);
    const int n = 100000;
    int a_count = 0;
    for (int i = 0; i < n; ++i)
        a_count += db.sample("ab", rng).surface == "A" ? 1 : 0;
    double pa = static_cast<double>(a_count) / n;
    CHECK(pa > 0.745);
    CHECK(pa < 0.755);
    double ea = n * 0.75;
    double eb = n * 0.25;
    double chi2 = (a_count - ea) * (a_count - ea) / ea +
                  (n - a_count - eb) * (n - a_count - eb) / eb;
    CHECK(chi2 < kChi2Crit1Df);
}

TEST_CASE("sample: filtered draws only return matching entries") {
    fs::path dir = temp_dir("db_filter");
    pseudo::testsupport::write_db_fixture(dir);
    PseudoDatabase db = PseudoDatabase::load_dir(dir);
    AttrFilter filter = AttrFilter::parse("gender=F");
    RandomStream rng(5, 0);
    for (int i = 0; i < 10000; ++i) {
        const GazetteerEntry& e = db.sample("first_names", filter, rng);
        CHECK(e.attrs.at("gender") == "F");
    }
}

TEST_CASE("sample: impossible filter is an error") {
    PseudoDatabase db;
    db.add_list("l", {{"X", 1.0, {{"gender", "F"}}}});
    RandomStream rng(1, 1);
    AttrFilter filter = AttrFilter::parse("gender=Q");
    CHECK_THROWS_AS(db.sample("l", filter, rng), Error);
}

TEST_CASE("sample: deterministic across identical streams") {
    fs::path dir = temp_dir("db_det");
    pseudo::testsupport::write_db_fixture(dir);
    PseudoDatabase db = PseudoDatabase::load_dir(dir);
    RandomStream r1(99, 4);
    RandomStream r2(99, 4);
    for (int i = 0; i < 200; ++i)
        CHECK(db.sample("last_names", r1).surface ==
              db.sample("last_names", r2).surface);
}

TEST_CASE("ingest_census_names: year range, summing, and format") {
    fs::path raw = temp_dir("names_raw");
    fs::path out = temp_dir("names_out");
    auto write = [&](const char* name, const char* body) {
        std::ofstream f(raw / name, std::ios::binary);
        f << body;
    };
    write("yob1959.txt", "Gertrude,F,1000\n");
    write("yob1990.txt", "Mary,F,10\nJames,M,7\n");
    write("yob2000.txt", "Mary,F,5\nMary,M,2\n");

    IngestStats stats = ingest_census_names(raw, out);  // default years
    CHECK(stats.year_lo == 1960);
    CHECK(stats.year_hi == 2020);
    CHECK(stats.files_read == 3);
    CHECK(stats.rows_read == 4);  // 1959 file skipped entirely
    CHECK(stats.names_out == 3);

    PseudoDatabase db = PseudoDatabase::load_dir(out);
    const auto& names = db.list("first_names");
    REQUIRE(names.size() == 3);
    // Sorted by (surface, gender): James/M, Mary/F, Mary/M.
    CHECK(names[0].surface == "James");
    CHECK(names[0].weight == 7.0);
    CHECK(names[1].surface == "Mary");
    CHECK(names[1].attrs.at("gender") == "F");
    CHECK(names[1].weight == 15.0);  // 10 + 5 across years
    CHECK(names[2].attrs.at("gender") == "M");
    CHECK(names[2].weight == 2.0);

    // A name present only outside the range never appears.
    for (const auto& e : names)
        CHECK(e.surface != "Gertrude");
}

TEST_CASE("ingest_census_names: bad rows name file and line") {
    fs::path raw = temp_dir("names_bad");
    fs::path out = temp_dir("names_bad_out");
    {
        std::ofstream f(raw / "yob1990.txt", std::ios::binary);
        f << "Mary,F\n";
    }
    CHECK_THROWS_AS(ingest_census_names(raw, out, 1960, 2020), Error);
    CHECK_THROWS_AS(ingest_census_names(raw, out, 2020, 1960), Error);
}
