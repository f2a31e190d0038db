#include "wikicast/errors.hpp"
#include "wikicast/pagecount.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <fstream>
#include <random>

using namespace wikicast;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "wikicast_test_pagecount" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const HourStamp kHour{parse_date("2011-01-02"), 5};

} // namespace

TEST_CASE("parse_line maps the four fields positionally") {
    const auto r = parse_line("en Influenza 4321 99999");
    REQUIRE(r);
    CHECK(*r == RawRecord{"en", "Influenza", 4321, 99999});

    const auto zero = parse_line("pl Grypa 0 0\n");
    REQUIRE(zero);
    CHECK(*zero == RawRecord{"pl", "Grypa", 0, 0});

    // Titles stay encoded.
    const auto encoded = parse_line("pl Choroby_zaka%C5%BAne 7 100");
    REQUIRE(encoded);
    CHECK(encoded->title == "Choroby_zaka%C5%BAne");
}

TEST_CASE("parse_line rejects malformed records") {
    LineError why = LineError::none;
    CHECK_FALSE(parse_line("en Bad Title 3", &why));
    CHECK(why == LineError::bad_number);
    CHECK_FALSE(parse_line("en Bad Title 3 4", &why));
    CHECK(why == LineError::field_count);
    CHECK_FALSE(parse_line("en Influenza 3", &why));
    CHECK(why == LineError::field_count);
    CHECK_FALSE(parse_line("en  3 4", &why));
    CHECK(why == LineError::empty_field);
    CHECK_FALSE(parse_line("en Flu -3 4", &why));
    CHECK(why == LineError::bad_number);
    CHECK_FALSE(parse_line("en Flu 3 4x", &why));
    CHECK(why == LineError::bad_number);
    CHECK_FALSE(parse_line("", &why));
    CHECK_FALSE(parse_line("en Flu 3 4\r", &why));
}

TEST_CASE("valid records re-serialize byte for byte") {
    std::mt19937_64 rng{7};
    const std::string alphabet = "abcXYZ019_%()-.,:";
    std::uniform_int_distribution<std::size_t> pick{0, alphabet.size() - 1};
    std::uniform_int_distribution<int> len{1, 24};
    for (int i = 0; i < 500; ++i) {
        RawRecord rec;
        rec.project = i % 3 == 0 ? "en" : i % 3 == 1 ? "ja" : "en.m";
        for (int k = len(rng); k > 0; --k) rec.title.push_back(alphabet[pick(rng)]);
        rec.requests = rng() % 1000000000;
        rec.bytes = rng();
        const auto line = format_line(rec);
        const auto back = parse_line(line);
        REQUIRE(back);
        CHECK(*back == rec);
        CHECK(format_line(*back) == line);
    }
}

TEST_CASE("encode_title produces log form") {
    CHECK(encode_title("Influenza") == "Influenza");
    CHECK(encode_title("Swine influenza") == "Swine_influenza");
    CHECK(encode_title("Choroby zakaźne") == "Choroby_zaka%C5%BAne");
    CHECK(encode_title("Choroby zakaźne") == oracle::percent_encode(U"Choroby zakaźne"));
    CHECK(encode_title("Świńska grypa") == oracle::percent_encode(U"Świńska grypa"));
    CHECK(encode_title("ไข้หวัดใหญ่") == oracle::percent_encode(U"ไข้หวัดใหญ่"));
    CHECK(encode_title("AC/DC & co?") == "AC/DC_%26_co%3F");
    CHECK(encode_title("100%") == "100%25");
    CHECK_THROWS_AS(encode_title(""), InputError);
}

TEST_CASE("encode_title is idempotent") {
    for (const char* s : {"Influenza", "Choroby zakaźne", "100% pure", "%C5%BA", "%zz", "a%2", "ไข้หวัดใหญ่",
                          "Washington, D.C.", "C++"}) {
        const auto once = encode_title(s);
        CHECK(encode_title(once) == once);
        CHECK(is_encoded_title(once));
    }
    CHECK_FALSE(is_encoded_title("Swine influenza"));
    CHECK_FALSE(is_encoded_title(""));
}

TEST_CASE("project codes") {
    CHECK(is_language_project("en"));
    CHECK(is_language_project("zh-classical"));
    CHECK_FALSE(is_language_project("en.m"));
    CHECK_FALSE(is_language_project("en.b"));
    CHECK_FALSE(is_language_project(""));
}

TEST_CASE("pagecount file names") {
    const HourStamp h{parse_date("2010-03-07"), 4};
    CHECK(pagecount_filename(h) == "pagecounts-20100307-040000.gz");
    CHECK(parse_pagecount_filename("pagecounts-20100307-040000.gz") == h);
    CHECK(parse_pagecount_filename("pagecounts-20100307-040001.gz") == h);
    CHECK_FALSE(parse_pagecount_filename("pagecounts-20100307-250000.gz"));
    CHECK_FALSE(parse_pagecount_filename("projectcounts-20100307-040000"));
    CHECK_FALSE(parse_pagecount_filename("pagecounts-20100307-04xx00.gz"));
}

TEST_CASE("ingest_text sums per language and keeps watched titles") {
    const IngestFilter filter{{"en"}, std::set<ArticleKey>{{"en", "Flu"}, {"en", "Influenza"}}};
    const auto batch = ingest_text("en Flu 10 1\nen Influenza 20 1\nfr Grippe 5 1\n", kHour, filter);
    CHECK(batch.present);
    CHECK(batch.totals == std::map<std::string, std::uint64_t>{{"en", 30}});
    CHECK(batch.counts ==
          std::map<ArticleKey, std::uint64_t>{{ArticleKey{"en", "Flu"}, 10}, {ArticleKey{"en", "Influenza"}, 20}});
    CHECK(batch.rejected == 0);
}

TEST_CASE("totals include unwatched titles; suffixed projects are ignored") {
    const IngestFilter filter{{"en"}, std::set<ArticleKey>{{"en", "Flu"}}};
    const auto batch = ingest_text("en Flu 10 1\nen Main_Page 990 1\nen.m Flu 500 1\n", kHour, filter);
    CHECK(batch.totals.at("en") == 1000);
    CHECK(batch.counts.size() == 1);
    CHECK(batch.counts.at(ArticleKey{"en", "Flu"}) == 10);
}

TEST_CASE("malformed lines are isolated") {
    const IngestFilter filter{{"en"}, std::nullopt};
    const auto batch = ingest_text("en Flu 10 1\nen Bad Title 3\nen Influenza 20 1\n", kHour, filter);
    CHECK(batch.rejected == 1);
    CHECK(batch.accepted == 2);
    CHECK(batch.totals.at("en") == 30);
}

TEST_CASE("language totals match a line-by-line oracle") {
    std::mt19937_64 rng{11};
    const std::vector<std::string> projects = {"en", "pl", "en.m", "th"};
    for (int trial = 0; trial < 50; ++trial) {
        std::string text;
        const int lines = 1 + static_cast<int>(rng() % 200);
        for (int i = 0; i < lines; ++i) {
            const auto& p = projects[rng() % projects.size()];
            const auto kind = rng() % 10;
            if (kind == 0) {
                text += fmt::format("{} Broken {}\n", p, rng() % 100);
            } else if (kind == 1) {
                text += fmt::format("{} T{} x{} 1\n", p, i, rng() % 100);
            } else {
                text += fmt::format("{} T{} {} {}\n", p, rng() % 20, rng() % 100000, rng() % 1000);
            }
        }
        const auto batch = ingest_text(text, kHour, IngestFilter{{"en", "pl", "th"}, std::nullopt});
        for (const std::string lang : {"en", "pl", "th"}) {
            const auto it = batch.totals.find(lang);
            CHECK((it == batch.totals.end() ? 0 : it->second) == oracle::naive_language_total(text, lang));
        }
    }
}

TEST_CASE("ingest_hour reads gzip, treats missing and corrupt files as missing") {
    const auto dir = scratch("files");
    const IngestFilter filter{{"en"}, std::nullopt};

    const auto good = dir / pagecount_filename(kHour);
    write_gzip_lines(good, {"en Flu 10 1", "en Influenza 20 1", "fr Grippe 5 1"});
    const auto batch = ingest_hour(good, kHour, filter);
    CHECK(batch.present);
    CHECK(batch.totals.at("en") == 30);
    CHECK(ingest_hour(good, kHour, filter) == batch);  // deterministic

    const auto missing = ingest_hour(dir / "pagecounts-20110102-060000.gz", kHour, filter);
    CHECK_FALSE(missing.present);
    CHECK(missing.counts.empty());
    CHECK(missing.totals.empty());

    const auto garbage = dir / "pagecounts-20110102-070000.gz";
    std::ofstream{garbage} << "en Flu 10 1\n";
    CHECK_FALSE(ingest_hour(garbage, kHour, filter).present);

    // Truncated gzip stream.
    std::ifstream in{good, std::ios::binary};
    std::string bytes{std::istreambuf_iterator<char>{in}, {}};
    const auto truncated = dir / "pagecounts-20110102-080000.gz";
    std::ofstream{truncated, std::ios::binary} << bytes.substr(0, bytes.size() - 6);
    CHECK_FALSE(ingest_hour(truncated, kHour, filter).present);
}

TEST_CASE("ingest_range fills missing hours and orders by hour") {
    const auto dir = scratch("range");
    const Date day = parse_date("2011-03-01");
    for (int h = 0; h < 24; ++h) {
        if (h == 5) continue;
        write_gzip_lines(dir / pagecount_filename(HourStamp{day, h}), {fmt::format("en Flu {} 1", h + 1)});
    }
    // Off-by-seconds names are found too.
    fs::rename(dir / pagecount_filename(HourStamp{day, 7}), dir / "pagecounts-20110301-070002.gz");

    const IngestFilter filter{{"en"}, std::nullopt};
    for (unsigned threads : {1u, 4u}) {
        const auto batches = ingest_range(dir, DateWindow{day, day}, filter, threads);
        REQUIRE(batches.size() == 24);
        for (int h = 0; h < 24; ++h) {
            CHECK(batches[h].hour == HourStamp{day, h});
            CHECK(batches[h].present == (h != 5));
            if (h != 5) CHECK(batches[h].totals.at("en") == static_cast<std::uint64_t>(h + 1));
        }
    }
    CHECK_THROWS_AS(ingest_range(dir / "nope", DateWindow{day, day}, filter), InputError);
}
