#include <doctest.h>

#include <cmath>
#include <functional>

#include "dbf/data.hpp"
#include "dbf/errors.hpp"
#include "test_util.hpp"

using namespace dbf;

namespace {

GroupConfig tiny_config() {
    return {{"hiv", GroupId::Communicable},
            {"diarrhea", GroupId::Communicable},
            {"cancer", GroupId::Noncommunicable},
            {"cardio", GroupId::Noncommunicable},
            {"transport", GroupId::Injury},
            {"selfharm", GroupId::Injury}};
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a dbf::Error");
    return Errc::IoError;
}

} // namespace

TEST_CASE("load_daly_csv happy path over a 27-row synthetic file") {
    testutil::TempDir tmp("ingest");
    const auto [csv, groups] = testutil::synthetic_csv({});
    testutil::write_text(tmp.path("d.csv"), csv);
    testutil::write_text(tmp.path("g.json"), groups);

    const auto cfg = load_group_config(tmp.path("g.json"));
    const auto table = load_daly_csv(tmp.path("d.csv"), cfg);
    CHECK(table.years.size() == 27);
    CHECK(table.causes.size() == 23);
    CHECK(table.years.front() == 1990);
    CHECK(table.years.back() == 2016);
    for (std::size_t i = 1; i < table.years.size(); ++i)
        CHECK(table.years[i] == table.years[i - 1] + 1);
    CHECK(table.columns_in_group(GroupId::Communicable).size() == 7);
    CHECK(table.columns_in_group(GroupId::Noncommunicable).size() == 10);
    CHECK(table.columns_in_group(GroupId::Injury).size() == 6);
}

TEST_CASE("load_daly_csv rows are sorted by year even when the file is not") {
    testutil::TempDir tmp("sort");
    testutil::write_text(tmp.path("d.csv"),
                         "year,hiv,diarrhea\n1992,3,4\n1990,1,2\n1991,2,3\n");
    const auto table = load_daly_csv(tmp.path("d.csv"), tiny_config());
    CHECK(table.years == std::vector<int>{1990, 1991, 1992});
    CHECK(table.values[0][0] == 1.0);
    CHECK(table.values[2][0] == 3.0);
}

TEST_CASE("load_daly_csv error cases") {
    testutil::TempDir tmp("err");
    const auto cfg = tiny_config();
    auto load = [&](const std::string& body) {
        testutil::write_text(tmp.path("d.csv"), body);
        return [&cfg, path = tmp.path("d.csv")]() { load_daly_csv(path, cfg); };
    };

    CHECK(code_of([&] { load_daly_csv(tmp.path("missing.csv"), cfg); }) == Errc::MissingFile);
    CHECK(code_of(load("year,hiv,diarrhea\n1990,1,2\n1992,2,3\n")) == Errc::GapInYears);
    CHECK(code_of(load("year,hiv,unknowncause\n1990,1,2\n")) == Errc::UnmappedCause);
    CHECK(code_of(load("year,hiv,diarrhea\n1990,1,2\n1991,x,3\n")) == Errc::MalformedRow);
    CHECK(code_of(load("year,hiv,diarrhea\n1990,1,2\n1991,,3\n")) == Errc::MalformedRow);
    CHECK(code_of(load("year,hiv,diarrhea\n1990,1\n")) == Errc::MalformedRow);
    CHECK(code_of(load("year,hiv,diarrhea\n1990,1,2\n1991,-5,3\n")) == Errc::NegativeValue);
    CHECK(code_of(load("year,hiv,diarrhea\n1990,1,2\n1990,2,3\n")) == Errc::MalformedRow);
    CHECK(code_of(load("notyear,hiv,diarrhea\n1990,1,2\n")) == Errc::MalformedRow);
}

TEST_CASE("standardize: column [1,2,3] becomes [-1,0,1]") {
    const auto z = standardize_columns({{1.0}, {2.0}, {3.0}}, {"a"});
    CHECK(z.means[0] == doctest::Approx(2.0));
    CHECK(z.stdDevs[0] == doctest::Approx(1.0));
    CHECK(z.z[0][0] == doctest::Approx(-1.0));
    CHECK(z.z[1][0] == doctest::Approx(0.0));
    CHECK(z.z[2][0] == doctest::Approx(1.0));
}

TEST_CASE("standardize rejects constant columns and short tables") {
    CHECK(code_of([] { standardize_columns({{5.0}, {5.0}, {5.0}}, {"flat"}); }) ==
          Errc::ConstantColumn);
    CHECK(code_of([] { standardize_columns({{1.0}, {2.0}}, {"a"}); }) == Errc::TooFewRows);
}

TEST_CASE("standardize: output columns have mean 0 and sample sd 1") {
    dbf::Rng rng(11);
    std::vector<std::vector<double>> values(27, std::vector<double>(5));
    for (auto& row : values)
        for (auto& v : row) v = rng.uniform(0.0, 1e6);
    const auto z = standardize_columns(values, {"a", "b", "c", "d", "e"});

    for (std::size_t c = 0; c < 5; ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 27; ++i) mean += z.z[i][c];
        mean /= 27.0;
        double ss = 0.0;
        for (std::size_t i = 0; i < 27; ++i) ss += (z.z[i][c] - mean) * (z.z[i][c] - mean);
        const double sd = std::sqrt(ss / 26.0);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(sd - 1.0) < 1e-9);
    }
}

TEST_CASE("standardize is idempotent on the z matrix") {
    dbf::Rng rng(12);
    std::vector<std::vector<double>> values(15, std::vector<double>(4));
    for (auto& row : values)
        for (auto& v : row) v = rng.uniform(-50.0, 50.0);
    const auto once = standardize_columns(values, {"a", "b", "c", "d"});
    const auto twice = standardize_columns(once.z, once.columnNames);
    for (std::size_t i = 0; i < once.z.size(); ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(once.z[i][j] - twice.z[i][j]) < 1e-9);
}

TEST_CASE("group submatrices partition the cause set") {
    testutil::TempDir tmp("part");
    const auto [csv, groups] = testutil::synthetic_csv({});
    testutil::write_text(tmp.path("d.csv"), csv);
    testutil::write_text(tmp.path("g.json"), groups);
    const auto table = load_daly_csv(tmp.path("d.csv"), load_group_config(tmp.path("g.json")));

    std::vector<bool> seen(table.causes.size(), false);
    for (GroupId g : {GroupId::Communicable, GroupId::Noncommunicable, GroupId::Injury}) {
        for (int j : table.columns_in_group(g)) {
            CHECK(!seen[j]);
            seen[j] = true;
        }
    }
    for (bool s : seen) CHECK(s);
}

TEST_CASE("to_time_index maps years against the offset") {
    const TimeIndexMap map{1989};
    CHECK(to_time_index(1990, map) == 1);
    CHECK(to_time_index(2020, map) == 31);
    CHECK(code_of([&] { to_time_index(1989, map); }) == Errc::NonPositiveIndex);

    for (int year = 1990; year < 2020; ++year)
        CHECK(to_time_index(year + 1, map) > to_time_index(year, map));
}

TEST_CASE("load_group_config rejects bad group names and shapes") {
    testutil::TempDir tmp("gc");
    testutil::write_text(tmp.path("bad1.json"), "{\"hiv\": \"viral\"}");
    CHECK(code_of([&] { load_group_config(tmp.path("bad1.json")); }) == Errc::InvalidConfig);
    testutil::write_text(tmp.path("bad2.json"), "[1,2]");
    CHECK(code_of([&] { load_group_config(tmp.path("bad2.json")); }) == Errc::InvalidConfig);
    CHECK(code_of([&] { load_group_config(tmp.path("nosuch.json")); }) == Errc::MissingFile);
}
