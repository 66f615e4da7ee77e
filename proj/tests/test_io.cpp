#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dfbm/errors.hpp"
#include "dfbm/io.hpp"
#include "dfbm/process.hpp"

using namespace dfbm;

namespace {

TimeSeries read_text(const std::string& text) {
    std::istringstream in(text);
    return read_series_csv(in);
}

std::size_t parse_error_line(const std::string& text) {
    try {
        read_text(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    ADD_FAILURE() << "no ParseError for:\n" << text;
    return 0;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(200.0), "200");
    EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
    EXPECT_EQ(format_double(NAN), "nan");
    EXPECT_EQ(format_double(INFINITY), "inf");
    EXPECT_EQ(format_double(-INFINITY), "-inf");
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        std::uint64_t bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v)) {
            continue;
        }
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    }
}

TEST(SeriesCsv, RoundTripIsBitwise) {
    const auto grid = TimeGrid::equispaced(200, 0.001, 0.001);
    const auto s = sample_path(grid, {0.65, 30.0, 1.3, -0.2}, Model::delampertized, 77);
    std::ostringstream out;
    write_series_csv(out, s);
    const auto back = read_text(out.str());
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(std::memcmp(&back.values[i], &s.values[i], sizeof(double)), 0);
        EXPECT_EQ(back.grid[i], s.grid[i]);
    }
    std::ostringstream again;
    write_series_csv(again, back);
    EXPECT_EQ(again.str(), out.str());
    EXPECT_EQ(out.str().substr(0, 11), "time,value\n");
}

TEST(SeriesCsv, ToleratesCrlfAndBlankTrailingLines) {
    const auto s = read_text("time,value\r\n0.5,1\r\n1,2\r\n\n");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s.values[1], 2.0);
}

TEST(SeriesCsv, ParseErrorsNameTheLine) {
    EXPECT_EQ(parse_error_line("t,v\n1,2\n"), 1u);
    EXPECT_EQ(parse_error_line(""), 1u);
    EXPECT_EQ(parse_error_line("time,value\n"), 2u);
    EXPECT_EQ(parse_error_line("time,value\n1,2\n2,abc\n"), 3u);
    EXPECT_EQ(parse_error_line("time,value\n1,2\n2,3,4\n"), 3u);
    EXPECT_EQ(parse_error_line("time,value\n1,2\n2\n"), 3u);
    EXPECT_EQ(parse_error_line("time,value\n1,nan\n"), 2u);
    EXPECT_EQ(parse_error_line("time,value\n1,2\n3,1\n2,5\n"), 4u);
    EXPECT_EQ(parse_error_line("time,value\n1,2\n1,5\n"), 3u);
    try {
        read_text("time,value\n1,2\n2,abc\n");
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Table, RejectsRaggedRows) {
    Table t{{"a", "b"}, {}};
    EXPECT_THROW(t.add_row({1.0}), Error);
    t.add_row({1.0, std::string("x")});
    EXPECT_EQ(t.rows.size(), 1u);
}

TEST(Table, JsonLinesMirrorsCsv) {
    Table t{{"name", "x", "n", "flag", "missing"}, {}};
    t.add_row({std::string("ml"), 0.125, std::int64_t{-3}, true, std::monostate{}});
    t.add_row({std::string("aam"), NAN, std::uint64_t{7}, false, 2.0});
    std::ostringstream csv;
    std::ostringstream js;
    write_table(csv, t, OutputFormat::csv);
    write_table(js, t, OutputFormat::json);
    EXPECT_EQ(csv.str(), "name,x,n,flag,missing\nml,0.125,-3,true,\naam,nan,7,false,2\n");
    std::istringstream lines(js.str());
    std::string line;
    std::vector<nlohmann::json> objs;
    const std::string first = js.str().substr(0, js.str().find('\n'));
    while (std::getline(lines, line)) {
        objs.push_back(nlohmann::json::parse(line));
    }
    ASSERT_EQ(objs.size(), 2u);
    EXPECT_EQ(objs[0]["name"], "ml");
    EXPECT_EQ(objs[0]["x"], 0.125);
    EXPECT_EQ(objs[0]["n"], -3);
    EXPECT_EQ(objs[0]["flag"], true);
    EXPECT_TRUE(objs[0]["missing"].is_null());
    EXPECT_EQ(objs[1]["x"], "nan");
    EXPECT_EQ(objs[1]["n"], 7);
    // key order follows the header
    EXPECT_EQ(first.substr(0, 8), "{\"name\":");
}

TEST(Table, LogLogHeader) {
    LogLogPlot p;
    p.ln_tau = {0.0, 1.0};
    p.ln_moment = {2.0, 3.0};
    p.total_weight = {4.0, 5.0};
    std::ostringstream out;
    write_csv(out, loglog_table(p));
    EXPECT_EQ(out.str(), "ln_tau,ln_moment,total_weight\n0,2,4\n1,3,5\n");
}

TEST(Fnv1a, KnownValues) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_NE(fnv1a_hex("time,value\n1,2\n"), fnv1a_hex("time,value\n1,3\n"));
}
