#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rydrelay/io.hpp"

using namespace rydrelay;

TEST_CASE("format_double round-trips doubles exactly") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    for (int k = 0; k < 500; ++k) {
        const double value = std::ldexp(mant(rng), expo(rng));
        const double parsed = std::strtod(format_double(value).c_str(), nullptr);
        CHECK(parsed == value);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("atomic write leaves no temporaries and replaces content") {
    const auto dir = std::filesystem::temp_directory_path() / "rydrelay_io_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "sub" / "data.csv";
    write_text_atomic(path, "a,b\n1,2\n");
    write_text_atomic(path, "a,b\n3,4\n");

    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == "a,b\n3,4\n");

    int entries = 0;
    for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
        (void)entry;
        ++entries;
    }
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv_table layout and validation") {
    const auto csv = csv_table({"x", "y"}, {{1.0, 2.0}, {0.25, -3.5}});
    CHECK(csv == "x,y\n1,0.25\n2,-3.5\n");
    CHECK_THROWS_AS(csv_table({"x"}, {{1.0}, {2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(csv_table({"x", "y"}, {{1.0}, {2.0, 3.0}}), std::invalid_argument);
}
