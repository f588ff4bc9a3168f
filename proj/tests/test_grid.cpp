#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rag/query_grid.hpp"

using namespace rag;

TEST_CASE("uniform grid hits both endpoints exactly") {
    QueryGrid g = uniform_grid({{0.0, 1.0}}, {31});
    REQUIRE(g.dy() == 31);
    CHECK(g.axes[0].points.front() == 0.0);
    CHECK(g.axes[0].points.back() == 1.0);
    for (std::size_t i = 1; i < 31; ++i)
        CHECK(g.axes[0].points[i] > g.axes[0].points[i - 1]);
}

TEST_CASE("grid size is the product of axis counts") {
    QueryGrid g = uniform_grid({{1.0, 15.0}, {0.0, std::acos(-1.0)}}, {15, 61}, 0);
    CHECK(g.dy() == 915);
    CHECK(g.da() == 2);
    CHECK(g.band_axis.has_value());
}

TEST_CASE("single-point axis holds the lower bound") {
    QueryGrid g = uniform_grid({{0.0, std::acos(-1.0)}}, {1});
    REQUIRE(g.dy() == 1);
    CHECK(g.flat[0][0] == 0.0);
}

TEST_CASE("grid construction rejects bad input") {
    CHECK_THROWS_AS(uniform_grid({{0.0, 1.0}}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid({{1.0, 0.0}}, {5}), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid({{0.0, 1.0}}, {2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(QueryGrid::from_axes({{"a", {1.0, 1.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(QueryGrid::from_axes({{"a", {1.0, 2.0}}}, 1), std::invalid_argument);
}

TEST_CASE("flat enumeration is row-major with the last axis fastest") {
    QueryGrid g = uniform_grid({{0.0, 2.0}, {0.0, 3.0}, {0.0, 1.0}}, {3, 4, 2});
    REQUIRE(g.dy() == 24);
    // independent nested-loop enumeration
    std::size_t q = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < 2; ++k, ++q) {
                CHECK(g.flat[q][0] == g.axes[0].points[i]);
                CHECK(g.flat[q][1] == g.axes[1].points[j]);
                CHECK(g.flat[q][2] == g.axes[2].points[k]);
                CHECK(g.flat_index({i, j, k}) == q);
                auto multi = g.multi_index(q);
                CHECK(multi[0] == i);
                CHECK(multi[1] == j);
                CHECK(multi[2] == k);
            }
}

TEST_CASE("flat index equals the stride expansion") {
    QueryGrid g = uniform_grid({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}, {5, 3, 7});
    CHECK(g.stride(2) == 1);
    CHECK(g.stride(1) == 7);
    CHECK(g.stride(0) == 21);
    for (std::size_t q = 0; q < g.dy(); ++q) {
        auto multi = g.multi_index(q);
        std::size_t sum = 0;
        for (std::size_t j = 0; j < 3; ++j) sum += multi[j] * g.stride(j);
        CHECK(sum == q);
    }
}

TEST_CASE("axis lookup by name") {
    QueryGrid g = uniform_grid({{1.0, 2.0}, {0.0, 1.0}}, {2, 5}, 0, {"band", "k"});
    CHECK(g.axis_index("band") == 0);
    CHECK(g.axis_index("k") == 1);
    CHECK(!g.axis_index("nope").has_value());
}
