#include <random>
#include <set>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "setu/error.hpp"
#include "setu/metrics.hpp"
#include "support/oracles.hpp"

using namespace setu;
using Catch::Matchers::WithinAbs;

namespace {

QueryResult ranked(const std::vector<std::string>& ids) {
    QueryResult r;
    r.query_id = "q";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        RankedEntry e;
        e.report_id = ids[i];
        e.rank = i + 1;
        r.entries.push_back(e);
    }
    return r;
}

}  // namespace

TEST_CASE("recall@k", "[metrics]") {
    CHECK(recall_at_k(ranked({"g", "x"}), {"g"}, 1) == 1);
    CHECK(recall_at_k(ranked({"x", "y", "g"}), {"g"}, 2) == 0);
    const auto list = ranked({"x", "g", "y", "g2"});
    CHECK(recall_at_k(list, {"g", "g2"}, 5) == 1);
    CHECK(recall_at_k(list, {"g", "g2"}, 1) == 0);
    CHECK_THROWS_AS(recall_at_k(list, {}, 1), ConfigError);
    CHECK_THROWS_AS(recall_at_k(list, {"g"}, 0), ConfigError);
}

TEST_CASE("average precision", "[metrics]") {
    CHECK(average_precision(ranked({"g", "x"}), {"g"}) == 1.0);
    CHECK_THAT(average_precision(ranked({"g", "x", "h"}), {"g", "h"}), WithinAbs((1.0 + 2.0 / 3.0) / 2.0, 1e-15));
    CHECK_THAT(average_precision(ranked({"x", "a", "b", "c"}), {"a", "b", "c"}),
               WithinAbs((0.5 + 2.0 / 3.0 + 0.75) / 3.0, 1e-15));
    CHECK_THAT(average_precision(ranked({"x", "a", "b", "c"}), {"a", "b", "c"}), WithinAbs(0.6389, 5e-5));
    // a member never retrieved contributes zero
    CHECK(average_precision(ranked({"g"}), {"g", "missing"}) == 0.5);
    CHECK_THROWS_AS(average_precision(ranked({"g"}), {}), ConfigError);
}

TEST_CASE("reciprocal rank", "[metrics]") {
    CHECK(reciprocal_rank(ranked({"a", "b", "c", "g"}), {"g"}) == 0.25);
    CHECK(reciprocal_rank(ranked({"g"}), {"g"}) == 1.0);
    CHECK(reciprocal_rank(ranked({"x", "g", "y"}), {"g"}) == 0.5);
    CHECK(reciprocal_rank(ranked({"x"}), {"g"}) == 0.0);
    CHECK_THROWS_AS(reciprocal_rank(ranked({"x"}), {}), ConfigError);
}

TEST_CASE("improvement", "[metrics]") {
    CHECK_THAT(improvement(0.831, 0.576), WithinAbs(0.4427, 5e-5));
    CHECK_THAT(improvement(0.280, 0.151), WithinAbs(0.854, 5e-4));
    CHECK(improvement(0.3, 0.3) == 0.0);
    CHECK_THROWS_AS(improvement(0.3, 0.0), ConfigError);
    CHECK_THROWS_AS(improvement(0.3, -0.1), ConfigError);
}

TEST_CASE("metrics agree with the reference formulas", "[metrics][property]") {
    std::mt19937 rng(10);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 25;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
        std::shuffle(ids.begin(), ids.end(), rng);
        std::set<std::string> gt;
        for (std::size_t i = 0; i < n; ++i)
            if (rng() % 4 == 0) gt.insert("r" + std::to_string(i));
        if (gt.empty()) gt.insert(ids[rng() % n]);
        const auto list = ranked(ids);
        const int r1 = recall_at_k(list, gt, 1), r5 = recall_at_k(list, gt, 5), r10 = recall_at_k(list, gt, 10);
        CHECK(r1 == oracle::recall_at_k(ids, gt, 1));
        CHECK(r5 == oracle::recall_at_k(ids, gt, 5));
        CHECK(r10 == oracle::recall_at_k(ids, gt, 10));
        CHECK(r1 <= r5);
        CHECK(r5 <= r10);
        const double ap = average_precision(list, gt);
        CHECK_THAT(ap, WithinAbs(oracle::average_precision(ids, gt), 1e-12));
        CHECK_THAT(reciprocal_rank(list, gt), WithinAbs(oracle::reciprocal_rank(ids, gt), 1e-15));
        CHECK(ap >= 0.0);
        CHECK(ap <= 1.0);
        // AP = 1 exactly when the duplicates fill the top |G| ranks
        bool top = true;
        for (std::size_t i = 0; i < gt.size(); ++i) top &= gt.count(ids[i]) == 1;
        CHECK((std::abs(ap - 1.0) < 1e-12) == top);
    }
}

TEST_CASE("improvement sign follows the comparison", "[metrics][property]") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), b = 0.01 + u(rng);
        CHECK((improvement(a, b) > 0.0) == (a > b));
    }
}
