#include <doctest.h>

#include <set>
#include <sstream>

#include "arw/lattice.hpp"
#include "oracles.hpp"

using arw::Vec3i;

TEST_CASE("admissibility is the mod-8 test") {
    CHECK(arw::is_admissible(1));
    CHECK(arw::is_admissible(2));
    CHECK(arw::is_admissible(3));
    CHECK_FALSE(arw::is_admissible(4));
    CHECK(arw::is_admissible(5));
    CHECK(arw::is_admissible(6));
    CHECK_FALSE(arw::is_admissible(7));
    CHECK_FALSE(arw::is_admissible(8));
    CHECK_FALSE(arw::is_admissible(12));
    CHECK(arw::is_admissible(29));
    CHECK_THROWS_AS(arw::is_admissible(0), std::invalid_argument);
}

TEST_CASE("m = 1 gives the six unit vectors") {
    const auto set = arw::enumerate_frequencies(1);
    REQUIRE(set.n_points() == 6);
    const std::set<Vec3i> expect{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                 {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    CHECK(std::set<Vec3i>(set.points.begin(), set.points.end()) == expect);
    CHECK(std::is_sorted(set.points.begin(), set.points.end()));
}

TEST_CASE("counts on small spheres") {
    CHECK(arw::enumerate_frequencies(2).n_points() == 12);
    CHECK(arw::enumerate_frequencies(7).n_points() == 0);  // 7 = 8*0+7
    CHECK(arw::representation_count(3) == 8);
    CHECK(arw::representation_count(5) == 24);
    CHECK(arw::representation_count(28) == 0);  // 4^1 (8*0+7)
}

TEST_CASE("counting loop matches enumeration and brute force") {
    const std::int64_t limit = 3000;
    const auto brute = oracles::brute_r3_table(limit);
    for (std::int64_t m = 1; m <= limit; ++m) {
        REQUIRE(arw::representation_count(m) == brute[static_cast<std::size_t>(m)]);
    }
    // enumeration agrees on a sample
    for (std::int64_t m : {1, 2, 3, 29, 97, 1002, 2999})
        CHECK(arw::enumerate_frequencies(m).n_points() ==
              brute[static_cast<std::size_t>(m)]);
}

TEST_CASE("N is even and positive for admissible m") {
    for (std::int64_t m = 1; m <= 10000; ++m) {
        if (!arw::is_admissible(m)) continue;
        const auto n = arw::representation_count(m);
        CHECK(n >= 1);
        CHECK(n % 2 == 0);
    }
}

TEST_CASE("set is closed under negation and signed permutations") {
    for (std::int64_t m : {2, 29, 45}) {
        const auto set = arw::enumerate_frequencies(m);
        const std::set<Vec3i> original(set.points.begin(), set.points.end());
        for (const auto& p : set.points) CHECK(original.count(-p) == 1);

        // all 48 signed permutations map the set to itself
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                 {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& perm : perms)
            for (int sx : {-1, 1})
                for (int sy : {-1, 1})
                    for (int sz : {-1, 1}) {
                        std::set<Vec3i> image;
                        for (const auto& p : set.points) {
                            const std::int64_t c[3] = {p.x, p.y, p.z};
                            image.insert(Vec3i{sx * c[perm[0]], sy * c[perm[1]],
                                               sz * c[perm[2]]});
                        }
                        CHECK(image == original);
                    }
    }
}

TEST_CASE("antipodal pairs partition the set") {
    const auto set1 = arw::enumerate_frequencies(1);
    const auto pairs1 = arw::antipodal_pairs(set1);
    REQUIRE(pairs1.size() == 3);
    CHECK(pairs1[0].first == Vec3i{0, 0, 1});
    CHECK(pairs1[1].first == Vec3i{0, 1, 0});
    CHECK(pairs1[2].first == Vec3i{1, 0, 0});

    CHECK(arw::antipodal_pairs(arw::enumerate_frequencies(2)).size() == 6);

    for (std::int64_t m : {5, 17, 29}) {
        const auto set = arw::enumerate_frequencies(m);
        const auto pairs = arw::antipodal_pairs(set);
        REQUIRE(static_cast<std::int64_t>(pairs.size()) * 2 == set.n_points());
        std::set<Vec3i> seen;
        for (const auto& [a, b] : pairs) {
            CHECK(b == -a);
            CHECK(a > b);  // representative is the lexicographically larger
            seen.insert(a);
            seen.insert(b);
        }
        CHECK(static_cast<std::int64_t>(seen.size()) == set.n_points());
    }
}

TEST_CASE("csv export shape") {
    std::ostringstream os;
    arw::write_frequency_csv(arw::enumerate_frequencies(1), os);
    CHECK(os.str() == "x,y,z\n-1,0,0\n0,-1,0\n0,0,-1\n0,0,1\n0,1,0\n1,0,0\n");
}

TEST_CASE("enumeration ceiling is enforced") {
    CHECK_THROWS_AS(arw::enumerate_frequencies(1'000'001), arw::ResourceError);
    CHECK_THROWS_AS(arw::representation_count(2'000'000), arw::ResourceError);
    CHECK_NOTHROW(arw::enumerate_frequencies(1'000'001, 2'000'000));
    CHECK_THROWS_AS(arw::enumerate_frequencies(0), std::invalid_argument);
}
