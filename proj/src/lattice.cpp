#include "arw/lattice.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace arw {

namespace {

void check_m(std::int64_t m, std::int64_t ceiling) {
    if (m < 1) throw std::invalid_argument("m must be a positive integer");
    if (m > ceiling)
        throw ResourceError("m = " + std::to_string(m) + " exceeds enumeration ceiling " +
                            std::to_string(ceiling));
}

// Appends every signed permutation of the nonneg triple (a, b, c) to out.
// Duplicates (from zero or repeated entries) are removed by the caller's
// sort+unique pass.
void expand_signed_permutations(std::int64_t a, std::int64_t b, std::int64_t c,
                                std::vector<Vec3i>& out) {
    std::array<std::int64_t, 3> p{a, b, c};
    std::sort(p.begin(), p.end());
    do {
        for (int sx : {-1, 1}) {
            if (p[0] == 0 && sx < 0) continue;
            for (int sy : {-1, 1}) {
                if (p[1] == 0 && sy < 0) continue;
                for (int sz : {-1, 1}) {
                    if (p[2] == 0 && sz < 0) continue;
                    out.push_back({sx * p[0], sy * p[1], sz * p[2]});
                }
            }
        }
    } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace

bool is_admissible(std::int64_t m) {
    if (m < 1) throw std::invalid_argument("m must be a positive integer");
    const std::int64_t r = m % 8;
    return r != 0 && r != 4 && r != 7;
}

FrequencySet enumerate_frequencies(std::int64_t m, std::int64_t ceiling) {
    check_m(m, ceiling);
    FrequencySet set;
    set.m = m;

    const std::int64_t a1_max = isqrt(m);
    for (std::int64_t a1 = 0; a1 <= a1_max; ++a1) {
        const std::int64_t rem1 = m - a1 * a1;
        const std::int64_t a2_max = isqrt(rem1);
        for (std::int64_t a2 = a1; a2 <= a2_max; ++a2) {
            std::int64_t a3 = 0;
            if (is_perfect_square(rem1 - a2 * a2, a3))
                expand_signed_permutations(a1, a2, a3, set.points);
        }
    }

    std::sort(set.points.begin(), set.points.end());
    set.points.erase(std::unique(set.points.begin(), set.points.end()), set.points.end());
    return set;
}

std::int64_t representation_count(std::int64_t m, std::int64_t ceiling) {
    check_m(m, ceiling);
    std::int64_t count = 0;
    const std::int64_t a1_max = isqrt(m);
    // Count ordered signed triples directly: for each unordered nonneg
    // pattern generated once (a1 <= a2, a3 free), tally the number of signed
    // permutations it expands to. Cheaper to count multiplicities than to
    // expand: handled below by counting over a canonical sorted triple.
    for (std::int64_t a1 = 0; a1 <= a1_max; ++a1) {
        const std::int64_t rem1 = m - a1 * a1;
        const std::int64_t a2_max = isqrt(rem1);
        for (std::int64_t a2 = a1; a2 <= a2_max; ++a2) {
            std::int64_t a3 = 0;
            if (!is_perfect_square(rem1 - a2 * a2, a3)) continue;
            if (a3 < a2) continue;  // canonical: a1 <= a2 <= a3, each pattern once
            std::array<std::int64_t, 3> p{a1, a2, a3};
            // distinct coordinate orderings
            std::int64_t perms;
            if (p[0] == p[1] && p[1] == p[2]) perms = 1;
            else if (p[0] == p[1] || p[1] == p[2]) perms = 3;
            else perms = 6;
            // sign choices for nonzero coordinates
            std::int64_t signs = 1;
            for (std::int64_t v : p)
                if (v != 0) signs *= 2;
            count += perms * signs;
        }
    }
    return count;
}

std::vector<std::pair<Frequency, Frequency>> antipodal_pairs(const FrequencySet& set) {
    std::vector<std::pair<Frequency, Frequency>> pairs;
    pairs.reserve(set.points.size() / 2);
    // points are sorted; the representative is the lexicographically larger
    // element, i.e. the one with -rep < rep.
    for (const auto& p : set.points)
        if (-p < p) pairs.emplace_back(p, -p);
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return pairs;
}

void write_frequency_csv(const FrequencySet& set, std::ostream& os) {
    os << "x,y,z\n";
    for (const auto& p : set.points) os << p.x << ',' << p.y << ',' << p.z << '\n';
}

}  // namespace arw
