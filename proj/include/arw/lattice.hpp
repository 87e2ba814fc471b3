#ifndef ARW_LATTICE_HPP
#define ARW_LATTICE_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "arw/core.hpp"

namespace arw {

/// An integer frequency vector with squared norm m.
using Frequency = Vec3i;

/// All lattice points of squared norm m, sorted lexicographically.
struct FrequencySet {
    std::int64_t m = 0;
    std::vector<Frequency> points;

    std::int64_t n_points() const { return static_cast<std::int64_t>(points.size()); }
    double sphere_radius() const { return std::sqrt(static_cast<double>(m)); }
};

inline constexpr std::int64_t kDefaultEnumerationCeiling = 1'000'000;

/// True iff m !== 0, 4, 7 (mod 8). For such m the eigenspace dimension
/// N = r_3(m) grows without rescaling degeneracies.
bool is_admissible(std::int64_t m);

/// Enumerates {v in Z^3 : |v|^2 = m}, lexicographically sorted.
/// Exact integer arithmetic throughout; empty result is valid (e.g. m = 7).
/// Throws ResourceError when m exceeds the ceiling.
FrequencySet enumerate_frequencies(std::int64_t m,
                                   std::int64_t ceiling = kDefaultEnumerationCeiling);

/// r_3(m): the number of representations of m as a sum of three squares,
/// computed by a counting loop without materializing the set.
std::int64_t representation_count(std::int64_t m,
                                  std::int64_t ceiling = kDefaultEnumerationCeiling);

/// Partitions the set into N/2 antipodal pairs (rep, -rep) where rep is the
/// lexicographically larger element of each pair; pairs sorted by rep.
std::vector<std::pair<Frequency, Frequency>> antipodal_pairs(const FrequencySet& set);

/// CSV export: header "x,y,z", one integer triple per row, lexicographic order.
void write_frequency_csv(const FrequencySet& set, std::ostream& os);

}  // namespace arw

#endif  // ARW_LATTICE_HPP
