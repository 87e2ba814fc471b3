#ifndef ARW_REGIONS_HPP
#define ARW_REGIONS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "arw/lattice.hpp"
#include "arw/plane.hpp"

namespace arw {

// ---------------------------------------------------------------------------
// Spherical caps and segments on the sphere of radius R = sqrt(m).
// Boundaries are inclusive everywhere, so counts are monotone in the
// region parameters.
// ---------------------------------------------------------------------------

struct Cap {
    Vec3 direction{0, 0, 1};  // unit vector toward the cap center
    double radius_s = 0;      // chord radius, 0 <= s <= 2R
    double sphere_radius = 1;
    std::optional<Vec3i> lattice_center;  // exact center when on the lattice

    double height() const { return radius_s * radius_s / (2.0 * sphere_radius); }
};

Cap make_cap(const Vec3& direction, double s, double sphere_radius);
/// Cap centered at a lattice point of the set (enables exact counting).
Cap cap_at_lattice_point(const FrequencySet& set, const Vec3i& center, double s);

struct Segment {
    Vec3 direction{0, 0, 1};
    double offset_lo = 0;  // c1 <= <lambda, direction> <= c2
    double offset_hi = 0;
    double sphere_radius = 1;
    std::optional<Vec3i> int_direction;  // exact direction when rational
    // Bounds on the raw integer projection <lambda, int_direction>; set by
    // the raw factory so degenerate slices through lattice points count
    // exactly.
    std::optional<std::pair<double, double>> raw_offsets;

    double height() const { return offset_hi - offset_lo; }
    /// Radius of the larger base circle.
    double larger_base_radius() const;
    /// Opening angle per the two-cap difference construction.
    double opening_angle() const;
    /// False when the segment straddles the equator plane and therefore is
    /// not contained in any hemisphere (flagged, not forbidden).
    bool in_hemisphere() const { return offset_lo >= 0 || offset_hi <= 0; }
};

Segment make_segment(const Vec3& direction, double c1, double c2, double sphere_radius);
Segment make_segment(const Vec3i& direction, double c1, double c2, double sphere_radius);

/// Segment with bounds on the raw projection <lambda, direction> of the
/// integer direction vector (not the unit one): integer bounds are compared
/// exactly against the integer projections.
Segment make_segment_raw(const Vec3i& direction, double raw_lo, double raw_hi,
                         double sphere_radius);

/// The segment {lambda : |<P - lambda, alpha>| <= c} of height exactly 2c.
Segment segment_from_halfwidth(const Vec3i& p, const Vec3& alpha, double c,
                               double sphere_radius);
Segment segment_from_halfwidth(const Vec3i& p, const Vec3i& alpha_int, double c,
                               double sphere_radius);

std::int64_t count_in_cap(const FrequencySet& set, const Cap& cap);
std::int64_t count_in_segment(const FrequencySet& set, const Segment& seg);

/// Ordered pairs (i, j), i != j, with |<p_i - p_j, alpha>| <= rho |p_i - p_j|.
std::vector<std::pair<std::size_t, std::size_t>> cone_pair_filter(const FrequencySet& set,
                                                                  const Vec3& alpha,
                                                                  double rho);

/// Largest count over caps centered at the lattice points themselves: a
/// certified lower bound for the cap-count maximum over all caps.
std::int64_t max_cap_count(const FrequencySet& set, double s);

inline constexpr std::int64_t kDefaultKappaCeiling = 2000;

/// Exact maximum number of set points on a single plane. Every plane
/// through >= 3 points is keyed by its primitive integer normal and offset;
/// triple tallies per key are inverted through C(t,3) = tally. O(N^3).
std::int64_t kappa_exact(const FrequencySet& set,
                         std::int64_t ceiling = kDefaultKappaCeiling,
                         unsigned n_threads = 0);

// ---------------------------------------------------------------------------
// Riesz energy of the projected points.
// ---------------------------------------------------------------------------

struct RieszEnergy {
    double energy = 0;          // sum over ordered pairs of m^{s/2} / |l - l'|^s
    double ratio = 0;           // energy / N^2
    double limit_constant = 0;  // 2^{1-s} / (2-s)
};

RieszEnergy riesz_energy(const FrequencySet& set, double s);

inline double riesz_limit_constant(double s) { return std::exp2(1.0 - s) / (2.0 - s); }

// ---------------------------------------------------------------------------
// Pair-regime decompositions for the off-diagonal sum.
// ---------------------------------------------------------------------------

enum class RegimeMode { angular, offset };

struct RegimeParams {
    double c = 1;       // first-regime threshold on |<diff, xi>|
    double second = 1;  // rho (angular) or c' (offset)
    RegimeMode mode = RegimeMode::angular;
};

/// The parameter choices used for each plane type: (N^{3/7}, N^{-8/7}) for
/// type ii, (N^{1/14}, N^{-6/7}) for type iii, c = c' = N^{1/5} in the
/// conditional mode (also the fallback for type i, which has no tuned pair).
RegimeParams default_regime_params(PlaneType type, bool conditional, std::int64_t n_points);

struct RegimeCounts {
    std::int64_t n_first = 0;
    std::int64_t n_second = 0;
    double third_sum = 0;  // sum of 1/(x^2 y^2) over the complementary pairs
    RegimeParams params;
};

RegimeCounts regime_counts(const FrequencySet& set, const Frame& frame,
                           const RegimeParams& params);

// ---------------------------------------------------------------------------
// Segment-count bound report. Counts are exact; bound columns carry the
// non-epsilon part of each bound (implied constants unknown), so ratios are
// reported, never asserted.
// ---------------------------------------------------------------------------

struct PsiBoundRow {
    double h = 0, k = 0, theta = 0;
    bool in_hemisphere = true;
    std::int64_t count = 0;
    double bound_type_i = 0;      // 1 + h
    double bound_halfpow = 0;     // R^{1/2} (R^{1/4} + h), types ii/iii
    double bound_angle = 0;       // kappa (1 + R theta^{1/2}) or theta^{1/3}
    double bound_conditional = 0; // R^{1/2} + h
};

std::vector<PsiBoundRow> psi_bound_report(const FrequencySet& set, PlaneType direction_type,
                                          const std::vector<Segment>& segments,
                                          std::int64_t kappa);

}  // namespace arw

#endif  // ARW_REGIONS_HPP
