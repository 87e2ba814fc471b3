#include "arw/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "arw/parallel.hpp"

namespace arw {

namespace {

void check_sphere(const FrequencySet& set, double sphere_radius) {
    const double r2 = sphere_radius * sphere_radius;
    if (std::abs(r2 - static_cast<double>(set.m)) > 1e-9 * std::max<double>(1.0, set.m))
        throw std::invalid_argument("region sphere radius does not match the set's m");
}

Vec3 normalized_or_throw(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 0)) throw std::invalid_argument("direction must be nonzero");
    return v * (1.0 / n);
}

double clamp_cos(double c) { return std::min(1.0, std::max(-1.0, c)); }

}  // namespace

Cap make_cap(const Vec3& direction, double s, double sphere_radius) {
    if (!(sphere_radius > 0)) throw std::invalid_argument("cap: sphere radius must be positive");
    if (s < 0 || s > 2.0 * sphere_radius)
        throw std::invalid_argument("cap: radius must satisfy 0 <= s <= 2R");
    return Cap{normalized_or_throw(direction), s, sphere_radius, std::nullopt};
}

Cap cap_at_lattice_point(const FrequencySet& set, const Vec3i& center, double s) {
    if (center.norm2() != set.m)
        throw std::invalid_argument("cap center is not a lattice point of the set");
    Cap cap = make_cap(to_vec3(center), s, set.sphere_radius());
    cap.lattice_center = center;
    return cap;
}

double Segment::larger_base_radius() const {
    const double r = sphere_radius;
    auto base = [&](double c) {
        const double inside = r * r - c * c;
        return inside > 0 ? std::sqrt(inside) : 0.0;
    };
    if (offset_lo <= 0 && 0 <= offset_hi) return r;  // straddles the equator
    return std::max(base(offset_lo), base(offset_hi));
}

double Segment::opening_angle() const {
    const double r = sphere_radius;
    const double phi_lo = std::acos(clamp_cos(offset_lo / r));  // larger polar angle
    const double phi_hi = std::acos(clamp_cos(offset_hi / r));
    return 2.0 * (phi_lo - phi_hi);
}

Segment make_segment(const Vec3& direction, double c1, double c2, double sphere_radius) {
    if (c1 > c2) throw std::invalid_argument("segment: offsets must satisfy c1 <= c2");
    if (!(sphere_radius > 0))
        throw std::invalid_argument("segment: sphere radius must be positive");
    return Segment{normalized_or_throw(direction), c1, c2, sphere_radius, std::nullopt,
                   std::nullopt};
}

Segment make_segment(const Vec3i& direction, double c1, double c2, double sphere_radius) {
    Segment seg = make_segment(to_vec3(direction), c1, c2, sphere_radius);
    std::int64_t g = gcd64(gcd64(direction.x, direction.y), direction.z);
    seg.int_direction = Vec3i{direction.x / g, direction.y / g, direction.z / g};
    return seg;
}

Segment make_segment_raw(const Vec3i& direction, double raw_lo, double raw_hi,
                         double sphere_radius) {
    if (direction.norm2() == 0) throw std::invalid_argument("direction must be nonzero");
    const double norm = std::sqrt(static_cast<double>(direction.norm2()));
    Segment seg = make_segment(direction, raw_lo / norm, raw_hi / norm, sphere_radius);
    // int_direction is reduced to primitive form; rescale the raw bounds
    const double g = norm / std::sqrt(static_cast<double>(seg.int_direction->norm2()));
    seg.raw_offsets = {raw_lo / std::round(g), raw_hi / std::round(g)};
    return seg;
}

Segment segment_from_halfwidth(const Vec3i& p, const Vec3& alpha, double c,
                               double sphere_radius) {
    if (!(c > 0)) throw std::invalid_argument("segment halfwidth must be positive");
    const Vec3 a = normalized_or_throw(alpha);
    const double center = dot(to_vec3(p), a);
    return make_segment(a, center - c, center + c, sphere_radius);
}

Segment segment_from_halfwidth(const Vec3i& p, const Vec3i& alpha_int, double c,
                               double sphere_radius) {
    if (!(c > 0)) throw std::invalid_argument("segment halfwidth must be positive");
    const double norm = std::sqrt(static_cast<double>(alpha_int.norm2()));
    const double center = static_cast<double>(p.dot(alpha_int)) / norm;
    return make_segment(alpha_int, center - c, center + c, sphere_radius);
}

std::int64_t count_in_cap(const FrequencySet& set, const Cap& cap) {
    check_sphere(set, cap.sphere_radius);
    const double s2 = cap.radius_s * cap.radius_s;
    std::int64_t count = 0;
    if (cap.lattice_center) {
        // ||l - l0||^2 is an exact integer; only the rhs is floating.
        const Vec3i c = *cap.lattice_center;
        for (const auto& p : set.points)
            if (static_cast<long double>((p - c).norm2()) <= static_cast<long double>(s2))
                ++count;
        return count;
    }
    // ||l - R a||^2 = 2m - 2R <l, a> for unit a and points on the sphere.
    const double two_m = 2.0 * static_cast<double>(set.m);
    const double r = cap.sphere_radius;
    for (const auto& p : set.points) {
        const double dist2 = two_m - 2.0 * r * dot(to_vec3(p), cap.direction);
        if (dist2 <= s2) ++count;
    }
    return count;
}

std::int64_t count_in_segment(const FrequencySet& set, const Segment& seg) {
    check_sphere(set, seg.sphere_radius);
    std::int64_t count = 0;
    if (seg.int_direction) {
        const Vec3i w = *seg.int_direction;
        long double lo, hi;
        if (seg.raw_offsets) {
            lo = static_cast<long double>(seg.raw_offsets->first);
            hi = static_cast<long double>(seg.raw_offsets->second);
        } else {
            const long double norm = std::sqrt(static_cast<long double>(w.norm2()));
            lo = static_cast<long double>(seg.offset_lo) * norm;
            hi = static_cast<long double>(seg.offset_hi) * norm;
        }
        for (const auto& p : set.points) {
            const long double proj = static_cast<long double>(p.dot(w));
            if (lo <= proj && proj <= hi) ++count;
        }
        return count;
    }
    for (const auto& p : set.points) {
        const double proj = dot(to_vec3(p), seg.direction);
        if (seg.offset_lo <= proj && proj <= seg.offset_hi) ++count;
    }
    return count;
}

std::vector<std::pair<std::size_t, std::size_t>> cone_pair_filter(const FrequencySet& set,
                                                                  const Vec3& alpha,
                                                                  double rho) {
    if (!(rho > 0)) throw std::invalid_argument("cone filter: rho must be positive");
    const Vec3 a = normalized_or_throw(alpha);
    const std::size_t n = set.points.size();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    // rho >= 1 makes the condition vacuous (Cauchy-Schwarz).
    const bool all = rho >= 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (all) {
                out.emplace_back(i, j);
                continue;
            }
            const Vec3i diff = set.points[i] - set.points[j];
            const double proj = dot(to_vec3(diff), a);
            if (proj * proj <= rho * rho * static_cast<double>(diff.norm2()))
                out.emplace_back(i, j);
        }
    return out;
}

std::int64_t max_cap_count(const FrequencySet& set, double s) {
    if (s < 0 || s > 2.0 * set.sphere_radius() + 1e-12)
        throw std::invalid_argument("cap radius must satisfy 0 <= s <= 2R");
    const long double s2 = static_cast<long double>(s) * static_cast<long double>(s);
    std::int64_t best = 0;
    for (const auto& c : set.points) {
        std::int64_t count = 0;
        for (const auto& p : set.points)
            if (static_cast<long double>((p - c).norm2()) <= s2) ++count;
        best = std::max(best, count);
    }
    return best;
}

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

namespace {

struct PlaneKey {
    std::int64_t nx, ny, nz, off;
    bool operator==(const PlaneKey&) const = default;
};

struct PlaneKeyHash {
    std::size_t operator()(const PlaneKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (std::uint64_t v : {static_cast<std::uint64_t>(k.nx), static_cast<std::uint64_t>(k.ny),
                                static_cast<std::uint64_t>(k.nz),
                                static_cast<std::uint64_t>(k.off)}) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

PlaneKey plane_through(const Vec3i& a, const Vec3i& b, const Vec3i& c) {
    Vec3i n = (b - a).cross(c - a);
    std::int64_t g = gcd64(gcd64(n.x, n.y), n.z);
    // three distinct points on a sphere are never collinear
    n = {n.x / g, n.y / g, n.z / g};
    if (n.x < 0 || (n.x == 0 && (n.y < 0 || (n.y == 0 && n.z < 0)))) n = -n;
    return PlaneKey{n.x, n.y, n.z, n.dot(a)};
}

std::int64_t invert_triple_count(std::uint64_t tally) {
    // solve t (t-1) (t-2) / 6 == tally
    const double approx = std::cbrt(6.0 * static_cast<double>(tally));
    for (std::int64_t t = std::max<std::int64_t>(3, static_cast<std::int64_t>(approx) - 2);
         t <= static_cast<std::int64_t>(approx) + 3; ++t) {
        const std::uint64_t c3 =
            static_cast<std::uint64_t>(t) * (t - 1) * (t - 2) / 6;
        if (c3 == tally) return t;
    }
    throw NumericalError("plane tally " + std::to_string(tally) +
                         " is not a binomial coefficient C(t,3)");
}

}  // namespace

std::int64_t kappa_exact(const FrequencySet& set, std::int64_t ceiling, unsigned n_threads) {
    const std::int64_t n = set.n_points();
    if (n < 1) throw std::invalid_argument("kappa: empty frequency set");
    if (n > ceiling)
        throw ResourceError("kappa: N = " + std::to_string(n) +
                            " exceeds the triple-enumeration ceiling " + std::to_string(ceiling));
    if (n < 3) return std::min<std::int64_t>(n, 2);

    using Tally = std::unordered_map<PlaneKey, std::uint64_t, PlaneKeyHash>;
    const std::size_t n_chunks = std::min<std::size_t>(64, static_cast<std::size_t>(n));
    std::vector<Tally> partial(n_chunks);
    parallel_chunks(static_cast<std::size_t>(n), n_chunks, n_threads,
                    [&](std::size_t chunk, std::size_t lo, std::size_t hi) {
                        Tally& t = partial[chunk];
                        for (std::size_t i = lo; i < hi; ++i)
                            for (std::size_t j = i + 1; j < set.points.size(); ++j)
                                for (std::size_t k = j + 1; k < set.points.size(); ++k)
                                    ++t[plane_through(set.points[i], set.points[j],
                                                      set.points[k])];
                    });

    Tally tally = std::move(partial[0]);
    for (std::size_t c = 1; c < n_chunks; ++c)
        for (const auto& [key, cnt] : partial[c]) tally[key] += cnt;

    std::int64_t best = 0;
    for (const auto& [key, cnt] : tally) best = std::max(best, invert_triple_count(cnt));
    return best;
}

// ---------------------------------------------------------------------------
// Riesz energy
// ---------------------------------------------------------------------------

RieszEnergy riesz_energy(const FrequencySet& set, double s) {
    if (!(s > 0.0 && s < 2.0)) throw std::invalid_argument("riesz: s must lie in (0, 2)");
    if (set.n_points() < 2)
        throw std::invalid_argument("riesz: energy undefined for fewer than two points");

    // Squared pair distances are integers <= 4m; histogram then sum in
    // ascending-distance order for a deterministic reduction.
    std::vector<std::int64_t> hist(static_cast<std::size_t>(4 * set.m + 1), 0);
    const std::size_t n = set.points.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            hist[static_cast<std::size_t>((set.points[i] - set.points[j]).norm2())] += 2;

    std::vector<double> terms;
    terms.reserve(hist.size());
    const double m = static_cast<double>(set.m);
    for (std::size_t d2 = 1; d2 < hist.size(); ++d2)
        if (hist[d2] > 0)
            terms.push_back(static_cast<double>(hist[d2]) *
                            std::pow(m / static_cast<double>(d2), 0.5 * s));

    RieszEnergy out;
    out.energy = pairwise_sum(terms);
    const double nn = static_cast<double>(set.n_points());
    out.ratio = out.energy / (nn * nn);
    out.limit_constant = riesz_limit_constant(s);
    return out;
}

// ---------------------------------------------------------------------------
// Regimes
// ---------------------------------------------------------------------------

RegimeParams default_regime_params(PlaneType type, bool conditional, std::int64_t n_points) {
    const double n = static_cast<double>(n_points);
    if (conditional || type == PlaneType::i) {
        const double c = std::pow(n, 0.2);
        return RegimeParams{c, c, RegimeMode::offset};
    }
    if (type == PlaneType::ii)
        return RegimeParams{std::pow(n, 3.0 / 7.0), std::pow(n, -8.0 / 7.0),
                            RegimeMode::angular};
    return RegimeParams{std::pow(n, 1.0 / 14.0), std::pow(n, -6.0 / 7.0), RegimeMode::angular};
}

RegimeCounts regime_counts(const FrequencySet& set, const Frame& frame,
                           const RegimeParams& params) {
    if (!(params.c > 0) || !(params.second > 0))
        throw std::invalid_argument("regime parameters must be positive");

    RegimeCounts out;
    out.params = params;
    const std::size_t n = set.points.size();
    std::vector<double> partial;  // per-i partial third sums, fixed order
    partial.reserve(n);
    const bool angular = params.mode == RegimeMode::angular;
    const bool second_all = angular && params.second >= 1.0;

    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Vec3i diff = set.points[i] - set.points[j];
            const Vec3 d = to_vec3(diff);
            const double x = dot(d, frame.xi);
            const double y = dot(d, frame.eta);
            const bool first = std::abs(x) <= params.c;
            bool second;
            if (angular)
                second = second_all ||
                         y * y <= params.second * params.second *
                                      static_cast<double>(diff.norm2());
            else
                second = std::abs(y) <= params.second;
            if (first) ++out.n_first;
            if (second) ++out.n_second;
            if (!first && !second) acc += 1.0 / (x * x * y * y);
        }
        partial.push_back(acc);
    }
    out.third_sum = pairwise_sum(partial);
    return out;
}

// ---------------------------------------------------------------------------
// psi bound report
// ---------------------------------------------------------------------------

std::vector<PsiBoundRow> psi_bound_report(const FrequencySet& set, PlaneType direction_type,
                                          const std::vector<Segment>& segments,
                                          std::int64_t kappa) {
    const double r = set.sphere_radius();
    const double kap = static_cast<double>(kappa);
    std::vector<PsiBoundRow> rows;
    rows.reserve(segments.size());
    for (const auto& seg : segments) {
        PsiBoundRow row;
        row.h = seg.height();
        row.k = seg.larger_base_radius();
        row.theta = seg.opening_angle();
        row.in_hemisphere = seg.in_hemisphere();
        row.count = count_in_segment(set, seg);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.bound_type_i = direction_type == PlaneType::i ? 1.0 + row.h : nan;
        row.bound_halfpow = direction_type != PlaneType::i
                                ? std::sqrt(r) * (std::pow(r, 0.25) + row.h)
                                : nan;
        if (direction_type == PlaneType::ii)
            row.bound_angle = kap * (1.0 + r * std::sqrt(row.theta));
        else if (direction_type == PlaneType::iii)
            row.bound_angle = kap * (1.0 + r * std::cbrt(row.theta));
        else
            row.bound_angle = nan;
        row.bound_conditional = std::sqrt(r) + row.h;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace arw
