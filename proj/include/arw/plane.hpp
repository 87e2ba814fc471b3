#ifndef ARW_PLANE_HPP
#define ARW_PLANE_HPP

#include <array>
#include <optional>
#include <string>

#include "arw/core.hpp"

namespace arw {

// ---------------------------------------------------------------------------
// Exact normal components. A component is p/q * sqrt(d) with integer p,
// q > 0 and square-free d >= 1 (d = 1 gives a rational). Rationality of a
// ratio of two such surds is decidable exactly: it is rational iff the
// square-free parts coincide (or the numerator vanishes). Floats cannot
// certify irrationality, so classification only accepts surds.
// ---------------------------------------------------------------------------

struct Surd {
    std::int64_t p = 0;  // signed numerator
    std::int64_t q = 1;  // positive denominator, gcd(|p|, q) = 1
    std::int64_t d = 1;  // square-free radicand; (0,1,1) is the canonical zero

    bool is_zero() const { return p == 0; }
    double value() const {
        return static_cast<double>(p) / static_cast<double>(q) *
               std::sqrt(static_cast<double>(d));
    }
    friend bool operator==(const Surd&, const Surd&) = default;
};

/// Canonicalizes p/q*sqrt(d): extracts square factors of d, reduces the
/// fraction, normalizes the sign into p. Throws on q == 0, d < 1.
Surd make_surd(std::int64_t p, std::int64_t q = 1, std::int64_t d = 1);

Surd surd_mul(const Surd& a, const Surd& b);
/// Sum of two surds with the same square-free part (throws otherwise).
Surd surd_add(const Surd& a, const Surd& b);
/// Exact comparison of absolute values.
bool surd_abs_less(const Surd& a, const Surd& b);

/// Parses the component grammar: optional sign, "p", "p/q", "p*sqrt(d)",
/// "p/q*sqrt(d)". Whitespace-free.
Surd parse_surd(const std::string& text);

// ---------------------------------------------------------------------------
// Plane type trichotomy. With the coordinates cyclically relabeled so the
// first component is nonzero, the type counts how many of n2/n1, n3/n1 are
// irrational: zero (i, "rational"), one (ii), two (iii).
// ---------------------------------------------------------------------------

enum class PlaneType { i, ii, iii };

std::string to_string(PlaneType t);
PlaneType plane_type_from_string(const std::string& s);

PlaneType classify_normal(const std::array<Surd, 3>& normal);

// ---------------------------------------------------------------------------
// Plane specification and the orthonormal frame {n, xi, eta}.
// ---------------------------------------------------------------------------

struct PlaneSpec {
    std::optional<std::array<Surd, 3>> exact_normal;  // surd form when available
    Vec3 normal{0, 0, 1};                             // unnormalized direction
    std::optional<PlaneType> declared_type;           // mandatory for float normals
    double patch_a = 1.0;
    double patch_b = 1.0;
    Vec3 offset{0, 0, 0};
};

/// Exact classification when surds are present, else the declared type.
/// Throws std::invalid_argument when neither is available.
PlaneType plane_type(const PlaneSpec& spec);

struct Frame {
    Vec3 normal;  // unit
    Vec3 xi;      // unit, orthogonal to normal
    Vec3 eta;     // unit, orthogonal to both
    int relabel_shift = 0;  // cyclic shift applied before the tangent formula

    // Integer vectors parallel to xi/eta when the direction is rational;
    // used for exact zero tests of lattice projections.
    std::optional<Vec3i> xi_int;
    std::optional<Vec3i> eta_int;

    static const char* convention() { return "cyclic-largest-first"; }
};

/// Builds the tangent frame: cyclically relabels coordinates so the
/// largest-magnitude normal component sits in the first slot (ties broken
/// by lowest index), applies
///   xi  = (n2, -n1, 0) / sqrt(n1^2 + n2^2),
///   eta = (n1 n3, n2 n3, -(n1^2 + n2^2)) / sqrt(n1^2 + n2^2),
/// and maps the axes back. Throws on a zero normal.
Frame build_frame(const PlaneSpec& spec);
Frame build_frame_from_unit_normal(const Vec3& n);

/// Orthogonal projection onto the plane with unit normal n:
/// entries 1 - n_i^2 on the diagonal and -n_i n_j off it.
/// Throws std::invalid_argument unless | |n| - 1 | <= 1e-12.
Mat3 projection_matrix(const Vec3& n);

/// Parses "x,y,z" where each component follows the surd grammar; components
/// containing '.', 'e' or 'E' digits are treated as plain floats, which
/// disables exact classification for the whole normal.
PlaneSpec parse_normal(const std::string& text);

/// Parses "AxB" decimal patch dimensions.
std::pair<double, double> parse_patch(const std::string& text);

}  // namespace arw

#endif  // ARW_PLANE_HPP
