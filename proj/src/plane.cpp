#include "arw/plane.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace arw {

namespace {

constexpr std::int64_t kSurdInputLimit = 1'000'000'000;

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / gcd64(a, b) * b; }

// Returns (squarefree part, extracted square root multiplier) of d >= 1.
std::pair<std::int64_t, std::int64_t> squarefree_split(std::int64_t d) {
    std::int64_t mult = 1;
    for (std::int64_t i = 2; i * i <= d; ++i) {
        while (d % (i * i) == 0) {
            d /= i * i;
            mult *= i;
        }
    }
    return {d, mult};
}

}  // namespace

Surd make_surd(std::int64_t p, std::int64_t q, std::int64_t d) {
    if (q == 0) throw std::invalid_argument("surd: zero denominator");
    if (d < 1) throw std::invalid_argument("surd: radicand must be >= 1");
    if (std::abs(p) > kSurdInputLimit || std::abs(q) > kSurdInputLimit || d > kSurdInputLimit)
        throw std::invalid_argument("surd: component magnitude exceeds input limit");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    if (p == 0) return Surd{0, 1, 1};
    auto [d0, mult] = squarefree_split(d);
    p *= mult;
    const std::int64_t g = gcd64(p, q);
    return Surd{p / g, q / g, d0};
}

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

std::int64_t narrow_i128(__int128 v, const char* what) {
    if (v > kSurdInputLimit || v < -static_cast<__int128>(kSurdInputLimit))
        throw std::invalid_argument(std::string(what) + ": surd component overflow");
    return static_cast<std::int64_t>(v);
}

Surd make_surd_i128(__int128 p, __int128 q, __int128 d, const char* what) {
    const __int128 g = gcd128(p, q);
    if (g > 1) {
        p /= g;
        q /= g;
    }
    return make_surd(narrow_i128(p, what), narrow_i128(q, what), narrow_i128(d, what));
}

}  // namespace

Surd surd_mul(const Surd& a, const Surd& b) {
    if (a.is_zero() || b.is_zero()) return Surd{0, 1, 1};
    const std::int64_t g = gcd64(a.d, b.d);
    return make_surd_i128(static_cast<__int128>(a.p) * b.p * g,
                          static_cast<__int128>(a.q) * b.q,
                          static_cast<__int128>(a.d / g) * (b.d / g), "surd_mul");
}

Surd surd_add(const Surd& a, const Surd& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.d != b.d) throw std::invalid_argument("surd_add: incompatible radicands");
    return make_surd_i128(static_cast<__int128>(a.p) * b.q + static_cast<__int128>(b.p) * a.q,
                          static_cast<__int128>(a.q) * b.q, a.d, "surd_add");
}

bool surd_abs_less(const Surd& a, const Surd& b) {
    using i128 = __int128;
    const i128 lhs = i128(a.p) * a.p * a.d * (i128(b.q) * b.q);
    const i128 rhs = i128(b.p) * b.p * b.d * (i128(a.q) * a.q);
    return lhs < rhs;
}

Surd parse_surd(const std::string& text) {
    const char* s = text.c_str();
    const char* end = s + text.size();

    auto parse_int = [&](const char*& cur) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(cur, end, v);
        if (ec != std::errc{} || ptr == cur)
            throw std::invalid_argument("malformed normal component: '" + text + "'");
        cur = ptr;
        return v;
    };

    const char* cur = s;
    std::int64_t sign = 1;
    if (cur < end && (*cur == '+' || *cur == '-')) {
        if (*cur == '-') sign = -1;
        ++cur;
    }

    std::int64_t p = 1, q = 1, d = 1;
    bool have_p = false;
    if (cur < end && std::isdigit(static_cast<unsigned char>(*cur))) {
        p = parse_int(cur);
        have_p = true;
        if (cur < end && *cur == '/') {
            ++cur;
            q = parse_int(cur);
        }
    }
    if (cur < end && *cur == '*') ++cur;
    if (end - cur >= 5 && std::equal(cur, cur + 5, "sqrt(")) {
        cur += 5;
        d = parse_int(cur);
        if (cur >= end || *cur != ')')
            throw std::invalid_argument("malformed normal component: '" + text + "'");
        ++cur;
    } else if (!have_p) {
        throw std::invalid_argument("malformed normal component: '" + text + "'");
    }
    if (cur != end)
        throw std::invalid_argument("malformed normal component: '" + text + "'");
    return make_surd(sign * p, q, d);
}

std::string to_string(PlaneType t) {
    switch (t) {
        case PlaneType::i: return "i";
        case PlaneType::ii: return "ii";
        case PlaneType::iii: return "iii";
    }
    return "?";
}

PlaneType plane_type_from_string(const std::string& s) {
    if (s == "i") return PlaneType::i;
    if (s == "ii") return PlaneType::ii;
    if (s == "iii") return PlaneType::iii;
    throw std::invalid_argument("unknown plane type: '" + s + "' (expected i, ii, or iii)");
}

PlaneType classify_normal(const std::array<Surd, 3>& normal) {
    int first = -1;
    for (int k = 0; k < 3; ++k)
        if (!normal[k].is_zero()) {
            first = k;
            break;
        }
    if (first < 0) throw std::invalid_argument("classify_normal: all-zero normal");

    // Cyclic relabeling so the first component is nonzero; the ratio
    // num/den of two surds is rational iff num = 0 or the square-free
    // radicands agree.
    const Surd& den = normal[first];
    auto irrational = [&](const Surd& num) { return !num.is_zero() && num.d != den.d; };

    const int irr = irrational(normal[(first + 1) % 3]) + irrational(normal[(first + 2) % 3]);
    if (irr == 0) return PlaneType::i;
    if (irr == 1) return PlaneType::ii;
    return PlaneType::iii;
}

PlaneType plane_type(const PlaneSpec& spec) {
    if (spec.exact_normal) return classify_normal(*spec.exact_normal);
    if (spec.declared_type) return *spec.declared_type;
    throw std::invalid_argument(
        "a floating-point normal cannot be classified exactly; declare its type");
}

namespace {

// Integer vector parallel to a surd triple, available when all nonzero
// components share the same radicand.
std::optional<Vec3i> integer_direction(const std::array<Surd, 3>& v) {
    std::int64_t d = 0;
    for (const auto& c : v)
        if (!c.is_zero()) {
            if (d == 0) d = c.d;
            else if (c.d != d) return std::nullopt;
        }
    if (d == 0) return std::nullopt;  // zero vector
    std::int64_t denom = 1;
    for (const auto& c : v)
        if (!c.is_zero()) denom = lcm64(denom, c.q);
    std::array<std::int64_t, 3> w{};
    for (int i = 0; i < 3; ++i) w[i] = v[i].is_zero() ? 0 : v[i].p * (denom / v[i].q);
    std::int64_t g = gcd64(gcd64(w[0], w[1]), w[2]);
    if (g == 0) return std::nullopt;
    return Vec3i{w[0] / g, w[1] / g, w[2] / g};
}

int largest_component_shift(const PlaneSpec& spec) {
    if (spec.exact_normal) {
        const auto& n = *spec.exact_normal;
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (surd_abs_less(n[best], n[k])) best = k;
        return best;
    }
    const std::array<double, 3> a{std::abs(spec.normal.x), std::abs(spec.normal.y),
                                  std::abs(spec.normal.z)};
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (a[k] > a[best]) best = k;
    return best;
}

}  // namespace

Frame build_frame(const PlaneSpec& spec) {
    const double norm = spec.normal.norm();
    if (!(norm > 0)) throw std::invalid_argument("build_frame: zero normal");
    const std::array<double, 3> n{spec.normal.x / norm, spec.normal.y / norm,
                                  spec.normal.z / norm};

    const int k = largest_component_shift(spec);
    // relabeled coordinates: w[j] = n[(j + k) % 3]
    const double w1 = n[k % 3], w2 = n[(k + 1) % 3], w3 = n[(k + 2) % 3];
    const double s = std::sqrt(w1 * w1 + w2 * w2);

    const std::array<double, 3> xi_rel{w2 / s, -w1 / s, 0.0};
    const std::array<double, 3> eta_rel{w1 * w3 / s, w2 * w3 / s, -(w1 * w1 + w2 * w2) / s};

    auto map_back = [&](const std::array<double, 3>& v) {
        std::array<double, 3> out{};
        for (int j = 0; j < 3; ++j) out[(j + k) % 3] = v[j];
        return Vec3{out[0], out[1], out[2]};
    };

    Frame f;
    f.normal = {n[0], n[1], n[2]};
    f.xi = map_back(xi_rel);
    f.eta = map_back(eta_rel);
    f.relabel_shift = k;

    if (spec.exact_normal) {
        const auto& e = *spec.exact_normal;
        const std::array<Surd, 3> w{e[k % 3], e[(k + 1) % 3], e[(k + 2) % 3]};
        const std::array<Surd, 3> xi_s{w[1], make_surd(-w[0].p, w[0].q, w[0].d), Surd{0, 1, 1}};
        const Surd w11 = surd_mul(w[0], w[0]);
        const Surd w22 = surd_mul(w[1], w[1]);
        const Surd sum_sq = surd_add(w11, w22);  // rational, d = 1
        const std::array<Surd, 3> eta_s{surd_mul(w[0], w[2]), surd_mul(w[1], w[2]),
                                        make_surd(-sum_sq.p, sum_sq.q, sum_sq.d)};
        auto map_back_i = [&](const std::optional<Vec3i>& v) -> std::optional<Vec3i> {
            if (!v) return std::nullopt;
            const std::array<std::int64_t, 3> in{v->x, v->y, v->z};
            std::array<std::int64_t, 3> out{};
            for (int j = 0; j < 3; ++j) out[(j + k) % 3] = in[j];
            return Vec3i{out[0], out[1], out[2]};
        };
        f.xi_int = map_back_i(integer_direction(xi_s));
        f.eta_int = map_back_i(integer_direction(eta_s));
    }
    return f;
}

Frame build_frame_from_unit_normal(const Vec3& n) {
    PlaneSpec spec;
    spec.normal = n;
    return build_frame(spec);
}

Mat3 projection_matrix(const Vec3& n) {
    if (std::abs(n.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("projection_matrix: normal is not unit length");
    const std::array<double, 3> c{n.x, n.y, n.z};
    Mat3 omega;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) omega(i, j) = (i == j ? 1.0 : 0.0) - c[i] * c[j];
    return omega;
}

PlaneSpec parse_normal(const std::string& text) {
    std::array<std::string, 3> parts;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t comma = text.find(',', start);
        if (i < 2) {
            if (comma == std::string::npos)
                throw std::invalid_argument("normal must have three comma-separated components");
            parts[i] = text.substr(start, comma - start);
            start = comma + 1;
        } else {
            if (comma != std::string::npos)
                throw std::invalid_argument("normal must have exactly three components");
            parts[i] = text.substr(start);
        }
    }

    auto looks_float = [](const std::string& s) {
        return s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
               s.find('E') != std::string::npos;
    };

    PlaneSpec spec;
    if (std::none_of(parts.begin(), parts.end(), looks_float)) {
        std::array<Surd, 3> exact{parse_surd(parts[0]), parse_surd(parts[1]),
                                  parse_surd(parts[2])};
        spec.exact_normal = exact;
        spec.normal = {exact[0].value(), exact[1].value(), exact[2].value()};
    } else {
        auto parse_double = [](const std::string& s) {
            char* endp = nullptr;
            const double v = std::strtod(s.c_str(), &endp);
            if (endp != s.c_str() + s.size())
                throw std::invalid_argument("malformed normal component: '" + s + "'");
            return v;
        };
        spec.normal = {parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
    }
    if (!(spec.normal.norm() > 0))
        throw std::invalid_argument("normal must be nonzero");
    return spec;
}

std::pair<double, double> parse_patch(const std::string& text) {
    const std::size_t x = text.find('x');
    if (x == std::string::npos)
        throw std::invalid_argument("patch must be 'AxB', e.g. 1x1");
    char* endp = nullptr;
    const std::string a_str = text.substr(0, x), b_str = text.substr(x + 1);
    const double a = std::strtod(a_str.c_str(), &endp);
    if (endp != a_str.c_str() + a_str.size())
        throw std::invalid_argument("malformed patch dimension: '" + a_str + "'");
    const double b = std::strtod(b_str.c_str(), &endp);
    if (endp != b_str.c_str() + b_str.size())
        throw std::invalid_argument("malformed patch dimension: '" + b_str + "'");
    if (!(a > 0) || !(b > 0))
        throw std::invalid_argument("patch dimensions must be positive");
    return {a, b};
}

}  // namespace arw
