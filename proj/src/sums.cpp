#include "arw/sums.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace arw {

namespace {

// Plane projections of a lattice vector. Exact integer projections scaled
// by the direction norms are used when the frame carries rational tangent
// directions, so vanishing projections are detected exactly.
struct FrameProjector {
    const Frame* frame;
    bool exact_u, exact_v;
    double inv_norm_u = 1, inv_norm_v = 1;

    explicit FrameProjector(const Frame& f)
        : frame(&f), exact_u(f.xi_int.has_value()), exact_v(f.eta_int.has_value()) {
        if (exact_u) inv_norm_u = 1.0 / std::sqrt(static_cast<double>(f.xi_int->norm2()));
        if (exact_v) inv_norm_v = 1.0 / std::sqrt(static_cast<double>(f.eta_int->norm2()));
    }
    double u(const Vec3i& p) const {
        if (exact_u) {
            const std::int64_t d = p.dot(*frame->xi_int);
            return d == 0 ? 0.0 : static_cast<double>(d) * inv_norm_u;
        }
        return dot(to_vec3(p), frame->xi);
    }
    double v(const Vec3i& p) const {
        if (exact_v) {
            const std::int64_t d = p.dot(*frame->eta_int);
            return d == 0 ? 0.0 : static_cast<double>(d) * inv_norm_v;
        }
        return dot(to_vec3(p), frame->eta);
    }
};

}  // namespace

CovarianceJet covariance_jet(const FrequencySet& set, const Frame& frame,
                             const Displacement& d) {
    if (set.n_points() == 0) throw std::invalid_argument("covariance: empty frequency set");
    const double n = static_cast<double>(set.n_points());
    CovarianceJet jet;
    jet.r = 0;
    double dx = 0, dy = 0, dz = 0;
    Mat3 h{};
    const Vec3 delta = frame.xi * d.du + frame.eta * d.dv;
    for (const auto& p : set.points) {
        const Vec3 lp = to_vec3(p);
        const double phase = kTwoPi * dot(lp, delta);
        const double c = std::cos(phase), s = std::sin(phase);
        jet.r += c;
        dx += s * lp.x;
        dy += s * lp.y;
        dz += s * lp.z;
        h(0, 0) += c * lp.x * lp.x;
        h(0, 1) += c * lp.x * lp.y;
        h(0, 2) += c * lp.x * lp.z;
        h(1, 1) += c * lp.y * lp.y;
        h(1, 2) += c * lp.y * lp.z;
        h(2, 2) += c * lp.z * lp.z;
    }
    jet.r /= n;
    const double gscale = -kTwoPi / n;
    jet.grad = {gscale * dx, gscale * dy, gscale * dz};
    const double hscale = -4.0 * kPi * kPi / n;
    h(1, 0) = h(0, 1);
    h(2, 0) = h(0, 2);
    h(2, 1) = h(1, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) jet.hess(i, j) = hscale * h(i, j);
    return jet;
}

double covariance_value(const FrequencySet& set, const Frame& frame, const Displacement& d) {
    if (set.n_points() == 0) throw std::invalid_argument("covariance: empty frequency set");
    const Vec3 delta = frame.xi * d.du + frame.eta * d.dv;
    double acc = 0;
    for (const auto& p : set.points) acc += std::cos(kTwoPi * dot(to_vec3(p), delta));
    return acc / static_cast<double>(set.n_points());
}

double rect_factor_sq(double x, double length) {
    if (!(length > 0)) throw std::invalid_argument("rect factor: length must be positive");
    if (x == 0.0) return length * length;
    const double t = kPi * length * x;
    if (std::abs(x) < 1e-8 / length) {
        // sinc^2 series: avoids the 0/0 cancellation near x = 0
        const double t2 = t * t;
        return length * length * (1.0 - t2 / 3.0 + 2.0 * t2 * t2 / 45.0);
    }
    const double s = std::sin(t) / (kPi * x);
    return s * s;
}

// ---------------------------------------------------------------------------
// g sum
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kFoldThreshold = 96;

GSumResult g_sum_plain(const FrequencySet& set, const FrameProjector& pr, double a, double b) {
    GSumResult out;
    const std::size_t n = set.points.size();
    std::vector<double> partial;
    partial.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Vec3i diff = set.points[i] - set.points[j];
            const double x = pr.u(diff);
            const double y = pr.v(diff);
            if (x == 0.0 && y == 0.0) ++out.n_zero_pairs;
            acc += rect_factor_sq(x, a) * rect_factor_sq(y, b);
        }
        partial.push_back(acc);
    }
    out.g_value = pairwise_sum(partial);
    return out;
}

GSumResult g_sum_folded(const FrequencySet& set, const FrameProjector& pr, double a, double b) {
    // Group ordered pairs by their difference vector; the map is iterated in
    // lexicographic key order, fixing the reduction independent of anything
    // but the input set.
    std::map<Vec3i, std::int64_t> diffs;
    const std::size_t n = set.points.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) ++diffs[set.points[i] - set.points[j]];

    GSumResult out;
    std::vector<double> terms;
    terms.reserve(diffs.size());
    for (const auto& [diff, mult] : diffs) {
        const double x = pr.u(diff);
        const double y = pr.v(diff);
        if (x == 0.0 && y == 0.0) out.n_zero_pairs += mult;
        terms.push_back(static_cast<double>(mult) * rect_factor_sq(x, a) *
                        rect_factor_sq(y, b));
    }
    out.g_value = pairwise_sum(terms);
    return out;
}

}  // namespace

GSumResult g_sum(const FrequencySet& set, const Frame& frame, double patch_a, double patch_b) {
    if (!(patch_a > 0) || !(patch_b > 0))
        throw std::invalid_argument("g_sum: patch dimensions must be positive");
    const FrameProjector pr(frame);
    GSumResult out = set.points.size() < kFoldThreshold
                         ? g_sum_plain(set, pr, patch_a, patch_b)
                         : g_sum_folded(set, pr, patch_a, patch_b);
    out.frame_convention = Frame::convention();
    return out;
}

TrineqBound trineq_bound(double x, double y, double patch_a, double patch_b) {
    if (!(patch_a > 0) || !(patch_b > 0))
        throw std::invalid_argument("trineq bound: patch dimensions must be positive");
    const double first = patch_a * patch_a * patch_b * patch_b;
    if (x * y == 0.0) return TrineqBound{first, true};
    const double pi2 = kPi * kPi;
    const double second = 1.0 / (pi2 * pi2 * x * x * y * y);
    return TrineqBound{std::min(first, second), false};
}

double kr_integrand(const CovarianceJet& jet, const Mat3& omega, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("kr integrand: m must be positive");
    const double md = static_cast<double>(m);
    const Vec3 od = omega * jet.grad;
    const double grad_term = dot(jet.grad, od) / md;
    const Mat3 ho = jet.hess * omega;
    double tr = 0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) tr += ho(i, k) * ho(k, i);
    return jet.r * jet.r + grad_term + tr / (md * md);
}

// ---------------------------------------------------------------------------
// Weighted displacement quadrature.
//
// By stationarity the patch-squared integral of a function of (p' - p)
// reduces to a 2-d integral over displacements with the triangular weight
// (A - |du|)(B - |dv|). Composite 8-point Gauss-Legendre panels, doubled
// until two consecutive levels agree; an even panel count keeps the weight
// kink at zero on a panel boundary.
// ---------------------------------------------------------------------------

namespace {

constexpr double kGlNode[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                               0.9602898564975363};
constexpr double kGlWeight[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};

struct Axis {
    std::vector<double> nodes;
    std::vector<double> weights;  // GL weight x jacobian x triangular factor
};

Axis build_axis(double half_len, int panels) {
    Axis ax;
    const double h = 2.0 * half_len / panels;
    ax.nodes.reserve(panels * 8);
    ax.weights.reserve(panels * 8);
    for (int p = 0; p < panels; ++p) {
        const double mid = -half_len + (p + 0.5) * h;
        for (int q = 0; q < 8; ++q) {
            const int idx = q / 2;
            const double sign = (q % 2 == 0) ? -1.0 : 1.0;
            const double t = mid + sign * kGlNode[idx] * 0.5 * h;
            ax.nodes.push_back(t);
            ax.weights.push_back(kGlWeight[idx] * 0.5 * h * (half_len - std::abs(t)));
        }
    }
    return ax;
}

struct JetTables {
    // one row of tables per antipodal representative
    std::vector<Vec3> lambda;
    std::vector<std::array<double, 6>> lsq;  // xx, xy, xz, yy, yz, zz
    std::vector<double> pu, pv;              // projections <l, xi>, <l, eta>
};

JetTables build_jet_tables(const FrequencySet& set, const Frame& frame) {
    JetTables t;
    const auto pairs = antipodal_pairs(set);
    t.lambda.reserve(pairs.size());
    t.lsq.reserve(pairs.size());
    t.pu.reserve(pairs.size());
    t.pv.reserve(pairs.size());
    for (const auto& [rep, _] : pairs) {
        const Vec3 l = to_vec3(rep);
        t.lambda.push_back(l);
        t.lsq.push_back({l.x * l.x, l.x * l.y, l.x * l.z, l.y * l.y, l.y * l.z, l.z * l.z});
        t.pu.push_back(dot(l, frame.xi));
        t.pv.push_back(dot(l, frame.eta));
    }
    return t;
}

// One quadrature level: sum of w_u w_v f(u, v) over the node grid, where f
// is the selected combination of Kac-Rice terms. Trig factors are separable
// per axis, so tables are built once per level.
double eval_level(const JetTables& t, const Mat3& omega, std::int64_t m, double n_points,
                  unsigned terms, const Axis& au, const Axis& av) {
    const std::size_t reps = t.lambda.size();
    const std::size_t nu = au.nodes.size(), nv = av.nodes.size();

    std::vector<double> cu(reps * nu), su(reps * nu), cv(reps * nv), sv(reps * nv);
    for (std::size_t k = 0; k < reps; ++k) {
        for (std::size_t i = 0; i < nu; ++i) {
            const double ph = kTwoPi * t.pu[k] * au.nodes[i];
            cu[k * nu + i] = std::cos(ph);
            su[k * nu + i] = std::sin(ph);
        }
        for (std::size_t j = 0; j < nv; ++j) {
            const double ph = kTwoPi * t.pv[k] * av.nodes[j];
            cv[k * nv + j] = std::cos(ph);
            sv[k * nv + j] = std::sin(ph);
        }
    }

    const double md = static_cast<double>(m);
    const bool want_r2 = terms & kTermR2;
    const bool want_grad = terms & kTermGrad;
    const bool want_hess = terms & kTermHess;
    const double r_scale = 2.0 / n_points;
    const double g_scale = -2.0 * kTwoPi / n_points;
    const double h_scale = -8.0 * kPi * kPi / n_points;

    std::vector<double> row_sums;
    row_sums.reserve(nu);
    for (std::size_t i = 0; i < nu; ++i) {
        double row = 0;
        for (std::size_t j = 0; j < nv; ++j) {
            double r_acc = 0;
            double gx = 0, gy = 0, gz = 0;
            double hxx = 0, hxy = 0, hxz = 0, hyy = 0, hyz = 0, hzz = 0;
            for (std::size_t k = 0; k < reps; ++k) {
                const double a_c = cu[k * nu + i], a_s = su[k * nu + i];
                const double b_c = cv[k * nv + j], b_s = sv[k * nv + j];
                const double c = a_c * b_c - a_s * b_s;
                r_acc += c;
                if (want_grad) {
                    const double s = a_s * b_c + a_c * b_s;
                    gx += s * t.lambda[k].x;
                    gy += s * t.lambda[k].y;
                    gz += s * t.lambda[k].z;
                }
                if (want_hess) {
                    const auto& q = t.lsq[k];
                    hxx += c * q[0];
                    hxy += c * q[1];
                    hxz += c * q[2];
                    hyy += c * q[3];
                    hyz += c * q[4];
                    hzz += c * q[5];
                }
            }
            double f = 0;
            if (want_r2) {
                const double r = r_scale * r_acc;
                f += r * r;
            }
            if (want_grad) {
                const Vec3 grad{g_scale * gx, g_scale * gy, g_scale * gz};
                f += dot(grad, omega * grad) / md;
            }
            if (want_hess) {
                Mat3 hess;
                hess(0, 0) = h_scale * hxx;
                hess(0, 1) = hess(1, 0) = h_scale * hxy;
                hess(0, 2) = hess(2, 0) = h_scale * hxz;
                hess(1, 1) = h_scale * hyy;
                hess(1, 2) = hess(2, 1) = h_scale * hyz;
                hess(2, 2) = h_scale * hzz;
                const Mat3 ho = hess * omega;
                double tr = 0;
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q) tr += ho(p, q) * ho(q, p);
                f += tr / (md * md);
            }
            row += av.weights[j] * f;
        }
        row_sums.push_back(au.weights[i] * row);
    }
    return pairwise_sum(row_sums);
}

QuadratureResult displacement_quadrature(const FrequencySet& set, const Frame& frame,
                                         const Mat3& omega, double a, double b,
                                         unsigned terms, double rel_tol) {
    const JetTables tables = build_jet_tables(set, frame);
    const double n_points = static_cast<double>(set.n_points());
    const double scale = std::sqrt(static_cast<double>(set.m)) * std::max(a, b);

    int panels = std::max(4, 2 * static_cast<int>(std::ceil(2.0 * scale)));
    constexpr int kMaxPanels = 2048;

    QuadratureResult out;
    double prev = eval_level(tables, omega, set.m, n_points, terms, build_axis(a, panels),
                             build_axis(b, panels));
    while (true) {
        panels *= 2;
        const double cur = eval_level(tables, omega, set.m, n_points, terms,
                                      build_axis(a, panels), build_axis(b, panels));
        out.value = cur;
        out.error_estimate = std::abs(cur - prev);
        out.panels_per_axis = panels;
        if (out.error_estimate <= std::max(rel_tol * std::abs(cur), 1e-14)) {
            out.converged = true;
            break;
        }
        if (panels >= kMaxPanels) break;
        prev = cur;
    }
    return out;
}

}  // namespace

SecondMomentR2 second_moment_r2(const FrequencySet& set, const Frame& frame, double patch_a,
                                double patch_b, double rel_tol) {
    if (!(patch_a > 0) || !(patch_b > 0))
        throw std::invalid_argument("second moment: patch dimensions must be positive");
    SecondMomentR2 out;
    const double n = static_cast<double>(set.n_points());
    const double ab = patch_a * patch_b;
    const GSumResult g = g_sum(set, frame, patch_a, patch_b);
    out.closed_form = ab * ab / n + g.g_value / (n * n);
    out.quadrature = displacement_quadrature(set, frame, Mat3::identity(), patch_a, patch_b,
                                             kTermR2, rel_tol);
    return out;
}

SecondMomentFull second_moment_full(const FrequencySet& set, const Frame& frame,
                                    const Mat3& omega, double patch_a, double patch_b,
                                    unsigned terms, double rel_tol) {
    if (!(patch_a > 0) || !(patch_b > 0))
        throw std::invalid_argument("second moment: patch dimensions must be positive");
    SecondMomentFull out;
    out.quadrature =
        displacement_quadrature(set, frame, omega, patch_a, patch_b, terms, rel_tol);
    if (!out.quadrature.converged)
        throw NumericalError("displacement quadrature did not converge at " +
                             std::to_string(out.quadrature.panels_per_axis) +
                             " panels per axis (error estimate " +
                             std::to_string(out.quadrature.error_estimate) + ")");
    const double n = static_cast<double>(set.n_points());
    const GSumResult g = g_sum(set, frame, patch_a, patch_b);
    out.comparator = 1.0 / n + g.g_value / (n * n);
    out.ratio = out.quadrature.value / out.comparator;
    return out;
}

double variance_bound(std::int64_t m, std::int64_t n_points, std::int64_t kappa,
                      PlaneType type, bool conditional) {
    if (m < 1 || n_points < 1) throw std::invalid_argument("variance bound: bad inputs");
    const double base = static_cast<double>(m) / static_cast<double>(n_points);
    const double n = static_cast<double>(n_points);
    if (conditional) return base * std::sqrt(n);
    switch (type) {
        case PlaneType::i: return base * static_cast<double>(kappa);
        case PlaneType::ii: return base * std::pow(n, 3.0 / 7.0);
        case PlaneType::iii: return base * std::pow(n, 0.75);
    }
    throw std::invalid_argument("variance bound: unknown plane type");
}

}  // namespace arw
