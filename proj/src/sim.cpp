#include "arw/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arw/parallel.hpp"
#include "arw/rng.hpp"
#include "arw/sums.hpp"

namespace arw {

WaveSample sample_wave(const FrequencySet& set, std::uint64_t seed) {
    if (set.n_points() < 2)
        throw std::invalid_argument("sample_wave: need at least one antipodal pair");
    WaveSample sample;
    sample.m = set.m;
    sample.seed = seed;
    const auto pairs = antipodal_pairs(set);
    sample.representatives.reserve(pairs.size());
    sample.coefficients.reserve(pairs.size());
    Xoshiro256pp rng(seed);
    const double scale = 1.0 / std::sqrt(2.0);  // Re/Im variance 1/2 each
    for (const auto& [rep, _] : pairs) {
        sample.representatives.push_back(rep);
        const GaussPair g = gaussian_pair(rng);
        sample.coefficients.emplace_back(scale * g.z0, scale * g.z1);
    }
    return sample;
}

double wave_value(const WaveSample& sample, const Frame& frame, const Vec3& offset, double u,
                  double v) {
    const Vec3 x = offset + frame.xi * u + frame.eta * v;
    const double scale = 2.0 / std::sqrt(2.0 * static_cast<double>(sample.representatives.size()));
    double acc = 0;
    for (std::size_t k = 0; k < sample.representatives.size(); ++k) {
        const double phase = kTwoPi * dot(to_vec3(sample.representatives[k]), x);
        acc += sample.coefficients[k].real() * std::cos(phase) -
               sample.coefficients[k].imag() * std::sin(phase);
    }
    return scale * acc;
}

GridField evaluate_restricted(const WaveSample& sample, const Frame& frame, const Vec3& offset,
                              int nu, int nv, double patch_a, double patch_b) {
    if (nu < 2 || nv < 2)
        throw std::invalid_argument("evaluate_restricted: grid must be at least 2x2");
    if (!(patch_a > 0) || !(patch_b > 0))
        throw std::invalid_argument("evaluate_restricted: patch dimensions must be positive");

    GridField field;
    field.nu = nu;
    field.nv = nv;
    field.patch_a = patch_a;
    field.patch_b = patch_b;
    field.hu = patch_a / (nu - 1);
    field.hv = patch_b / (nv - 1);
    field.values.assign(static_cast<std::size_t>(nu) * nv, 0.0);

    // Angle-addition split: the phase at (u_i, v_j) is (phi_k + i du_k) +
    // (j dv_k), so the field is an outer product of per-axis trig tables.
    // Each factor comes from one direct sin/cos call, so there is no
    // recurrence drift.
    const std::size_t reps = sample.representatives.size();
    const double scale = 2.0 / std::sqrt(2.0 * static_cast<double>(reps));
    std::vector<double> pc(reps * nu), qc(reps * nu), cb(reps * nv), sb(reps * nv);
    for (std::size_t k = 0; k < reps; ++k) {
        const Vec3 l = to_vec3(sample.representatives[k]);
        const double phi0 = dot(l, offset);
        const double du = dot(l, frame.xi) * field.hu;
        const double dv = dot(l, frame.eta) * field.hv;
        const double re = scale * sample.coefficients[k].real();
        const double im = scale * sample.coefficients[k].imag();
        for (int i = 0; i < nu; ++i) {
            const double a = kTwoPi * (phi0 + i * du);
            const double ca = std::cos(a), sa = std::sin(a);
            // f = sum_k [re cos(a+b) - im sin(a+b)]
            //   = sum_k (re ca - im sa) cos b - (re sa + im ca) sin b
            pc[k * nu + i] = re * ca - im * sa;
            qc[k * nu + i] = re * sa + im * ca;
        }
        for (int j = 0; j < nv; ++j) {
            const double b = kTwoPi * (j * dv);
            cb[k * nv + j] = std::cos(b);
            sb[k * nv + j] = std::sin(b);
        }
    }
    for (int i = 0; i < nu; ++i) {
        double* row = field.values.data() + static_cast<std::size_t>(i) * nv;
        for (std::size_t k = 0; k < reps; ++k) {
            const double p = pc[k * nu + i];
            const double q = qc[k * nu + i];
            const double* cbk = cb.data() + k * nv;
            const double* sbk = sb.data() + k * nv;
            for (int j = 0; j < nv; ++j) row[j] += p * cbk[j] - q * sbk[j];
        }
    }
    for (double v : field.values)
        if (v == 0.0) {
            field.exact_zero_at_node = true;
            break;
        }
    return field;
}

GridField grid_from_function(const std::function<double(double, double)>& f, int nu, int nv,
                             double patch_a, double patch_b) {
    if (nu < 2 || nv < 2) throw std::invalid_argument("grid must be at least 2x2");
    GridField field;
    field.nu = nu;
    field.nv = nv;
    field.patch_a = patch_a;
    field.patch_b = patch_b;
    field.hu = patch_a / (nu - 1);
    field.hv = patch_b / (nv - 1);
    field.values.resize(static_cast<std::size_t>(nu) * nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            field.values[static_cast<std::size_t>(i) * nv + j] = f(i * field.hu, j * field.hv);
    for (double v : field.values)
        if (v == 0.0) {
            field.exact_zero_at_node = true;
            break;
        }
    return field;
}

namespace {

// Edge ids of a cell: 0 bottom, 1 right, 2 top, 3 left.
struct CellGeometry {
    double x[4], y[4];  // crossing position on each edge, cell units
};

double interp(double f0, double f1) { return f0 / (f0 - f1); }

}  // namespace

NodalLengthResult nodal_length(const GridField& field,
                               const std::function<double(double, double)>& field_at) {
    NodalLengthResult out;
    out.exact_zero_at_node = field.exact_zero_at_node;
    const int nu = field.nu, nv = field.nv;
    const double hu = field.hu, hv = field.hv;

    double total = 0;
    for (int i = 0; i + 1 < nu; ++i) {
        for (int j = 0; j + 1 < nv; ++j) {
            const double fa = field.at(i, j);        // bottom-left
            const double fb = field.at(i + 1, j);    // bottom-right
            const double fc = field.at(i + 1, j + 1);  // top-right
            const double fd = field.at(i, j + 1);    // top-left
            // exact zeros count as +0
            const int config = (fa >= 0 ? 1 : 0) | (fb >= 0 ? 2 : 0) | (fc >= 0 ? 4 : 0) |
                               (fd >= 0 ? 8 : 0);
            if (config == 0 || config == 15) continue;

            CellGeometry g{};
            g.x[0] = interp(fa, fb);  // bottom, from a to b
            g.y[0] = 0;
            g.x[1] = 1;
            g.y[1] = interp(fb, fc);  // right, from b to c
            g.x[2] = interp(fd, fc);  // top, from d to c
            g.y[2] = 1;
            g.x[3] = 0;
            g.y[3] = interp(fa, fd);  // left, from a to d

            auto add = [&](int e0, int e1) {
                const double dx = (g.x[e1] - g.x[e0]) * hu;
                const double dy = (g.y[e1] - g.y[e0]) * hv;
                total += std::hypot(dx, dy);
            };

            switch (config) {
                case 1: case 14: add(3, 0); break;   // a isolated
                case 2: case 13: add(0, 1); break;   // b isolated
                case 4: case 11: add(1, 2); break;   // c isolated
                case 8: case 7: add(2, 3); break;    // d isolated
                case 3: case 12: add(3, 1); break;   // horizontal split
                case 6: case 9: add(0, 2); break;    // vertical split
                case 5: case 10: {
                    // saddle: decide by the field sign at the cell center
                    double center;
                    if (field_at)
                        center = field_at((i + 0.5) * hu, (j + 0.5) * hv);
                    else
                        center = 0.25 * (fa + fb + fc + fd);
                    const bool center_pos = center >= 0;
                    const bool diag_a_pos = config == 5;  // a, c positive
                    if (center_pos == diag_a_pos) {
                        // the a-c diagonal is connected: segments isolate b and d
                        add(0, 1);
                        add(2, 3);
                    } else {
                        add(3, 0);
                        add(1, 2);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    out.length = total;
    return out;
}

MomentEstimate estimate_moments(const FrequencySet& set, const Frame& frame,
                                const Vec3& offset, double patch_a, double patch_b,
                                const SimulationRequest& req) {
    if (req.n_samples < 2)
        throw std::invalid_argument("estimate_moments: need at least two samples");
    if (req.points_per_wavelength < kMinPointsPerWavelength)
        throw std::invalid_argument(
            "grid density below the floor of 10 points per wavelength");

    const double root_m = set.sphere_radius();
    const int nu =
        std::max(2, static_cast<int>(std::ceil(patch_a * req.points_per_wavelength * root_m)) + 1);
    const int nv =
        std::max(2, static_cast<int>(std::ceil(patch_b * req.points_per_wavelength * root_m)) + 1);

    MomentEstimate est;
    est.m = set.m;
    est.n_points = set.n_points();
    est.n_samples = req.n_samples;
    est.seed = req.seed;
    est.points_per_wavelength = req.points_per_wavelength;
    est.grid_nu = nu;
    est.grid_nv = nv;
    est.generator = Xoshiro256pp::name();
    est.lengths.assign(static_cast<std::size_t>(req.n_samples), 0.0);

    std::vector<char> zero_flags(static_cast<std::size_t>(req.n_samples), 0);
    // Each sample's result is a function of its index alone; chunking only
    // schedules work.
    const std::size_t n_chunks =
        std::min<std::size_t>(static_cast<std::size_t>(req.n_samples), 64);
    parallel_chunks(static_cast<std::size_t>(req.n_samples), n_chunks, req.n_threads,
                    [&](std::size_t, std::size_t lo, std::size_t hi) {
                        for (std::size_t idx = lo; idx < hi; ++idx) {
                            const WaveSample sample =
                                sample_wave(set, mix_seed(req.seed, idx));
                            const GridField grid = evaluate_restricted(
                                sample, frame, offset, nu, nv, patch_a, patch_b);
                            auto center_field = [&](double u, double v) {
                                return wave_value(sample, frame, offset, u, v);
                            };
                            const NodalLengthResult res = nodal_length(grid, center_field);
                            est.lengths[idx] = res.length;
                            zero_flags[idx] =
                                (res.exact_zero_at_node || grid.exact_zero_at_node) ? 1 : 0;
                        }
                    });

    est.any_exact_zero =
        std::any_of(zero_flags.begin(), zero_flags.end(), [](char f) { return f != 0; });

    const double n = static_cast<double>(req.n_samples);
    est.mean = pairwise_sum(est.lengths) / n;
    std::vector<double> sq(est.lengths.size());
    for (std::size_t i = 0; i < est.lengths.size(); ++i) {
        const double d = est.lengths[i] - est.mean;
        sq[i] = d * d;
    }
    est.variance = pairwise_sum(sq) / (n - 1.0);
    est.se_mean = std::sqrt(est.variance / n);
    est.se_variance = est.variance * std::sqrt(2.0 / (n - 1.0));
    est.expected_length = expected_nodal_length(set.m, patch_a, patch_b);

    est.var_bound = std::numeric_limits<double>::quiet_NaN();
    if (req.type) {
        const std::int64_t kappa = req.kappa.value_or(0);
        if (*req.type != PlaneType::i || req.kappa)
            est.var_bound = variance_bound(set.m, set.n_points(), kappa, *req.type, false);
    }
    return est;
}

std::vector<double> concentration_probabilities(const MomentEstimate& est, double patch_a,
                                                double patch_b,
                                                const std::vector<double>& epsilons) {
    const double target = kPi / std::sqrt(3.0) * patch_a * patch_b;
    const double root_m = std::sqrt(static_cast<double>(est.m));
    std::vector<double> probs;
    probs.reserve(epsilons.size());
    for (double eps : epsilons) {
        std::int64_t exceed = 0;
        for (double len : est.lengths)
            if (std::abs(len / root_m - target) > eps) ++exceed;
        probs.push_back(static_cast<double>(exceed) /
                        static_cast<double>(est.lengths.size()));
    }
    return probs;
}

}  // namespace arw
