// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold at their stated tolerances.

#include <chrono>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "arw/regions.hpp"
#include "arw/report.hpp"
#include "arw/rng.hpp"
#include "arw/sim.hpp"
#include "arw/sums.hpp"
#include "oracles.hpp"

using arw::Vec3;
using arw::Vec3i;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

arw::Frame frame_z() { return arw::build_frame(arw::parse_normal("0,0,1")); }

// ---------------------------------------------------------------------------
// Shared Monte Carlo sweep for criteria 6 and 7.
// ---------------------------------------------------------------------------

const std::vector<std::int64_t> kSweepM{1, 2, 3, 5, 6, 17, 29};
constexpr std::uint64_t kSweepSeed = 20240501;
constexpr int kSweepSamples = 2000;

struct SweepData {
    std::vector<arw::MomentEstimate> estimates;
    std::vector<std::int64_t> kappas;
};

const SweepData& sweep_data() {
    static const SweepData data = [] {
        SweepData d;
        const auto frame = frame_z();
        for (std::int64_t m : kSweepM) {
            const auto set = arw::enumerate_frequencies(m);
            arw::SimulationRequest req;
            req.n_samples = kSweepSamples;
            req.seed = kSweepSeed;
            req.type = arw::PlaneType::i;
            req.kappa = arw::kappa_exact(set);
            d.kappas.push_back(*req.kappa);
            d.estimates.push_back(arw::estimate_moments(set, frame, {0, 0, 0}, 1, 1, req));
        }
        return d;
    }();
    return data;
}

// ---------------------------------------------------------------------------

Result criterion1_r3_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    constexpr std::int64_t limit = 10000;
    const auto brute = oracles::brute_r3_table(limit);
    std::int64_t mismatches = 0;
    for (std::int64_t m = 1; m <= limit; ++m)
        if (arw::representation_count(m) != brute[static_cast<std::size_t>(m)]) ++mismatches;
    const double secs = seconds_since(t0);
    Result r;
    r.pass = mismatches == 0 && secs < 60.0;
    r.detail = "all m <= 10^4, " + std::to_string(mismatches) + " mismatches, " +
               fmt(secs, 3) + " s";
    return r;
}

Result criterion2_kappa_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::int64_t checked = 0, mismatches = 0;
    for (std::int64_t m = 1; m <= 50; ++m) {
        if (!arw::is_admissible(m)) continue;
        const auto set = arw::enumerate_frequencies(m);
        if (set.n_points() < 3) continue;
        ++checked;
        if (arw::kappa_exact(set) != oracles::kappa_recount(set)) ++mismatches;
    }
    // frozen small values; kappa(sqrt 2) = 6 via the hexagon on x+y+z=0,
    // confirmed by both independent routes
    const bool frozen = arw::kappa_exact(arw::enumerate_frequencies(1)) == 4 &&
                        arw::kappa_exact(arw::enumerate_frequencies(2)) == 6 &&
                        arw::kappa_exact(arw::enumerate_frequencies(3)) == 4;
    const double secs = seconds_since(t0);
    Result r;
    r.pass = mismatches == 0 && frozen && secs < 30.0;
    r.detail = std::to_string(checked) + " admissible m <= 50, " +
               std::to_string(mismatches) + " mismatches, kappa(1,2,3) = (4,6,4), " +
               fmt(secs, 3) + " s";
    return r;
}

Result criterion3_second_moment_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    arw::Xoshiro256pp rng(314159);
    int configs = 0;
    double worst_rel = 0;
    bool pass = true;

    auto check_config = [&](const arw::FrequencySet& set, const arw::Frame& frame, double a,
                            double b) {
        const auto sm = arw::second_moment_r2(set, frame, a, b);
        const double diff = std::abs(sm.closed_form - sm.quadrature.value);
        const double rel = diff / std::abs(sm.closed_form);
        worst_rel = std::max(worst_rel, rel);
        if (!sm.quadrature.converged) pass = false;
        if (diff > std::max(sm.quadrature.error_estimate, 1e-12)) pass = false;
        if (rel > 1e-5) pass = false;
        ++configs;
    };

    // the analytically verified case: value 2/9
    {
        const auto set = arw::enumerate_frequencies(1);
        const auto sm = arw::second_moment_r2(set, frame_z(), 1.0, 1.0);
        if (std::abs(sm.closed_form - 2.0 / 9.0) > 1e-13) pass = false;
        check_config(set, frame_z(), 1.0, 1.0);
    }
    while (configs < 21) {
        const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next() % 200);
        if (!arw::is_admissible(m)) continue;
        const auto set = arw::enumerate_frequencies(m);
        if (set.n_points() < 2) continue;
        Vec3 n{rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5};
        if (n.norm() < 0.1) continue;
        const auto frame = arw::build_frame_from_unit_normal(n);
        const double a = 0.3 + 0.7 * rng.uniform();
        const double b = 0.3 + 0.7 * rng.uniform();
        check_config(set, frame, a, b);
    }
    const double secs = seconds_since(t0);
    Result r;
    r.pass = pass && secs < 300.0;
    r.detail = std::to_string(configs) + " configs (m <= 200), worst rel diff " +
               fmt(worst_rel, 3) + ", " + fmt(secs, 3) + " s";
    return r;
}

Result criterion4_gsum_quadrature() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;

    // frozen exact values
    {
        const auto g1 = arw::g_sum(arw::enumerate_frequencies(1),
                                   arw::build_frame(arw::parse_normal("1,0,0")), 1.0, 1.0);
        const auto g2 = arw::g_sum(arw::enumerate_frequencies(2), frame_z(), 1.0, 1.0);
        if (std::abs(g1.g_value - 2.0) > 1e-12) pass = false;
        if (std::abs(g2.g_value - 8.0) > 1e-12) pass = false;
    }

    // per-pair closed form vs 2-d quadrature
    arw::Xoshiro256pp rng(2718);
    const auto set = arw::enumerate_frequencies(29);
    int pairs = 0;
    double worst_rel = 0;
    while (pairs < 100) {
        Vec3 n{rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5};
        if (n.norm() < 0.1) continue;
        const auto frame = arw::build_frame_from_unit_normal(n);
        const std::size_t i = rng.next() % set.points.size();
        const std::size_t j = rng.next() % set.points.size();
        if (i == j) continue;
        const double a = 0.3 + 0.7 * rng.uniform();
        const double b = 0.3 + 0.7 * rng.uniform();
        const Vec3 d = arw::to_vec3(set.points[i] - set.points[j]);
        const double x = dot(d, frame.xi), y = dot(d, frame.eta);
        const double closed = arw::rect_factor_sq(x, a) * arw::rect_factor_sq(y, b);
        const double quad = oracles::rect_product_quadrature(x, y, a, b);
        const double scale = std::max({std::abs(closed), std::abs(quad), 1e-30});
        const double rel = std::abs(closed - quad) / scale;
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-9) pass = false;
        ++pairs;
    }
    const double secs = seconds_since(t0);
    Result r;
    r.pass = pass && secs < 60.0;
    r.detail = "exact values 2 and 8; 100 random pairs, worst rel err " + fmt(worst_rel, 3) +
               ", " + fmt(secs, 3) + " s";
    return r;
}

Result criterion5_trineq() {
    bool pass = true;
    std::int64_t tested = 0;
    arw::Xoshiro256pp rng(1618);
    // rational planes over the sweep list plus random frames over m <= 200
    std::vector<std::pair<std::int64_t, arw::Frame>> configs;
    for (std::int64_t m : kSweepM) configs.emplace_back(m, frame_z());
    int extra = 0;
    while (extra < 10) {
        const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next() % 200);
        if (!arw::is_admissible(m) || arw::representation_count(m) == 0) continue;
        Vec3 n{rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5};
        if (n.norm() < 0.1) continue;
        configs.emplace_back(m, arw::build_frame_from_unit_normal(n));
        ++extra;
    }
    for (const auto& [m, frame] : configs) {
        const auto set = arw::enumerate_frequencies(m);
        const double a = 0.25 + 0.75 * rng.uniform();
        const double b = 0.25 + 0.75 * rng.uniform();
        for (const auto& p : set.points)
            for (const auto& q : set.points) {
                if (p == q) continue;
                const Vec3 d = arw::to_vec3(p - q);
                const double x = dot(d, frame.xi), y = dot(d, frame.eta);
                if (x == 0.0 || y == 0.0) continue;
                const double prod = arw::rect_factor_sq(x, a) * arw::rect_factor_sq(y, b);
                const auto bound = arw::trineq_bound(x, y, a, b);
                if (bound.zero_projection) continue;
                if (prod > bound.value * (1.0 + 1e-12)) pass = false;
                ++tested;
            }
    }
    Result r;
    r.pass = pass;
    r.detail = std::to_string(tested) + " nonzero-projection pairs across " +
               std::to_string(configs.size()) + " configs, exact inequality";
    return r;
}

Result criterion6_expected_length() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& data = sweep_data();
    bool pass = true;
    std::string zs;
    for (std::size_t i = 0; i < kSweepM.size(); ++i) {
        const auto& est = data.estimates[i];
        const double z = (est.mean - est.expected_length) / est.se_mean;
        if (std::abs(z) > 3.0) pass = false;
        zs += (i ? ", " : "") + std::string("m=") + std::to_string(kSweepM[i]) + ": z=" +
              fmt(z, 2);
    }
    const double secs = seconds_since(t0);
    Result r;
    r.pass = pass && secs < 900.0;
    r.detail = "2000 samples each, |z| <= 3 required [" + zs + "], " + fmt(secs, 3) + " s";
    return r;
}

Result criterion7_variance_ratio_and_regimes() {
    const auto& data = sweep_data();
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < kSweepM.size(); ++i) {
        const auto& est = data.estimates[i];
        const double bound = arw::variance_bound(kSweepM[i], est.n_points, data.kappas[i],
                                                 arw::PlaneType::i, false);
        const double ratio = est.variance / bound;
        if (!std::isfinite(ratio) || ratio > 10.0) pass = false;
        detail += (i ? ", " : "") + std::string("m=") + std::to_string(kSweepM[i]) + ": " +
                  fmt(ratio, 3);
    }

    // regime-count reports with the tuned parameter choices, emitted for
    // inspection (bounds with implicit constants are never asserted)
    std::cout << "    regime reports (c, rho_or_cprime, n_first, n_second, third_sum):\n";
    for (std::int64_t m : {17, 29}) {
        const auto set = arw::enumerate_frequencies(m);
        const auto frame = frame_z();
        const std::vector<std::pair<const char*, arw::RegimeParams>> modes{
            {"type-ii  (N^{3/7}, N^{-8/7})",
             arw::default_regime_params(arw::PlaneType::ii, false, set.n_points())},
            {"type-iii (N^{1/14}, N^{-6/7})",
             arw::default_regime_params(arw::PlaneType::iii, false, set.n_points())},
            {"conditional (N^{1/5})",
             arw::default_regime_params(arw::PlaneType::iii, true, set.n_points())}};
        for (const auto& [label, params] : modes) {
            const auto counts = arw::regime_counts(set, frame, params);
            std::cout << "      m=" << m << " " << label << ": " << fmt(params.c, 4) << ", "
                      << fmt(params.second, 4) << ", " << counts.n_first << ", "
                      << counts.n_second << ", " << fmt(counts.third_sum, 6) << "\n";
        }
    }

    Result r;
    r.pass = pass;
    r.detail = "Var*N/(m*kappa) per m [" + detail + "], ceiling 10";
    return r;
}

Result criterion8_riesz_trend() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::int64_t> ms{1, 3, 67, 193, 382, 787, 1475, 2691, 4893, 8897};
    bool pass = true;
    std::string finals;
    for (double s : {0.5, 1.0, 1.5}) {
        const double limit = arw::riesz_limit_constant(s);
        std::vector<double> devs;
        double final_ratio = 0;
        for (std::int64_t m : ms) {
            const auto e = arw::riesz_energy(arw::enumerate_frequencies(m), s);
            devs.push_back(std::abs(e.ratio - limit));
            final_ratio = e.ratio;
        }
        if (std::abs(final_ratio - limit) > 0.25 * limit) pass = false;
        for (std::size_t i = ms.size() / 2; i + 1 < ms.size(); ++i)
            if (devs[i + 1] > devs[i]) pass = false;
        finals += std::string(finals.empty() ? "" : ", ") + "s=" + fmt(s, 2) + ": " +
                  fmt(final_ratio, 4) + " vs " + fmt(limit, 4);
    }
    const double secs = seconds_since(t0);
    Result r;
    r.pass = pass && secs < 120.0;
    r.detail = "m up to 8897, deviations weakly decreasing on the tail [" + finals + "], " +
               fmt(secs, 3) + " s";
    return r;
}

Result criterion9_marching_squares() {
    auto cosline = [](double u, double) { return std::cos(arw::kTwoPi * u); };
    const auto lf = arw::grid_from_function(cosline, 21, 21, 1.0, 1.0);
    const double len = arw::nodal_length(lf, cosline).length;

    auto quarter = [](double u, double v) { return u * u + v * v - 0.25; };
    const auto qf = arw::grid_from_function(quarter, 21, 21, 1.0, 1.0);
    const double qlen = arw::nodal_length(qf, quarter).length;

    Result r;
    r.pass = std::abs(len - 2.0) <= 1e-3 && std::abs(qlen - arw::kPi / 4.0) <= 1e-2;
    r.detail = "cos lines: " + fmt(len, 6) + " (want 2 +- 1e-3); quarter circle: " +
               fmt(qlen, 6) + " (want " + fmt(arw::kPi / 4.0, 6) + " +- 1e-2)";
    return r;
}

Result criterion10_determinism() {
    const auto set = arw::enumerate_frequencies(5);
    const auto frame = frame_z();
    arw::SimulationRequest req;
    req.n_samples = 200;
    req.seed = 99;

    std::vector<arw::MomentEstimate> runs;
    for (unsigned threads : {1u, 2u, 4u}) {
        req.n_threads = threads;
        runs.push_back(arw::estimate_moments(set, frame, {0, 0, 0}, 1, 1, req));
    }
    bool pass = true;
    const std::string ref = arw::moment_estimate_json(runs[0]).dump();
    for (const auto& run : runs) {
        if (arw::moment_estimate_json(run).dump() != ref) pass = false;
        if (run.lengths.size() != runs[0].lengths.size()) pass = false;
        else if (std::memcmp(run.lengths.data(), runs[0].lengths.data(),
                             run.lengths.size() * sizeof(double)) != 0)
            pass = false;
    }
    Result r;
    r.pass = pass;
    r.detail = "thread counts 1/2/4: JSON numeric fields and per-sample lengths bit-identical";
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 2 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);

    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"representation-count oracle equivalence", criterion1_r3_oracle},
        {"kappa oracle equivalence", criterion2_kappa_oracle},
        {"patch second-moment identity vs quadrature", criterion3_second_moment_identity},
        {"pairwise-sum closed form vs per-pair quadrature", criterion4_gsum_quadrature},
        {"explicit-constant product bound", criterion5_trineq},
        {"expected nodal length law", criterion6_expected_length},
        {"variance ratio ceiling and regime reports", criterion7_variance_ratio_and_regimes},
        {"inverse-distance energy trend", criterion8_riesz_trend},
        {"marching-squares calibration", criterion9_marching_squares},
        {"determinism across worker counts", criterion10_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (only != 0 && only != id) continue;
        Result res;
        try {
            res = criteria[i].second();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << id << ". " << criteria[i].first
                  << " -- " << res.detail << "\n";
        if (!res.pass) ++failures;
    }
    if (failures == 0) std::cout << "acceptance: all criteria passed\n";
    else std::cout << "acceptance: " << failures << " criteria FAILED\n";
    return failures == 0 ? 0 : 1;
}
