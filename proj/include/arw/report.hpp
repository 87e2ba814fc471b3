#ifndef ARW_REPORT_HPP
#define ARW_REPORT_HPP

#include <string>

#include <json.hpp>

#include "arw/regions.hpp"
#include "arw/sim.hpp"
#include "arw/sums.hpp"

namespace arw {

inline constexpr const char* kToolName = "arw";
inline constexpr const char* kToolVersion = "0.1.0";

/// One shared number formatter so CSV and JSON carry identical values.
inline std::string format_number(double v) { return nlohmann::json(v).dump(); }

inline nlohmann::json json_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

inline nlohmann::json moment_estimate_json(const MomentEstimate& est) {
    nlohmann::json j;
    j["m"] = est.m;
    j["n_points"] = est.n_points;
    j["n_samples"] = est.n_samples;
    j["mean_length"] = est.mean;
    j["variance"] = est.variance;
    j["se_mean"] = est.se_mean;
    j["se_variance"] = est.se_variance;
    j["expected_length"] = est.expected_length;
    j["variance_bound"] = json_or_null(est.var_bound);
    j["seed"] = est.seed;
    j["points_per_wavelength"] = est.points_per_wavelength;
    j["grid"] = {est.grid_nu, est.grid_nv};
    j["any_exact_zero_at_node"] = est.any_exact_zero;
    j["generator"] = est.generator;
    return j;
}

inline nlohmann::json gsum_json(std::int64_t m, std::int64_t n, const GSumResult& g, double a,
                                double b) {
    nlohmann::json j;
    j["m"] = m;
    j["n_points"] = n;
    j["patch_a"] = a;
    j["patch_b"] = b;
    j["g"] = g.g_value;
    j["n_zero_pairs"] = g.n_zero_pairs;
    j["frame_convention"] = g.frame_convention;
    return j;
}

inline nlohmann::json riesz_json(std::int64_t m, std::int64_t n, double s,
                                 const RieszEnergy& e) {
    nlohmann::json j;
    j["m"] = m;
    j["n_points"] = n;
    j["s"] = s;
    j["energy"] = e.energy;
    j["ratio"] = e.ratio;
    j["limit_constant"] = e.limit_constant;
    return j;
}

}  // namespace arw

#endif  // ARW_REPORT_HPP
