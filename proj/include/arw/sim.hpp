#ifndef ARW_SIM_HPP
#define ARW_SIM_HPP

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arw/lattice.hpp"
#include "arw/plane.hpp"

namespace arw {

inline constexpr double kDefaultPointsPerWavelength = 20.0;
inline constexpr double kMinPointsPerWavelength = 10.0;

/// Expected nodal intersection length on an A x B planar patch.
inline double expected_nodal_length(std::int64_t m, double patch_a, double patch_b) {
    return std::sqrt(static_cast<double>(m)) * patch_a * patch_b * kPi / std::sqrt(3.0);
}

// ---------------------------------------------------------------------------
// One Gaussian draw of the ensemble: a complex coefficient per antipodal
// representative, Re/Im independent N(0, 1/2), so E|a|^2 = 1 and the
// reconstructed field is real with unit pointwise variance.
// ---------------------------------------------------------------------------

struct WaveSample {
    std::int64_t m = 0;
    std::uint64_t seed = 0;
    std::vector<Frequency> representatives;
    std::vector<std::complex<double>> coefficients;
};

WaveSample sample_wave(const FrequencySet& set, std::uint64_t seed);

/// Direct evaluation of the restricted field at plane coordinates (u, v):
/// (2/sqrt N) sum over reps of Re(a) cos(2 pi <l, x>) - Im(a) sin(2 pi <l, x>)
/// with x = offset + u xi + v eta.
double wave_value(const WaveSample& sample, const Frame& frame, const Vec3& offset, double u,
                  double v);

// ---------------------------------------------------------------------------
// Grid evaluation over the patch [0,A] x [0,B], both boundaries included.
// ---------------------------------------------------------------------------

struct GridField {
    int nu = 0, nv = 0;
    double hu = 0, hv = 0;
    double patch_a = 0, patch_b = 0;
    std::vector<double> values;  // row-major, index i * nv + j
    bool exact_zero_at_node = false;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * nv + j]; }
};

GridField evaluate_restricted(const WaveSample& sample, const Frame& frame, const Vec3& offset,
                              int nu, int nv, double patch_a, double patch_b);

/// Builds a grid from any scalar field (calibration and tests).
GridField grid_from_function(const std::function<double(double, double)>& f, int nu, int nv,
                             double patch_a, double patch_b);

// ---------------------------------------------------------------------------
// Zero-set length by marching squares with linear edge interpolation.
// Saddle cells are disambiguated by the sign of the field at the cell
// center when a field evaluator is supplied (corner average otherwise).
// Exact zeros at grid nodes count as +0 and are flagged.
// ---------------------------------------------------------------------------

struct NodalLengthResult {
    double length = 0;
    bool exact_zero_at_node = false;
};

NodalLengthResult nodal_length(const GridField& field,
                               const std::function<double(double, double)>& field_at = {});

// ---------------------------------------------------------------------------
// Monte Carlo moments of the nodal intersection length.
// ---------------------------------------------------------------------------

struct MomentEstimate {
    std::int64_t m = 0;
    std::int64_t n_points = 0;
    int n_samples = 0;
    double mean = 0;
    double variance = 0;  // unbiased
    double se_mean = 0;
    double se_variance = 0;
    double expected_length = 0;   // sqrt(m) A B pi / sqrt(3)
    double var_bound = 0;         // NaN when the plane type is unknown
    std::uint64_t seed = 0;
    double points_per_wavelength = 0;
    int grid_nu = 0, grid_nv = 0;
    bool any_exact_zero = false;
    std::string generator;
    std::vector<double> lengths;  // per-sample, index order
};

struct SimulationRequest {
    int n_samples = 2000;
    std::uint64_t seed = 0;
    double points_per_wavelength = kDefaultPointsPerWavelength;
    unsigned n_threads = 0;  // 0: hardware default
    std::optional<PlaneType> type;
    std::optional<std::int64_t> kappa;  // for the type-i variance bound
};

/// Runs n_samples independent draws with per-sample seeds mix(seed, i).
/// Sample i's length never depends on the worker count and the reduction
/// order is fixed, so results are bit-identical across thread counts.
MomentEstimate estimate_moments(const FrequencySet& set, const Frame& frame,
                                const Vec3& offset, double patch_a, double patch_b,
                                const SimulationRequest& req);

/// Empirical P(|L/sqrt(m) - (pi/sqrt 3) A B| > eps) per epsilon.
std::vector<double> concentration_probabilities(const MomentEstimate& est, double patch_a,
                                                double patch_b,
                                                const std::vector<double>& epsilons);

}  // namespace arw

#endif  // ARW_SIM_HPP
