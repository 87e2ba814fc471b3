#ifndef ARW_SUMS_HPP
#define ARW_SUMS_HPP

#include <string>

#include "arw/lattice.hpp"
#include "arw/plane.hpp"

namespace arw {

// ---------------------------------------------------------------------------
// Stationary covariance of the restricted field and its jet.
// ---------------------------------------------------------------------------

struct Displacement {
    double du = 0;
    double dv = 0;
};

/// (r, D, H) at a plane displacement. The lattice set's antipodal symmetry
/// cancels all imaginary parts, leaving the real forms
///   r =  (1/N)      sum cos(2 pi <l, delta>),
///   D = -(2 pi/N)   sum sin(2 pi <l, delta>) l,
///   H = -(4 pi^2/N) sum cos(2 pi <l, delta>) l l^T,
/// with delta = du xi + dv eta.
struct CovarianceJet {
    double r = 1.0;
    Vec3 grad{0, 0, 0};
    Mat3 hess{};
};

CovarianceJet covariance_jet(const FrequencySet& set, const Frame& frame,
                             const Displacement& d);

/// Covariance value only (cheaper inner loop for quadrature).
double covariance_value(const FrequencySet& set, const Frame& frame, const Displacement& d);

// ---------------------------------------------------------------------------
// The squared rectangle factor |int_0^L e^{2 pi i u x} du|^2.
// ---------------------------------------------------------------------------

/// L^2 at x = 0, else sin^2(pi L x) / (pi x)^2; a series branch below
/// |x| < 1e-8 / L keeps the evaluation continuous through zero.
double rect_factor_sq(double x, double length);

// ---------------------------------------------------------------------------
// The pairwise exponential sum over ordered pairs of distinct frequencies.
// ---------------------------------------------------------------------------

struct GSumResult {
    double g_value = 0;
    std::int64_t n_zero_pairs = 0;  // pairs whose xi- and eta-projections both vanish
    std::string frame_convention;
};

GSumResult g_sum(const FrequencySet& set, const Frame& frame, double patch_a, double patch_b);

/// Explicit-constant envelope min(A^2 B^2, 1/(pi^4 x^2 y^2)); when x y = 0
/// only the first branch applies and the result is flagged.
struct TrineqBound {
    double value = 0;
    bool zero_projection = false;
};

TrineqBound trineq_bound(double x, double y, double patch_a, double patch_b);

// ---------------------------------------------------------------------------
// Kac-Rice integrand and the second-moment machinery.
// ---------------------------------------------------------------------------

/// r^2 + D Omega D^T / m + tr(H Omega H Omega) / m^2  (nonnegative).
double kr_integrand(const CovarianceJet& jet, const Mat3& omega, std::int64_t m);

struct QuadratureResult {
    double value = 0;
    double error_estimate = 0;
    int panels_per_axis = 0;
    bool converged = false;
};

struct SecondMomentR2 {
    double closed_form = 0;  // (AB)^2 / N + G / N^2, an exact identity
    QuadratureResult quadrature;
};

/// Both routes to the integral of r^2 over the patch squared: the exact
/// closed form and a weighted 2-d quadrature over displacements using
/// stationarity. Cross-validation pair; neither depends on the other.
SecondMomentR2 second_moment_r2(const FrequencySet& set, const Frame& frame, double patch_a,
                                double patch_b, double rel_tol = 1e-6);

enum JetTerms : unsigned {
    kTermR2 = 1u,
    kTermGrad = 2u,
    kTermHess = 4u,
    kTermAll = 7u,
};

struct SecondMomentFull {
    QuadratureResult quadrature;
    double comparator = 0;  // 1/N + G/N^2
    double ratio = 0;       // quadrature / comparator
};

/// Weighted quadrature of the Kac-Rice integrand over displacements, with
/// the triangular patch weights folded in analytically. Throws
/// NumericalError when the quadrature fails to converge.
SecondMomentFull second_moment_full(const FrequencySet& set, const Frame& frame,
                                    const Mat3& omega, double patch_a, double patch_b,
                                    unsigned terms = kTermAll, double rel_tol = 1e-6);

/// The explicit part of the variance bounds: (m/N) kappa for type i planes,
/// (m/N) N^{3/7} for type ii, (m/N) N^{3/4} for type iii, and (m/N) N^{1/2}
/// in the conditional mode. Epsilon factors and implied constants omitted.
double variance_bound(std::int64_t m, std::int64_t n_points, std::int64_t kappa,
                      PlaneType type, bool conditional);

}  // namespace arw

#endif  // ARW_SUMS_HPP
