#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "gpgad/types.hpp"

namespace gpgad {

/// Hyperparameters of the squared-exponential kernel
///
///     k(x, x') = eta * exp(-|x - x'|^2 / (2 * length))
///
/// `length` enters the exponent unsquared, so it carries units of squared
/// distance; sqrt(length) is the correlation distance. The noise variance is
/// the per-observation Gaussian noise added to the Gram diagonal.
///
/// Values are stored as logarithms; noise_var == 0 is represented by -inf.
class KernelParams {
public:
    KernelParams() = default;
    KernelParams(double eta, double length, double noise_var = 0.0);

    static KernelParams from_log(double log_eta, double log_length, double log_noise_var);

    double eta() const { return std::exp(log_eta_); }
    double length() const { return std::exp(log_length_); }
    double noise_var() const { return std::exp(log_noise_var_); }

    double log_eta() const { return log_eta_; }
    double log_length() const { return log_length_; }
    double log_noise_var() const { return log_noise_var_; }

    KernelParams with_noise_var(double noise_var) const;

    bool operator==(const KernelParams&) const = default;

private:
    double log_eta_ = 0.0;
    double log_length_ = 0.0;
    double log_noise_var_ = -std::numeric_limits<double>::infinity();
};

/// A linear functional of a scalar Gaussian process g:
/// sign * d^order g / (dx_index[0] ... dx_index[order-1]).
struct Functional {
    int order = 0;
    std::array<int, 2> index{0, 0};
    double sign = 1.0;

    static Functional value() { return {}; }
    static Functional slope(int i, double sign = 1.0) { return {1, {i, 0}, sign}; }
    static Functional curvature(int i, int j, double sign = 1.0) { return {2, {i, j}, sign}; }
};

// Energy-mode components: b = -grad u, J = -hess u.
inline Functional energy_force(int i) { return Functional::slope(i, -1.0); }
inline Functional energy_jacobian(int i, int j) { return Functional::curvature(i, j, -1.0); }

/// Base kernel value. Throws InputError on dimension mismatch or non-finite input.
double energy_kernel(const Vec& x, const Vec& x2, const KernelParams& p);

/// Cov(a[g](x), b[g](x2)) for the SE kernel, from closed-form derivatives of
/// orders 0..4. Inputs are not validated.
double functional_covariance(const Vec& x, const Functional& a, const Vec& x2, const Functional& b,
                             const KernelParams& p);

/// Covariances between the energy u at each training point X.row(n) and the
/// force b / Jacobian J at the query point x (derivatives taken in the second
/// kernel argument, signs of b = -grad u and J = -hess u applied).
struct CrossBlocks {
    Mat u_b;  // n x d, (n, i) = Cov(u(X_n), b_i(x))
    Mat u_J;  // n x d^2, (n, i*d + j) = Cov(u(X_n), J_ij(x))
};

CrossBlocks cross_blocks(const Vec& x, const Mat& X, const KernelParams& p);

/// Covariances between (b, J) at x and (b, J) at x2.
struct JointBlocks {
    Mat bb;  // d x d
    Mat bJ;  // d x d^2, (i, e*d + g) = Cov(b_i(x), J_eg(x2))
    Mat JJ;  // d^2 x d^2
};

JointBlocks joint_blocks(const Vec& x, const Vec& x2, const KernelParams& p);

/// Full stacked prior covariance of (u, b, J) over a point set, ordered point-major:
/// each point contributes 1 + d + d^2 consecutive rows.
Mat stacked_prior_covariance(const Mat& X, const KernelParams& p);

/// Jitter added to Gram diagonals, relative to eta.
inline constexpr double kBaseJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-6;

}  // namespace gpgad
