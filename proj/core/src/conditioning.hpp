#pragma once

// Shared Gram-matrix plumbing for gpr.cpp and field_sampler.cpp.

#include <optional>
#include <string>
#include <vector>

#include "gpgad/gpr.hpp"
#include "gpgad/kernel.hpp"

namespace gpgad::detail {

Mat value_gram(const Mat& X, const KernelParams& p);

struct Factor {
    Mat L;
    double jitter = 0.0;
};

/// Cholesky of K + (noise + jitter) I, escalating jitter by 10x from
/// kBaseJitter * eta up to kMaxJitter * eta.
std::optional<Factor> try_factor(const Mat& K, double noise_var, double eta);
Factor factor_or_throw(const Mat& K, double noise_var, double eta, const std::string& what);

/// Throws IllConditionedError naming any pair of rows closer than a tiny
/// fraction of the correlation distance.
void reject_duplicates(const Mat& X, const KernelParams& p, const std::string& what);

/// Query functionals whose posterior describes (b, J) at a point.
/// ENERGY: b_0..b_{d-1}, J_00, J_01, ..., J_{d-1,d-1}  (d + d^2 entries).
/// FORCE:  value, slope_0..slope_{d-1} of one component GP   (1 + d entries).
std::vector<Functional> query_functionals(ObservationKind kind, int d);

/// Cross covariances Cov(value(X_n), q_f(z)), n x |q|.
Mat cross_covariance(const Mat& X, const Vec& z, const std::vector<Functional>& q, const KernelParams& p);

/// Builds marginal variances from whitened cross covariances V = L^{-1} C
/// (V may have zero rows for the prior).
DerivVariance assemble_variance(ObservationKind kind, int d, const Vec& z, const Mat& V,
                                const std::vector<Functional>& q, const KernelParams& p);

}  // namespace gpgad::detail
