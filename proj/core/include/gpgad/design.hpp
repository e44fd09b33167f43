#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gpgad/gpr.hpp"
#include "gpgad/types.hpp"

namespace gpgad {

/// N_D candidate query locations, one per row.
struct DesignBatch {
    Mat points;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// Coefficients of the linearized transition z' = z + dt (alpha b + J^T beta).
struct LinCoeffs {
    double alpha = 1.0;
    Vec beta;
    bool fallback = false;

    static LinCoeffs pure_force(int dim) { return {1.0, Vec::Zero(dim), true}; }
};

/// Sampled GAD paths; each holds z^0 .. z^{K-1} with z^0 the current position.
struct PriorPathSet {
    std::vector<std::vector<Vec>> paths;
};

struct SpsaParams {
    double a = 0.05;
    double A = 100.0;
    double alpha = 0.602;
    double c = 1.0;
    double gamma = 0.101;
    int iters = 100;
    std::uint64_t seed = 0;

    double step_gain(int j) const;         // a / (A + j + 1)^alpha
    double perturbation_gain(int j) const;  // c / (j + 1)^gamma
    void validate() const;
};

struct ActiveLearningConfig {
    int n0 = 20;               // initial design size
    int n_design = 10;         // N_D, points per update
    double sigma_sur = 0.2;    // reliability threshold (a variance)
    int n_paths = 20;
    double horizon_T = 0.1;
    double design_dt = 0.01;
    double init_spread = 0.5;  // per-axis variance of the initial data around the start
    double noise_var = 0.0;    // observation noise of the true model
    int mle_budget = 200;
    int mle_starts = 4;
    long max_cost = 0;         // stop before an update that would exceed this; 0 = unlimited
    SpsaParams spsa;

    int horizon_steps() const;
    void validate() const;
};

/// Least-squares fit of (alpha, beta) to the last two GAD displacements:
///   (x_t - x_t1) / dt ~ alpha mu_b_t1 + mu_J_t1^T beta
///   (x_t1 - x_t2) / dt ~ alpha mu_b_t2 + mu_J_t2^T beta
/// Returns pure_force() when the 2d x (d+1) system is rank deficient.
LinCoeffs fit_lin_coeffs(const Vec& x_t, const Vec& x_t1, const Vec& x_t2, const Vec& mu_b_t1, const Vec& mu_b_t2,
                         const Mat& mu_J_t1, const Mat& mu_J_t2, double dt);

/// n sample-path GAD rollouts of K recorded points each, one FieldSampler per path.
PriorPathSet sample_prior_paths(const GprModel& model, const Vec& x, const Vec& v, int n, int K, double dt,
                                std::uint64_t seed);

/// Negative expected entropy of the linearized path transitions, with the
/// diagonal determinant approximation and variances conditioned on D only.
double utility_u1(const DesignBatch& design, const PriorPathSet& paths, const LinCoeffs& coeffs,
                  const KernelParams& params, double dt, ObservationKind kind = ObservationKind::energy);

using BatchObjective = std::function<double(const DesignBatch&)>;

/// SPSA ascent with Bernoulli +/-1 perturbations; returns the best iterate seen.
DesignBatch spsa_maximize(const BatchObjective& objective, const DesignBatch& start, const SpsaParams& params);

enum class Reliability { reliable, unreliable };

/// Unreliable iff max_i |alpha Var(b_i) + sum_j beta_j Var(J_ji)| >= sigma_sur.
Reliability reliability_check(const DerivVariance& var, const LinCoeffs& coeffs, double sigma_sur);

/// Samples prior paths from (x, v) and maximizes utility_u1 over N_D points
/// starting from a Gaussian cloud of spread 0.5 sqrt(length) around x.
DesignBatch propose_design(const GprModel& model, const Vec& x, const Vec& v, const LinCoeffs& coeffs,
                           const ActiveLearningConfig& al, std::uint64_t seed);

}  // namespace gpgad
