#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>

#include "gpgad/kernel.hpp"
#include "gpgad/types.hpp"

namespace gpgad {

/// Observed locations and labels. ENERGY labels are 1-vectors holding u(x);
/// FORCE labels are d-vectors holding b(x).
class Dataset {
public:
    Dataset(ObservationKind kind, int dim);

    ObservationKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int label_size() const { return kind_ == ObservationKind::energy ? 1 : dim_; }
    std::size_t size() const { return locations_.size(); }
    bool empty() const { return locations_.empty(); }

    /// Appends one labelled point and counts it as one true-model evaluation.
    void add(const Vec& x, const Vec& label);
    /// Counts a true-model evaluation whose label was not kept.
    void count_discarded_evaluation() { ++eval_count_; }

    const std::vector<Vec>& locations() const { return locations_; }
    const std::vector<Vec>& labels() const { return labels_; }
    long eval_count() const { return eval_count_; }

    Mat location_matrix() const;  // n x d
    Mat label_matrix() const;     // n x label_size

private:
    ObservationKind kind_;
    int dim_;
    std::vector<Vec> locations_;
    std::vector<Vec> labels_;
    long eval_count_ = 0;
};

/// Marginal variances of the surrogate (b, J) at one point.
struct DerivVariance {
    Vec var_b;    // d
    Mat var_J;    // d x d, (i, j) = Var(J_ij)
    Mat cov_bJ;   // d x d, (i, j) = Cov(b_i, J_ji)
};

/// Posterior of (b, J) at one point.
struct DerivPosterior : DerivVariance {
    Vec mu_b;
    Mat mu_J;
};

/// Gaussian-process surrogate conditioned on a Dataset.
///
/// ENERGY mode places a zero-mean GP on u - mean(labels) and derives
/// b = -grad u, J = -hess u from it. FORCE mode uses one independent GP per
/// component of b sharing hyperparameters; J(i, j) is the derivative of the
/// i-th GP along x_j. Components share the locations, so a single Gram
/// factorization serves all of them.
class GprModel {
public:
    const KernelParams& params() const { return params_; }
    const Dataset& data() const { return data_; }
    int dim() const { return data_.dim(); }
    ObservationKind kind() const { return data_.kind(); }

    /// Posterior mean of the observed quantity (u in ENERGY mode, b in FORCE mode).
    Vec predict_mean(const Vec& x) const;
    DerivPosterior predict_derivatives(const Vec& x) const;

    // Factorization internals, consumed by FieldSampler.
    const Mat& locations() const { return locations_; }
    const Mat& gram_factor() const { return factor_; }            // lower triangular L, L L^T = K + (noise + jitter) I
    const Mat& whitened_labels() const { return whitened_; }      // L^{-1} (Y - offset), n x label_size
    const Vec& label_offset() const { return offset_; }
    double jitter() const { return jitter_; }

private:
    friend GprModel fit(const Dataset& data, const KernelParams& params);
    GprModel(Dataset data, KernelParams params) : params_(params), data_(std::move(data)) {}

    KernelParams params_;
    Dataset data_;
    Mat locations_;
    Mat factor_;
    Mat whitened_;
    Mat weights_;  // K^{-1} (Y - offset)
    Vec offset_;
    double jitter_ = 0.0;
};

/// Factorizes the noisy Gram matrix and caches the weight solve.
/// Throws IllConditionedError when jitter escalation to 1e-6 * eta does not
/// help, or when noise-free data contains duplicate locations.
GprModel fit(const Dataset& data, const KernelParams& params);

double log_marginal_likelihood(const Dataset& data, const KernelParams& params);

struct MleOptions {
    int budget = 200;          // simplex iterations per start
    int starts = 4;
    bool noise_free = false;   // hold the noise variance at zero
    std::uint64_t seed = 0;
};

struct MleResult {
    KernelParams params;
    double log_likelihood = 0.0;
    bool fell_back = false;    // no start improved on a finite likelihood; params == init
};

/// Maximizes the log marginal likelihood over (log eta, log length, log noise)
/// with a multi-start Nelder-Mead simplex. Bounds: log length in [-6, 6],
/// log eta in [-12, 12], log noise in [-16, 4].
MleResult optimize_hyperparams(const Dataset& data, const KernelParams& init, const MleOptions& options);

/// Posterior variances conditioned only on a candidate batch of design points
/// (ignoring the historical data). Factorizes the batch Gram once; `at` costs
/// O(N_D^2) per query point.
class BatchVariance {
public:
    BatchVariance(const KernelParams& params, const Mat& design, ObservationKind kind);
    DerivVariance at(const Vec& z) const;

private:
    KernelParams params_;
    Mat design_;
    Mat factor_;
    ObservationKind kind_;
};

DerivVariance fast_posterior_variance(const KernelParams& params, const Mat& design, const Vec& z,
                                      ObservationKind kind = ObservationKind::energy);

}  // namespace gpgad
