#include "gpgad/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "conditioning.hpp"
#include "gpgad/rng.hpp"

namespace gpgad {

// ---------------------------------------------------------------- Dataset

Dataset::Dataset(ObservationKind kind, int dim) : kind_(kind), dim_(dim) {
    if (dim < 1) throw InputError("Dataset: dimension must be >= 1");
}

void Dataset::add(const Vec& x, const Vec& label) {
    if (x.size() != dim_) throw InputError("Dataset::add: location dimension mismatch");
    if (label.size() != label_size()) throw InputError("Dataset::add: label dimension mismatch");
    if (!x.allFinite() || !label.allFinite()) throw InputError("Dataset::add: non-finite location or label");
    locations_.push_back(x);
    labels_.push_back(label);
    ++eval_count_;
}

Mat Dataset::location_matrix() const {
    Mat X(static_cast<Eigen::Index>(size()), dim_);
    for (std::size_t n = 0; n < size(); ++n) X.row(static_cast<Eigen::Index>(n)) = locations_[n].transpose();
    return X;
}

Mat Dataset::label_matrix() const {
    Mat Y(static_cast<Eigen::Index>(size()), label_size());
    for (std::size_t n = 0; n < size(); ++n) Y.row(static_cast<Eigen::Index>(n)) = labels_[n].transpose();
    return Y;
}

// ---------------------------------------------------------------- shared plumbing

namespace detail {

Mat value_gram(const Mat& X, const KernelParams& p) {
    const auto n = X.rows();
    const double inv2l = 1.0 / (2.0 * p.length());
    const double eta = p.eta();
    Mat K(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        K(j, j) = eta;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            K(i, j) = eta * std::exp(-(X.row(i) - X.row(j)).squaredNorm() * inv2l);
            K(j, i) = K(i, j);
        }
    }
    return K;
}

std::optional<Factor> try_factor(const Mat& K, double noise_var, double eta) {
    for (double rel = kBaseJitter; rel <= kMaxJitter * 1.0000001; rel *= 10.0) {
        const double jitter = rel * eta;
        Mat A = K;
        A.diagonal().array() += noise_var + jitter;
        Eigen::LLT<Mat> llt(A);
        if (llt.info() != Eigen::Success) continue;
        Mat L = llt.matrixL();
        if (!L.allFinite() || (L.diagonal().array() <= 0.0).any()) continue;
        return Factor{std::move(L), jitter};
    }
    return std::nullopt;
}

Factor factor_or_throw(const Mat& K, double noise_var, double eta, const std::string& what) {
    auto f = try_factor(K, noise_var, eta);
    if (!f) throw IllConditionedError(what + ": Gram matrix not positive definite after jitter escalation");
    return std::move(*f);
}

void reject_duplicates(const Mat& X, const KernelParams& p, const std::string& what) {
    const double tol2 = 1e-18 * p.length();
    std::ostringstream bad;
    int count = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = i + 1; j < X.rows(); ++j)
            if ((X.row(i) - X.row(j)).squaredNorm() <= tol2) {
                if (count++ < 8) bad << " (" << i << ", " << j << ")";
            }
    if (count > 0)
        throw IllConditionedError(what + ": duplicate locations in noise-free data at index pairs" + bad.str());
}

std::vector<Functional> query_functionals(ObservationKind kind, int d) {
    std::vector<Functional> q;
    if (kind == ObservationKind::energy) {
        for (int i = 0; i < d; ++i) q.push_back(energy_force(i));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) q.push_back(energy_jacobian(i, j));
    } else {
        q.push_back(Functional::value());
        for (int j = 0; j < d; ++j) q.push_back(Functional::slope(j));
    }
    return q;
}

Mat cross_covariance(const Mat& X, const Vec& z, const std::vector<Functional>& q, const KernelParams& p) {
    Mat C(X.rows(), static_cast<Eigen::Index>(q.size()));
    const auto u = Functional::value();
    for (Eigen::Index n = 0; n < X.rows(); ++n) {
        const Vec xn = X.row(n).transpose();
        for (std::size_t f = 0; f < q.size(); ++f)
            C(n, static_cast<Eigen::Index>(f)) = functional_covariance(xn, u, z, q[f], p);
    }
    return C;
}

DerivVariance assemble_variance(ObservationKind kind, int d, const Vec& z, const Mat& V,
                                const std::vector<Functional>& q, const KernelParams& p) {
    auto cov = [&](int a, int b) {
        double prior = functional_covariance(z, q[a], z, q[b], p);
        if (V.rows() > 0) prior -= V.col(a).dot(V.col(b));
        return prior;
    };
    DerivVariance out{Vec(d), Mat(d, d), Mat::Zero(d, d)};
    if (kind == ObservationKind::energy) {
        for (int i = 0; i < d; ++i) {
            out.var_b[i] = std::max(0.0, cov(i, i));
            for (int j = 0; j < d; ++j) {
                const int ij = d + i * d + j;
                out.var_J(i, j) = std::max(0.0, cov(ij, ij));
                out.cov_bJ(i, j) = cov(i, d + j * d + i);
            }
        }
    } else {
        const double var_value = std::max(0.0, cov(0, 0));
        out.var_b.setConstant(var_value);
        for (int j = 0; j < d; ++j) {
            const double var_slope = std::max(0.0, cov(1 + j, 1 + j));
            out.var_J.col(j).setConstant(var_slope);
            out.cov_bJ(j, j) = cov(0, 1 + j);
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------- GprModel

namespace {

void check_query(const Vec& x, int d, const char* where) {
    if (x.size() != d) throw InputError(std::string(where) + ": query dimension mismatch");
    if (!x.allFinite()) throw InputError(std::string(where) + ": non-finite query");
}

Vec label_offset(const Dataset& data, const Mat& Y) {
    Vec offset = Vec::Zero(Y.cols());
    if (data.kind() == ObservationKind::energy && Y.rows() > 0) offset[0] = Y.col(0).mean();
    return offset;
}

}  // namespace

GprModel fit(const Dataset& data, const KernelParams& params) {
    if (data.empty()) throw InputError("fit: empty dataset");
    GprModel model(data, params);
    model.locations_ = data.location_matrix();
    if (params.noise_var() == 0.0) detail::reject_duplicates(model.locations_, params, "fit");
    const Mat Y = data.label_matrix();
    model.offset_ = label_offset(data, Y);
    const Mat Yc = Y.rowwise() - model.offset_.transpose();

    auto factor = detail::factor_or_throw(detail::value_gram(model.locations_, params), params.noise_var(),
                                          params.eta(), "fit");
    model.factor_ = std::move(factor.L);
    model.jitter_ = factor.jitter;
    const auto L = model.factor_.triangularView<Eigen::Lower>();
    model.whitened_ = L.solve(Yc);
    model.weights_ = model.factor_.transpose().triangularView<Eigen::Upper>().solve(model.whitened_);
    return model;
}

Vec GprModel::predict_mean(const Vec& x) const {
    check_query(x, dim(), "predict_mean");
    const Mat k = detail::cross_covariance(locations_, x, {Functional::value()}, params_);
    return (k.transpose() * weights_).transpose() + offset_;
}

DerivPosterior GprModel::predict_derivatives(const Vec& x) const {
    check_query(x, dim(), "predict_derivatives");
    const int d = dim();
    const auto q = detail::query_functionals(kind(), d);
    const Mat C = detail::cross_covariance(locations_, x, q, params_);
    const Mat V = factor_.triangularView<Eigen::Lower>().solve(C);
    DerivPosterior post;
    static_cast<DerivVariance&>(post) = detail::assemble_variance(kind(), d, x, V, q, params_);

    const Mat M = C.transpose() * weights_;  // |q| x label_size
    post.mu_b.resize(d);
    post.mu_J.resize(d, d);
    if (kind() == ObservationKind::energy) {
        post.mu_b = M.col(0).head(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) post.mu_J(i, j) = M(d + i * d + j, 0);
        post.mu_J = 0.5 * (post.mu_J + post.mu_J.transpose()).eval();
    } else {
        for (int c = 0; c < d; ++c) {
            post.mu_b[c] = M(0, c) + offset_[c];
            for (int j = 0; j < d; ++j) post.mu_J(c, j) = M(1 + j, c);
        }
    }
    return post;
}

// ---------------------------------------------------------------- likelihood

double log_marginal_likelihood(const Dataset& data, const KernelParams& params) {
    if (data.empty()) throw InputError("log_marginal_likelihood: empty dataset");
    const Mat X = data.location_matrix();
    const Mat Y = data.label_matrix();
    const Mat Yc = Y.rowwise() - label_offset(data, Y).transpose();
    auto factor = detail::try_factor(detail::value_gram(X, params), params.noise_var(), params.eta());
    if (!factor) return -std::numeric_limits<double>::infinity();
    const Mat W = factor->L.triangularView<Eigen::Lower>().solve(Yc);
    const double n = static_cast<double>(X.rows());
    const double m = static_cast<double>(Y.cols());
    const double log_det = 2.0 * factor->L.diagonal().array().log().sum();
    const double value = -0.5 * W.squaredNorm() - 0.5 * m * log_det - 0.5 * m * n * std::log(2.0 * std::numbers::pi);
    return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
}

namespace {

constexpr double kLogEtaBounds[2] = {-12.0, 12.0};
constexpr double kLogLengthBounds[2] = {-6.0, 6.0};
constexpr double kLogNoiseBounds[2] = {-16.0, 4.0};

struct MleProblem {
    const Dataset* data;
    bool noise_free;
};

KernelParams params_from(const gsl_vector* v, bool noise_free, double* penalty) {
    auto clamp = [&](double value, const double (&b)[2]) {
        const double c = std::clamp(value, b[0], b[1]);
        *penalty += (value - c) * (value - c);
        return c;
    };
    *penalty = 0.0;
    const double le = clamp(gsl_vector_get(v, 0), kLogEtaBounds);
    const double ll = clamp(gsl_vector_get(v, 1), kLogLengthBounds);
    const double ln = noise_free ? -std::numeric_limits<double>::infinity() : clamp(gsl_vector_get(v, 2), kLogNoiseBounds);
    return KernelParams::from_log(le, ll, ln);
}

double negative_lml(const gsl_vector* v, void* raw) {
    const auto* problem = static_cast<const MleProblem*>(raw);
    double penalty = 0.0;
    const KernelParams p = params_from(v, problem->noise_free, &penalty);
    const double lml = log_marginal_likelihood(*problem->data, p);
    if (!std::isfinite(lml)) return 1e300;
    return -lml + 1e3 * penalty;
}

}  // namespace

MleResult optimize_hyperparams(const Dataset& data, const KernelParams& init, const MleOptions& options) {
    const double init_lml = data.empty() ? -std::numeric_limits<double>::infinity()
                                         : log_marginal_likelihood(data, init);
    MleResult best{init, init_lml, false};
    if (options.budget <= 0) return best;
    if (data.size() < 3) throw InputError("optimize_hyperparams: need at least 3 observations");

    const std::size_t dims = options.noise_free ? 2 : 3;
    MleProblem problem{&data, options.noise_free};
    gsl_multimin_function fn{&negative_lml, dims, &problem};

    const double init_noise = std::isfinite(init.log_noise_var()) ? init.log_noise_var() : -6.0;
    const Vec origin = (Vec(3) << std::clamp(init.log_eta(), kLogEtaBounds[0], kLogEtaBounds[1]),
                        std::clamp(init.log_length(), kLogLengthBounds[0], kLogLengthBounds[1]),
                        std::clamp(init_noise, kLogNoiseBounds[0], kLogNoiseBounds[1]))
                           .finished();
    Rng rng(derive_seed(options.seed, "mle-starts"));

    gsl_error_handler_t* old_handler = gsl_set_error_handler_off();
    gsl_multimin_fminimizer* minimizer = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dims);
    gsl_vector* start = gsl_vector_alloc(dims);
    gsl_vector* step = gsl_vector_alloc(dims);
    bool improved_any = false;
    for (int s = 0; s < std::max(1, options.starts); ++s) {
        const Vec offset = s == 0 ? Vec::Zero(3) : standard_normal(rng, 3);
        for (std::size_t k = 0; k < dims; ++k) {
            gsl_vector_set(start, k, origin[static_cast<Eigen::Index>(k)] + offset[static_cast<Eigen::Index>(k)]);
            gsl_vector_set(step, k, 0.5);
        }
        if (gsl_multimin_fminimizer_set(minimizer, &fn, start, step) != GSL_SUCCESS) continue;
        for (int it = 0; it < options.budget; ++it) {
            if (gsl_multimin_fminimizer_iterate(minimizer) != GSL_SUCCESS) break;
            if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer), 1e-5) == GSL_SUCCESS) break;
        }
        double penalty = 0.0;
        const KernelParams candidate = params_from(gsl_multimin_fminimizer_x(minimizer), options.noise_free, &penalty);
        const double lml = log_marginal_likelihood(data, candidate);
        if (std::isfinite(lml) && lml > best.log_likelihood) {
            best = {candidate, lml, false};
            improved_any = true;
        }
    }
    gsl_vector_free(step);
    gsl_vector_free(start);
    gsl_multimin_fminimizer_free(minimizer);
    gsl_set_error_handler(old_handler);

    if (!improved_any && !std::isfinite(init_lml)) best.fell_back = true;
    return best;
}

// ---------------------------------------------------------------- fast variance

BatchVariance::BatchVariance(const KernelParams& params, const Mat& design, ObservationKind kind)
    : params_(params), design_(design), kind_(kind) {
    if (design.rows() == 0) throw InputError("BatchVariance: empty design batch");
    if (!design.allFinite()) throw InputError("BatchVariance: non-finite design point");
    factor_ = detail::factor_or_throw(detail::value_gram(design_, params_), params_.noise_var(), params_.eta(),
                                      "BatchVariance")
                  .L;
}

DerivVariance BatchVariance::at(const Vec& z) const {
    const int d = static_cast<int>(design_.cols());
    check_query(z, d, "BatchVariance::at");
    const auto q = detail::query_functionals(kind_, d);
    const Mat C = detail::cross_covariance(design_, z, q, params_);
    const Mat V = factor_.triangularView<Eigen::Lower>().solve(C);
    return detail::assemble_variance(kind_, d, z, V, q, params_);
}

DerivVariance fast_posterior_variance(const KernelParams& params, const Mat& design, const Vec& z,
                                      ObservationKind kind) {
    return BatchVariance(params, design, kind).at(z);
}

}  // namespace gpgad
