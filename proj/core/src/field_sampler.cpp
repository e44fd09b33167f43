#include "gpgad/field_sampler.hpp"

#include "conditioning.hpp"

namespace gpgad {

namespace {

// Sampled functionals per point. ENERGY: b_i and the upper triangle of J
// (J is symmetric, sampling both halves would make the block singular).
// FORCE: value and slopes of one component GP.
std::vector<Functional> sampled_functionals(ObservationKind kind, int d) {
    if (kind == ObservationKind::force) return detail::query_functionals(kind, d);
    std::vector<Functional> q;
    for (int i = 0; i < d; ++i) q.push_back(energy_force(i));
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) q.push_back(energy_jacobian(i, j));
    return q;
}

}  // namespace

FieldSampler::FieldSampler(const GprModel& model, std::uint64_t seed)
    : model_(&model),
      rng_(seed),
      query_(sampled_functionals(model.kind(), model.dim())),
      factor_(model.gram_factor()),
      whitened_(model.whitened_labels()) {}

Mat FieldSampler::cross_with_history(const Vec& z, const std::vector<Functional>& q) const {
    const Mat& X = model_->locations();
    Mat C(factor_.rows(), static_cast<Eigen::Index>(q.size()));
    C.topRows(X.rows()) = detail::cross_covariance(X, z, q, model_->params());
    for (std::size_t e = 0; e < emitted_.size(); ++e)
        for (std::size_t f = 0; f < q.size(); ++f)
            C(X.rows() + static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(f)) =
                functional_covariance(emitted_[e].x, emitted_[e].f, z, q[f], model_->params());
    return C;
}

FieldValue FieldSampler::evaluate(const Vec& z) {
    const int d = model_->dim();
    if (z.size() != d) throw InputError("FieldSampler::evaluate: dimension mismatch");
    if (!z.allFinite()) throw InputError("FieldSampler::evaluate: non-finite point");
    for (const auto& [x, value] : cache_)
        if (x == z) return value;

    const auto& p = model_->params();
    const auto q = static_cast<Eigen::Index>(query_.size());
    const Mat C = cross_with_history(z, query_);
    const Mat W = factor_.triangularView<Eigen::Lower>().solve(C);  // m x q

    Mat P(q, q);
    for (Eigen::Index a = 0; a < q; ++a)
        for (Eigen::Index b = 0; b < q; ++b) P(a, b) = functional_covariance(z, query_[a], z, query_[b], p);
    const Mat S = P - W.transpose() * W;

    const auto block = detail::try_factor(S, 0.0, p.eta());
    if (!block) throw IllConditionedError("FieldSampler: conditional covariance not positive definite");

    const auto comps = whitened_.cols();
    const Mat xi = [&] {
        Mat out(q, comps);
        for (Eigen::Index c = 0; c < comps; ++c) out.col(c) = standard_normal(rng_, q);
        return out;
    }();
    Mat values = W.transpose() * whitened_ + block->L * xi;  // q x comps
    if (model_->kind() == ObservationKind::force) values.row(0) += model_->label_offset().transpose();

    // Grow the factorization: [[L, 0], [W^T, L22]].
    const auto m = factor_.rows();
    Mat grown = Mat::Zero(m + q, m + q);
    grown.topLeftCorner(m, m) = factor_;
    grown.bottomLeftCorner(q, m) = W.transpose();
    grown.bottomRightCorner(q, q) = block->L;
    factor_ = std::move(grown);
    Mat w(m + q, comps);
    w.topRows(m) = whitened_;
    w.bottomRows(q) = xi;
    whitened_ = std::move(w);
    for (const auto& f : query_) emitted_.push_back({z, f});

    FieldValue out{Vec(d), Mat(d, d)};
    if (model_->kind() == ObservationKind::energy) {
        out.b = values.col(0).head(d);
        Eigen::Index k = d;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j, ++k) out.J(i, j) = out.J(j, i) = values(k, 0);
    } else {
        for (int c = 0; c < d; ++c) {
            out.b[c] = values(0, c);
            for (int j = 0; j < d; ++j) out.J(c, j) = values(1 + j, c);
        }
    }
    cache_.emplace_back(z, out);
    return out;
}

}  // namespace gpgad
