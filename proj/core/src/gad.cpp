#include "gpgad/gad.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "gpgad/rng.hpp"

namespace gpgad {

void GadConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("GadConfig: dt must be positive");
    if (!(tol > 0.0) || !std::isfinite(tol)) throw InputError("GadConfig: tol must be positive");
    if (t_max < 1) throw InputError("GadConfig: t_max must be >= 1");
}

GadState gad_step(const GadState& state, const Vec& b, const Mat& J, double dt) {
    const auto d = state.x.size();
    if (state.v.size() != d || b.size() != d || J.rows() != d || J.cols() != d)
        throw InputError("gad_step: dimension mismatch");
    if (!b.allFinite() || !J.allFinite() || !state.x.allFinite() || !state.v.allFinite())
        throw GadDivergenceError("gad_step: non-finite input", {state});

    const Vec& v = state.v;
    const Vec Jv = J * v;
    GadState next;
    next.x = state.x + dt * (b - 2.0 * b.dot(v) / v.squaredNorm() * v);
    next.v = v + dt * (Jv - v.dot(Jv) * v);
    const double norm = next.v.norm();
    if (!next.x.allFinite() || !std::isfinite(norm) || norm == 0.0)
        throw GadDivergenceError("gad_step: non-finite update", {state});
    next.v /= norm;
    next.step = state.step + 1;
    return next;
}

bool check_convergence(const GadState& prev, const GadState& curr, double tol) {
    return (curr.x - prev.x).norm() + (curr.v - prev.v).norm() < tol;
}

Vec default_direction(int dim, std::uint64_t seed) {
    if (dim < 1) throw InputError("default_direction: dimension must be >= 1");
    const Vec ones = Vec::Ones(dim) / std::sqrt(static_cast<double>(dim));
    if (dim == 1) return ones;
    Rng rng(derive_seed(seed, "initial-direction"));
    if (dim == 2) {
        const double angle = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        const Mat rot = (Mat(2, 2) << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)).finished();
        return rot * ones;
    }
    Mat g(dim, dim);
    for (int c = 0; c < dim; ++c) g.col(c) = standard_normal(rng, dim);
    const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
    return (q * ones).normalized();
}

GadResult run_reference_gad(const DerivativeProvider& provider, const GadState& start, const GadConfig& cfg) {
    cfg.validate();
    if (start.x.size() != start.v.size() || start.x.size() == 0) throw InputError("run_reference_gad: bad start state");
    GadResult result;
    GadState state = start;
    state.v = start.v.normalized();
    result.trajectory.push_back(state);
    for (long t = 1; t <= cfg.t_max; ++t) {
        const FieldValue f = provider(state.x);
        ++result.cost;
        GadState next;
        try {
            next = gad_step(state, f.b, f.J, cfg.dt);
        } catch (const GadDivergenceError& e) {
            throw GadDivergenceError(e.what(), result.trajectory);
        }
        result.trajectory.push_back(next);
        const bool done = check_convergence(state, next, cfg.tol);
        state = next;
        if (done) {
            result.converged = true;
            result.stop_reason = "converged";
            break;
        }
    }
    if (!result.converged) result.stop_reason = "t_max reached";
    result.x_sp = state.x;
    return result;
}

}  // namespace gpgad
