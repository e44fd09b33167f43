#include "gpgad/design.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "gpgad/field_sampler.hpp"
#include "gpgad/gad.hpp"
#include "gpgad/rng.hpp"

namespace gpgad {

double SpsaParams::step_gain(int j) const { return a / std::pow(A + j + 1.0, alpha); }
double SpsaParams::perturbation_gain(int j) const { return c / std::pow(j + 1.0, gamma); }

void SpsaParams::validate() const {
    if (!(a > 0.0) || !(A >= 0.0) || !(alpha > 0.0) || !(c > 0.0) || !(gamma > 0.0))
        throw InputError("SpsaParams: gains must be positive");
    if (iters < 0) throw InputError("SpsaParams: iters must be >= 0");
}

int ActiveLearningConfig::horizon_steps() const {
    return std::max(1, static_cast<int>(std::lround(horizon_T / design_dt)));
}

void ActiveLearningConfig::validate() const {
    if (n0 < 3) throw InputError("ActiveLearningConfig: N0 must be >= 3");
    if (n_design < 1) throw InputError("ActiveLearningConfig: N_D must be >= 1");
    if (!(sigma_sur > 0.0)) throw InputError("ActiveLearningConfig: sigma_sur must be positive");
    if (n_paths < 1) throw InputError("ActiveLearningConfig: n_paths must be >= 1");
    if (!(horizon_T > 0.0) || !(design_dt > 0.0)) throw InputError("ActiveLearningConfig: horizon_T and design_dt must be positive");
    if (!(init_spread > 0.0)) throw InputError("ActiveLearningConfig: init_spread must be positive");
    if (!(noise_var >= 0.0)) throw InputError("ActiveLearningConfig: noise_var must be nonnegative");
    if (mle_budget < 0 || mle_starts < 1) throw InputError("ActiveLearningConfig: bad MLE settings");
    if (max_cost < 0) throw InputError("ActiveLearningConfig: max_cost must be >= 0");
    spsa.validate();
}

// ---------------------------------------------------------------- (alpha, beta)

LinCoeffs fit_lin_coeffs(const Vec& x_t, const Vec& x_t1, const Vec& x_t2, const Vec& mu_b_t1, const Vec& mu_b_t2,
                         const Mat& mu_J_t1, const Mat& mu_J_t2, double dt) {
    const auto d = x_t.size();
    if (x_t1.size() != d || x_t2.size() != d || mu_b_t1.size() != d || mu_b_t2.size() != d ||
        mu_J_t1.rows() != d || mu_J_t1.cols() != d || mu_J_t2.rows() != d || mu_J_t2.cols() != d)
        throw InputError("fit_lin_coeffs: dimension mismatch");
    if (!(dt > 0.0)) throw InputError("fit_lin_coeffs: dt must be positive");

    Mat A(2 * d, d + 1);
    Vec rhs(2 * d);
    A.block(0, 0, d, 1) = mu_b_t1;
    A.block(0, 1, d, d) = mu_J_t1.transpose();
    A.block(d, 0, d, 1) = mu_b_t2;
    A.block(d, 1, d, d) = mu_J_t2.transpose();
    rhs.head(d) = (x_t - x_t1) / dt;
    rhs.tail(d) = (x_t1 - x_t2) / dt;
    if (!A.allFinite() || !rhs.allFinite()) return LinCoeffs::pure_force(static_cast<int>(d));

    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    if (s[0] <= 0.0 || s[s.size() - 1] <= 1e-10 * s[0]) return LinCoeffs::pure_force(static_cast<int>(d));
    const Vec theta = svd.solve(rhs);
    return {theta[0], theta.tail(d), false};
}

// ---------------------------------------------------------------- prior paths

PriorPathSet sample_prior_paths(const GprModel& model, const Vec& x, const Vec& v, int n, int K, double dt,
                                std::uint64_t seed) {
    if (n < 1 || K < 1) throw InputError("sample_prior_paths: n and K must be >= 1");
    if (x.size() != model.dim() || v.size() != model.dim()) throw InputError("sample_prior_paths: dimension mismatch");
    PriorPathSet set;
    set.paths.reserve(static_cast<std::size_t>(n));
    bool any_moved = K == 1;
    for (int p = 0; p < n; ++p) {
        FieldSampler field(model, derive_seed(seed, static_cast<std::uint64_t>(p)));
        std::vector<Vec> path{x};
        GadState state{x, v.normalized(), 0};
        for (int k = 1; k < K; ++k) {
            try {
                const FieldValue f = field.evaluate(state.x);
                state = gad_step(state, f.b, f.J, dt);
            } catch (const DivergenceError&) {
                break;
            } catch (const IllConditionedError&) {
                break;
            }
            path.push_back(state.x);
        }
        any_moved = any_moved || path.size() > 1;
        set.paths.push_back(std::move(path));
    }
    if (!any_moved) throw DivergenceError("sample_prior_paths: every sampled path diverged at the first step");
    return set;
}

// ---------------------------------------------------------------- utility

double utility_u1(const DesignBatch& design, const PriorPathSet& paths, const LinCoeffs& coeffs,
                  const KernelParams& params, double dt, ObservationKind kind) {
    if (paths.paths.empty()) throw InputError("utility_u1: empty path set");
    const auto d = design.dim();
    if (coeffs.beta.size() != d) throw InputError("utility_u1: coefficient dimension mismatch");
    const BatchVariance batch(params, design.points, kind);
    const double log_2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
    const double dt2 = dt * dt;
    const double alpha = coeffs.alpha;
    const Vec& beta = coeffs.beta;

    std::size_t horizon = 0;
    for (const auto& path : paths.paths) horizon = std::max(horizon, path.size());

    double total = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        double sum = 0.0;
        int count = 0;
        for (const auto& path : paths.paths) {
            if (k >= path.size()) continue;
            const DerivVariance var = batch.at(path[k]);
            double log_det = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                double s = alpha * alpha * var.var_b[i];
                for (Eigen::Index j = 0; j < d; ++j)
                    s += beta[j] * beta[j] * var.var_J(j, i) + 2.0 * alpha * beta[j] * var.cov_bJ(i, j);
                log_det += std::log(std::max(dt2 * s, 1e-12));
            }
            sum += 0.5 * (static_cast<double>(d) * log_2pie + log_det);
            ++count;
        }
        total += sum / count;
    }
    return -total;
}

// ---------------------------------------------------------------- SPSA

DesignBatch spsa_maximize(const BatchObjective& objective, const DesignBatch& start, const SpsaParams& params) {
    params.validate();
    Rng rng(params.seed);
    std::bernoulli_distribution coin(0.5);

    DesignBatch current = start;
    DesignBatch best = start;
    double best_value = objective(start);
    if (!std::isfinite(best_value)) best_value = -std::numeric_limits<double>::infinity();

    Mat delta(start.points.rows(), start.points.cols());
    for (int j = 0; j < params.iters; ++j) {
        const double cj = params.perturbation_gain(j);
        const double aj = params.step_gain(j);
        for (Eigen::Index k = 0; k < delta.size(); ++k) delta.data()[k] = coin(rng) ? 1.0 : -1.0;

        const double up = objective({current.points + cj * delta});
        const double down = objective({current.points - cj * delta});
        if (!std::isfinite(up) || !std::isfinite(down)) continue;
        // Delta entries are +/-1, so the elementwise inverse equals Delta.
        current.points += aj * (up - down) / (2.0 * cj) * delta;

        const double value = objective(current);
        if (std::isfinite(value) && value > best_value) {
            best_value = value;
            best = current;
        }
    }
    return best;
}

// ---------------------------------------------------------------- reliability

Reliability reliability_check(const DerivVariance& var, const LinCoeffs& coeffs, double sigma_sur) {
    const auto d = var.var_b.size();
    if (coeffs.beta.size() != d || var.var_J.rows() != d || var.var_J.cols() != d)
        throw InputError("reliability_check: dimension mismatch");
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        double r = coeffs.alpha * var.var_b[i];
        for (Eigen::Index j = 0; j < d; ++j) r += coeffs.beta[j] * var.var_J(j, i);
        worst = std::max(worst, std::abs(r));
    }
    return worst >= sigma_sur ? Reliability::unreliable : Reliability::reliable;
}

// ---------------------------------------------------------------- Algorithm 2

DesignBatch propose_design(const GprModel& model, const Vec& x, const Vec& v, const LinCoeffs& coeffs,
                           const ActiveLearningConfig& al, std::uint64_t seed) {
    al.validate();
    const int d = model.dim();
    const PriorPathSet paths =
        sample_prior_paths(model, x, v, al.n_paths, al.horizon_steps(), al.design_dt, derive_seed(seed, "paths"));

    Rng init_rng(derive_seed(seed, "design-init"));
    const double spread = 0.5 * std::sqrt(model.params().length());
    DesignBatch start{Mat(al.n_design, d)};
    for (int r = 0; r < al.n_design; ++r) start.points.row(r) = (x + spread * standard_normal(init_rng, d)).transpose();

    const KernelParams params = model.params();
    const ObservationKind kind = model.kind();
    const BatchObjective objective = [&](const DesignBatch& batch) {
        try {
            return utility_u1(batch, paths, coeffs, params, al.design_dt, kind);
        } catch (const IllConditionedError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    SpsaParams spsa = al.spsa;
    spsa.seed = derive_seed(seed, "spsa");
    return spsa_maximize(objective, start, spsa);
}

}  // namespace gpgad
