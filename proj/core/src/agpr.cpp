// Surrogate-driven GAD with active learning (the outer loop).

#include <optional>

#include "gpgad/design.hpp"
#include "gpgad/gad.hpp"
#include "gpgad/gpr.hpp"
#include "gpgad/problems.hpp"
#include "gpgad/rng.hpp"

namespace gpgad {

namespace {

KernelParams initial_params(const Dataset& data, bool noise_free) {
    const Mat Y = data.label_matrix();
    const Mat centered = Y.rowwise() - Y.colwise().mean();
    const double var = centered.squaredNorm() / std::max<double>(1.0, static_cast<double>(Y.size()));
    const double eta = std::max(var, 1e-6);
    return KernelParams(eta, 1.0, noise_free ? 0.0 : 1e-2 * eta);
}

class ActiveLearner {
public:
    ActiveLearner(const Problem& problem, const ActiveLearningConfig& al, std::uint64_t seed)
        : problem_(problem),
          al_(al),
          seed_(seed),
          noise_rng_(derive_seed(seed, "noise")),
          data_(problem.kind(), problem.dim()) {}

    void initialize(const Vec& center, GadResult& result) {
        Rng init_rng(derive_seed(seed_, "init-data"));
        DesignRecord record{0, 0, Mat(al_.n0, problem_.dim()), Mat(al_.n0, data_.label_size())};
        const double spread = std::sqrt(al_.init_spread);
        for (int i = 0; i < al_.n0; ++i) {
            const Vec x = center + spread * standard_normal(init_rng, problem_.dim());
            const Vec y = observe(problem_, x, al_.noise_var, noise_rng_);
            data_.add(x, y);
            record.points.row(i) = x.transpose();
            record.labels.row(i) = y.transpose();
        }
        const Mat X = record.points;
        diameter_ = (X.colwise().maxCoeff() - X.colwise().minCoeff()).norm();
        result.designs.push_back(std::move(record));
        retrain(initial_params(data_, noise_free()), 0);
    }

    void update(const Vec& x, const Vec& v, const LinCoeffs& coeffs, long step, GadResult& result) {
        const int index = result.updates + 1;
        const DesignBatch batch = propose_design(*model_, x, v, coeffs, al_, derive_seed(derive_seed(seed_, "design"), index));
        DesignRecord record{index, step, batch.points, Mat(batch.size(), data_.label_size())};
        for (Eigen::Index r = 0; r < batch.size(); ++r) {
            const Vec point = batch.points.row(r).transpose();
            const Vec y = observe(problem_, point, al_.noise_var, noise_rng_);
            data_.add(point, y);
            record.labels.row(r) = y.transpose();
        }
        result.designs.push_back(std::move(record));
        result.updates = index;
        retrain(model_->params(), index);
    }

    bool can_afford_update() const {
        return al_.max_cost == 0 || data_.eval_count() + al_.n_design <= al_.max_cost;
    }

    const GprModel& model() const { return *model_; }
    const Dataset& data() const { return data_; }
    double diameter() const { return diameter_; }

private:
    bool noise_free() const { return al_.noise_var == 0.0; }

    void retrain(const KernelParams& init, int index) {
        MleOptions opts;
        opts.budget = al_.mle_budget;
        opts.starts = al_.mle_starts;
        opts.noise_free = noise_free();
        opts.seed = derive_seed(derive_seed(seed_, "mle"), static_cast<std::uint64_t>(index));
        const MleResult mle = optimize_hyperparams(data_, init, opts);
        model_.emplace(fit(data_, mle.params));
    }

    const Problem& problem_;
    const ActiveLearningConfig& al_;
    std::uint64_t seed_;
    Rng noise_rng_;
    Dataset data_;
    std::optional<GprModel> model_;
    double diameter_ = 0.0;
};

// Three most recent positions and the surrogate means that drove the step out of each.
struct History {
    std::vector<Vec> x;
    std::vector<DerivPosterior> post;

    void push(const Vec& xi, const DerivPosterior& p) {
        x.push_back(xi);
        post.push_back(p);
        if (x.size() > 3) {
            x.erase(x.begin());
            post.erase(post.begin());
        }
    }

    LinCoeffs coeffs(double dt) const {
        const int d = static_cast<int>(x.back().size());
        if (x.size() < 3) return LinCoeffs::pure_force(d);
        return fit_lin_coeffs(x[2], x[1], x[0], post[1].mu_b, post[0].mu_b, post[1].mu_J, post[0].mu_J, dt);
    }
};

}  // namespace

GadResult run_agpr_gad(const Problem& problem, const GadState& start, const GadConfig& cfg,
                       const ActiveLearningConfig& al, std::uint64_t seed) {
    cfg.validate();
    al.validate();
    if (start.x.size() != problem.dim() || start.v.size() != problem.dim())
        throw InputError("run_agpr_gad: start state dimension mismatch");

    GadResult result;
    ActiveLearner learner(problem, al, seed);
    learner.initialize(start.x, result);
    const double guard = 10.0 * learner.diameter();

    GadState state = start;
    state.v = start.v.normalized();
    result.trajectory.push_back(state);
    DerivPosterior post = learner.model().predict_derivatives(state.x);
    History history;
    history.push(state.x, post);

    bool forced_pending = false;
    for (long t = 1; t <= cfg.t_max; ++t) {
        std::optional<GadState> next;
        try {
            next = gad_step(state, post.mu_b, post.mu_J, cfg.dt);
            if ((next->x - start.x).norm() > guard) next.reset();
        } catch (const GadDivergenceError&) {
            next.reset();
        }
        if (!next) {
            if (forced_pending) {
                result.stop_reason = "surrogate diverged after a forced update";
                break;
            }
            if (!learner.can_afford_update()) {
                result.stop_reason = "surrogate diverged and the evaluation budget is exhausted";
                break;
            }
            learner.update(state.x, state.v, history.coeffs(cfg.dt), state.step, result);
            post = learner.model().predict_derivatives(state.x);
            history.post.back() = post;
            forced_pending = true;
            continue;
        }
        forced_pending = false;
        result.trajectory.push_back(*next);
        if (check_convergence(state, *next, cfg.tol)) {
            state = *next;
            result.converged = true;
            result.stop_reason = "converged";
            break;
        }
        state = *next;
        post = learner.model().predict_derivatives(state.x);
        history.push(state.x, post);
        const LinCoeffs coeffs = history.coeffs(cfg.dt);
        if (reliability_check(post, coeffs, al.sigma_sur) == Reliability::unreliable) {
            if (!learner.can_afford_update()) {
                result.stop_reason = "evaluation budget exhausted";
                break;
            }
            learner.update(state.x, state.v, coeffs, state.step, result);
            post = learner.model().predict_derivatives(state.x);
            history.post.back() = post;
        }
    }
    if (result.stop_reason.empty()) result.stop_reason = "t_max reached";
    result.x_sp = state.x;
    result.cost = learner.data().eval_count();
    return result;
}

}  // namespace gpgad
