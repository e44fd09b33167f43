#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpgad/types.hpp"

namespace gpgad {

class Problem;
struct ActiveLearningConfig;

/// Position and unit direction of the simplified gentlest ascent dynamics.
struct GadState {
    Vec x;
    Vec v;
    long step = 0;
};

struct GadConfig {
    double dt = 0.01;
    double tol = 1e-6;
    long t_max = 20000;

    void validate() const;
};

/// A batch of labelled points added to the surrogate. Update 0 is the initial data.
struct DesignRecord {
    int update = 0;
    long step = 0;
    Mat points;  // N x d
    Mat labels;  // N x label size
};

struct GadResult {
    Vec x_sp;
    std::vector<GadState> trajectory;  // includes the start state
    bool converged = false;
    long cost = 0;
    int updates = 0;
    std::vector<DesignRecord> designs;
    std::string stop_reason;
};

class GadDivergenceError : public DivergenceError {
public:
    GadDivergenceError(const std::string& what, std::vector<GadState> trajectory)
        : DivergenceError(what), trajectory_(std::move(trajectory)) {}
    const std::vector<GadState>& trajectory() const { return trajectory_; }

private:
    std::vector<GadState> trajectory_;
};

/// One forward-Euler step:
///   x' = x + dt (b - 2 <b, v> v / |v|^2)
///   v' = v + dt (J v - <v, J v> v), then v' is renormalized.
/// Throws GadDivergenceError (carrying the input state) on a non-finite result.
GadState gad_step(const GadState& state, const Vec& b, const Mat& J, double dt);

/// |x_curr - x_prev| + |v_curr - v_prev| < tol.
bool check_convergence(const GadState& prev, const GadState& curr, double tol);

/// Normalized all-ones vector under a seeded random rotation.
Vec default_direction(int dim, std::uint64_t seed);

using DerivativeProvider = std::function<FieldValue(const Vec&)>;

/// Plain GAD driven by a true-derivative source. cost = number of provider calls.
GadResult run_reference_gad(const DerivativeProvider& provider, const GadState& start, const GadConfig& cfg);

/// Surrogate GAD with active learning. cost = true-model evaluations = N0 + updates * N_D.
GadResult run_agpr_gad(const Problem& problem, const GadState& start, const GadConfig& cfg,
                       const ActiveLearningConfig& al, std::uint64_t seed);

}  // namespace gpgad
