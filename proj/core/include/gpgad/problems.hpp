#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpgad/rng.hpp"
#include "gpgad/types.hpp"

namespace gpgad {

using Evaluator = std::function<Vec(const Vec&)>;
using DerivativeFn = std::function<FieldValue(const Vec&)>;

struct Box {
    Vec lower;
    Vec upper;
};

/// A true model: an energy u (labels are 1-vectors) or a force field b.
///
/// The evaluation counter is the only mutable state and may be bumped from
/// concurrent observers.
class Problem {
public:
    Problem(std::string name, ObservationKind kind, int dim, Box domain, Evaluator evaluator,
            std::optional<DerivativeFn> analytic_derivatives = std::nullopt);
    Problem(const Problem& other);
    Problem& operator=(const Problem& other);

    const std::string& name() const { return name_; }
    ObservationKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Box& domain() const { return domain_; }

    /// Exact model value; does not touch the evaluation counter.
    Vec evaluate(const Vec& x) const;
    bool has_analytic_derivatives() const { return analytic_.has_value(); }
    /// Exact (b, J); throws InputError when the problem has none.
    FieldValue analytic_derivatives(const Vec& x) const;

    long eval_count() const { return evals_.load(); }
    void count_evaluation() const { evals_.fetch_add(1); }
    void reset_eval_count() { evals_.store(0); }

private:
    std::string name_;
    ObservationKind kind_;
    int dim_;
    Box domain_;
    Evaluator evaluator_;
    std::optional<DerivativeFn> analytic_;
    mutable std::atomic<long> evals_{0};
};

// u(x) = 1/2 x^T M x - 5 sum_i atan(x_i - 5), M = [[0.8, -0.2], [-0.2, 0.5]]
double example1_energy(const Vec& x);
Vec example1_force(const Vec& x);     // b = -grad u
Mat example1_jacobian(const Vec& x);  // J = -hess u

// b_i = -sum_j A_ij x_j + 5 / (1 + (x_i - 5)^2), A = [[0.8, -0.3], [-0.2, 0.5]].
// No factor 1/2 on the linear term: with it the field has a single fixed point,
// without it the stable points (0.59, 0.76), (5.87, 6.25) and saddle (1.79, 3.30).
Vec example2_force(const Vec& x);

/// Energy benchmark on [-1, 7]^2 with analytic derivatives.
Problem make_example1();
/// Non-gradient force benchmark on [-1, 8]^2; derivatives by finite differences only.
Problem make_example2();
/// "example1" or "example2"; throws InputError otherwise.
Problem make_problem(std::string_view name);

/// True value plus i.i.d. N(0, noise_var) per component. Counts one evaluation.
Vec observe(const Problem& problem, const Vec& x, double noise_var, Rng& rng);

/// b from one observation at x and J from central differences of observed
/// forces with step 1e-4 * max(1, |x_j|). Costs 1 + 2d evaluations.
/// Energy problems return their analytic derivatives (one evaluation).
FieldValue observed_derivatives(const Problem& problem, const Vec& x, double noise_var, Rng& rng);

struct CriticalPoint {
    Vec x;
    int index = 0;  // number of unstable directions (eigenvalues of J with positive real part)
};

/// Newton iterations on b(x) = 0 seeded from a uniform grid of
/// grid_resolution points per axis over the problem domain. Roots are
/// deduplicated at 1e-4 and sorted lexicographically.
std::vector<CriticalPoint> oracle_critical_points(const Problem& problem, int grid_resolution);

}  // namespace gpgad
