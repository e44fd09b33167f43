#include "gpgad/problems.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace gpgad {

Problem::Problem(std::string name, ObservationKind kind, int dim, Box domain, Evaluator evaluator,
                 std::optional<DerivativeFn> analytic_derivatives)
    : name_(std::move(name)),
      kind_(kind),
      dim_(dim),
      domain_(std::move(domain)),
      evaluator_(std::move(evaluator)),
      analytic_(std::move(analytic_derivatives)) {
    if (dim < 1) throw InputError("Problem: dimension must be >= 1");
    if (domain_.lower.size() != dim || domain_.upper.size() != dim)
        throw InputError("Problem: domain dimension mismatch");
    if ((domain_.upper.array() <= domain_.lower.array()).any()) throw InputError("Problem: empty domain");
    if (!evaluator_) throw InputError("Problem: missing evaluator");
}

Problem::Problem(const Problem& other)
    : name_(other.name_),
      kind_(other.kind_),
      dim_(other.dim_),
      domain_(other.domain_),
      evaluator_(other.evaluator_),
      analytic_(other.analytic_),
      evals_(other.evals_.load()) {}

Problem& Problem::operator=(const Problem& other) {
    if (this != &other) {
        name_ = other.name_;
        kind_ = other.kind_;
        dim_ = other.dim_;
        domain_ = other.domain_;
        evaluator_ = other.evaluator_;
        analytic_ = other.analytic_;
        evals_.store(other.evals_.load());
    }
    return *this;
}

Vec Problem::evaluate(const Vec& x) const {
    if (x.size() != dim_) throw InputError("Problem::evaluate: dimension mismatch");
    if (!x.allFinite()) throw InputError("Problem::evaluate: non-finite point");
    return evaluator_(x);
}

FieldValue Problem::analytic_derivatives(const Vec& x) const {
    if (!analytic_) throw InputError("Problem '" + name_ + "' has no analytic derivatives");
    if (x.size() != dim_) throw InputError("Problem::analytic_derivatives: dimension mismatch");
    return (*analytic_)(x);
}

// ---------------------------------------------------------------- benchmarks

namespace {

const Mat& example1_m() {
    static const Mat m = (Mat(2, 2) << 0.8, -0.2, -0.2, 0.5).finished();
    return m;
}

const Mat& example2_a() {
    static const Mat a = (Mat(2, 2) << 0.8, -0.3, -0.2, 0.5).finished();
    return a;
}

void check_2d(const Vec& x, const char* where) {
    if (x.size() != 2) throw InputError(std::string(where) + ": expects a point in R^2");
}

}  // namespace

double example1_energy(const Vec& x) {
    check_2d(x, "example1_energy");
    return 0.5 * x.dot(example1_m() * x) - 5.0 * (std::atan(x[0] - 5.0) + std::atan(x[1] - 5.0));
}

Vec example1_force(const Vec& x) {
    check_2d(x, "example1_force");
    Vec b = -example1_m() * x;
    for (int i = 0; i < 2; ++i) b[i] += 5.0 / (1.0 + (x[i] - 5.0) * (x[i] - 5.0));
    return b;
}

Mat example1_jacobian(const Vec& x) {
    check_2d(x, "example1_jacobian");
    Mat J = -example1_m();
    for (int i = 0; i < 2; ++i) {
        const double s = x[i] - 5.0;
        const double q = 1.0 + s * s;
        J(i, i) -= 10.0 * s / (q * q);
    }
    return J;
}

Vec example2_force(const Vec& x) {
    check_2d(x, "example2_force");
    Vec b = -(example2_a() * x);
    for (int i = 0; i < 2; ++i) b[i] += 5.0 / (1.0 + (x[i] - 5.0) * (x[i] - 5.0));
    return b;
}

Problem make_example1() {
    Box box{Vec::Constant(2, -1.0), Vec::Constant(2, 7.0)};
    return Problem("example1", ObservationKind::energy, 2, box,
                   [](const Vec& x) { return Vec::Constant(1, example1_energy(x)); },
                   DerivativeFn([](const Vec& x) { return FieldValue{example1_force(x), example1_jacobian(x)}; }));
}

Problem make_example2() {
    Box box{Vec::Constant(2, -1.0), Vec::Constant(2, 8.0)};
    return Problem("example2", ObservationKind::force, 2, box, [](const Vec& x) { return example2_force(x); });
}

Problem make_problem(std::string_view name) {
    if (name == "example1") return make_example1();
    if (name == "example2") return make_example2();
    throw InputError("unknown problem '" + std::string(name) + "' (expected example1 or example2)");
}

// ---------------------------------------------------------------- observation

Vec observe(const Problem& problem, const Vec& x, double noise_var, Rng& rng) {
    if (!(noise_var >= 0.0)) throw InputError("observe: noise_var must be nonnegative");
    Vec y = problem.evaluate(x);
    problem.count_evaluation();
    if (noise_var > 0.0) y += std::sqrt(noise_var) * standard_normal(rng, y.size());
    return y;
}

namespace {

Mat central_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double rel_step) {
    const auto d = x.size();
    Mat J(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double h = rel_step * std::max(1.0, std::abs(x[j]));
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

}  // namespace

FieldValue observed_derivatives(const Problem& problem, const Vec& x, double noise_var, Rng& rng) {
    if (problem.kind() == ObservationKind::energy) {
        problem.count_evaluation();
        return problem.analytic_derivatives(x);
    }
    FieldValue out;
    out.b = observe(problem, x, noise_var, rng);
    out.J = central_difference_jacobian([&](const Vec& p) { return observe(problem, p, noise_var, rng); }, x, 1e-4);
    return out;
}

// ---------------------------------------------------------------- oracle

namespace {

FieldValue exact_field(const Problem& problem, const Vec& x) {
    if (problem.has_analytic_derivatives()) return problem.analytic_derivatives(x);
    if (problem.kind() == ObservationKind::energy)
        throw InputError("oracle_critical_points: energy problem needs analytic derivatives");
    auto f = [&](const Vec& p) { return problem.evaluate(p); };
    return {f(x), central_difference_jacobian(f, x, 1e-6)};
}

int instability_index(const Mat& J) {
    const Eigen::VectorXcd ev = J.eigenvalues();
    return static_cast<int>((ev.real().array() > 0.0).count());
}

}  // namespace

std::vector<CriticalPoint> oracle_critical_points(const Problem& problem, int grid_resolution) {
    if (grid_resolution < 1) throw InputError("oracle_critical_points: grid_resolution must be >= 1");
    const int d = problem.dim();
    const Box& box = problem.domain();
    const Vec span = box.upper - box.lower;
    const double margin = 1e-6 * span.maxCoeff();

    long total = 1;
    for (int k = 0; k < d; ++k) total *= grid_resolution;

    std::vector<CriticalPoint> roots;
    for (long id = 0; id < total; ++id) {
        Vec x(d);
        long rest = id;
        for (int k = 0; k < d; ++k) {
            const long ik = rest % grid_resolution;
            rest /= grid_resolution;
            const double frac = grid_resolution == 1 ? 0.5 : static_cast<double>(ik) / (grid_resolution - 1);
            x[k] = box.lower[k] + frac * span[k];
        }
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
            const FieldValue f = exact_field(problem, x);
            if (!f.b.allFinite() || !f.J.allFinite()) break;
            if (f.b.norm() < 1e-11) {
                converged = true;
                break;
            }
            Eigen::FullPivLU<Mat> lu(f.J);
            if (!lu.isInvertible()) break;
            Vec step = lu.solve(f.b);
            const double cap = 0.25 * span.maxCoeff();
            if (step.norm() > cap) step *= cap / step.norm();
            x -= step;
            if (step.norm() < 1e-14) {
                converged = exact_field(problem, x).b.norm() < 1e-8;
                break;
            }
        }
        if (!converged) continue;
        if ((x.array() < box.lower.array() - margin).any() || (x.array() > box.upper.array() + margin).any()) continue;
        const bool seen = std::any_of(roots.begin(), roots.end(), [&](const CriticalPoint& r) { return (r.x - x).norm() < 1e-4; });
        if (!seen) roots.push_back({x, instability_index(exact_field(problem, x).J)});
    }
    std::sort(roots.begin(), roots.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
    });
    return roots;
}

}  // namespace gpgad
