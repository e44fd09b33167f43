#pragma once

#include <cstdint>
#include <vector>

#include "gpgad/gpr.hpp"
#include "gpgad/rng.hpp"

namespace gpgad {

/// One coherent random realization of the surrogate's (b, J) field.
///
/// Each call to evaluate() draws (b(z), J(z)) from the posterior conditioned
/// on the training data and on every value this handle has already emitted,
/// so a sequence of evaluations traces a single sample function. Evaluating
/// the same point twice returns the cached draw.
///
/// The handle keeps a pointer to the model; the model must outlive it.
class FieldSampler {
public:
    FieldSampler(const GprModel& model, std::uint64_t seed);

    FieldValue evaluate(const Vec& z);

    std::size_t conditioning_size() const { return static_cast<std::size_t>(factor_.rows()); }

private:
    struct Emitted {
        Vec x;
        Functional f;
    };

    Mat cross_with_history(const Vec& z, const std::vector<Functional>& q) const;

    const GprModel* model_;
    Rng rng_;
    std::vector<Functional> query_;
    Mat factor_;     // grows by |query_| rows per distinct evaluation point
    Mat whitened_;   // conditioning values whitened by factor_, one column per component
    std::vector<Emitted> emitted_;
    std::vector<std::pair<Vec, FieldValue>> cache_;
};

}  // namespace gpgad
