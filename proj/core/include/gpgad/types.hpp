#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gpgad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Malformed caller input: dimension mismatch, non-finite coordinates, invalid parameters.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Gram matrix could not be factorized even after jitter escalation.
class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by every numerical routine that would otherwise emit NaN/Inf.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ObservationKind { energy, force };

inline const char* to_string(ObservationKind kind) {
    return kind == ObservationKind::energy ? "energy" : "force";
}

/// (b, J) at one point. J is d x d with J(i, j) = d b_i / d x_j.
struct FieldValue {
    Vec b;
    Mat J;
};

inline bool all_finite(const Eigen::Ref<const Mat>& m) { return m.allFinite(); }

}  // namespace gpgad
