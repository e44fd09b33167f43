#include "gpgad/kernel.hpp"

#include <span>
#include <vector>
#include <string>

namespace gpgad {

KernelParams::KernelParams(double eta, double length, double noise_var) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("KernelParams: eta must be positive");
    if (!(length > 0.0) || !std::isfinite(length)) throw InputError("KernelParams: length must be positive");
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
        throw InputError("KernelParams: noise_var must be nonnegative");
    log_eta_ = std::log(eta);
    log_length_ = std::log(length);
    log_noise_var_ = std::log(noise_var);
}

KernelParams KernelParams::from_log(double log_eta, double log_length, double log_noise_var) {
    if (!std::isfinite(log_eta) || !std::isfinite(log_length) || std::isnan(log_noise_var) ||
        log_noise_var == std::numeric_limits<double>::infinity())
        throw InputError("KernelParams::from_log: non-finite log parameter");
    KernelParams p;
    p.log_eta_ = log_eta;
    p.log_length_ = log_length;
    p.log_noise_var_ = log_noise_var;
    return p;
}

KernelParams KernelParams::with_noise_var(double noise_var) const {
    return KernelParams(eta(), length(), noise_var);
}

namespace {

void check_pair(const Vec& x, const Vec& x2, const char* where) {
    if (x.size() == 0 || x.size() != x2.size())
        throw InputError(std::string(where) + ": dimension mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(x2.size()) + ")");
    if (!x.allFinite() || !x2.allFinite()) throw InputError(std::string(where) + ": non-finite coordinates");
}

// d^|idx| / d delta_idx of exp(-s |delta|^2 / 2), divided by the exponential itself.
// With phi = -s |delta|^2 / 2: phi_i = -s delta_i, phi_ij = -s [i == j], higher derivatives vanish,
// so Faa di Bruno reduces to sums over pairings.
double se_derivative_factor(const Vec& delta, double s, std::span<const int> idx) {
    auto p1 = [&](int i) { return -s * delta[i]; };
    auto p2 = [&](int i, int j) { return i == j ? -s : 0.0; };
    switch (idx.size()) {
        case 0:
            return 1.0;
        case 1:
            return p1(idx[0]);
        case 2:
            return p1(idx[0]) * p1(idx[1]) + p2(idx[0], idx[1]);
        case 3: {
            const int i = idx[0], j = idx[1], k = idx[2];
            return p1(i) * p1(j) * p1(k) + p2(i, j) * p1(k) + p2(i, k) * p1(j) + p2(j, k) * p1(i);
        }
        case 4: {
            const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
            return p1(i) * p1(j) * p1(k) * p1(l)                                          //
                   + p2(i, j) * p1(k) * p1(l) + p2(i, k) * p1(j) * p1(l) + p2(i, l) * p1(j) * p1(k)  //
                   + p2(j, k) * p1(i) * p1(l) + p2(j, l) * p1(i) * p1(k) + p2(k, l) * p1(i) * p1(j)  //
                   + p2(i, j) * p2(k, l) + p2(i, k) * p2(j, l) + p2(i, l) * p2(j, k);
        }
        default:
            throw InputError("se_derivative_factor: derivative order above 4");
    }
}

}  // namespace

double energy_kernel(const Vec& x, const Vec& x2, const KernelParams& p) {
    check_pair(x, x2, "energy_kernel");
    return p.eta() * std::exp(-(x - x2).squaredNorm() / (2.0 * p.length()));
}

double functional_covariance(const Vec& x, const Functional& a, const Vec& x2, const Functional& b,
                             const KernelParams& p) {
    // k depends on delta = x - x2, so d/dx2 = -d/d delta.
    const Vec delta = x - x2;
    const double s = 1.0 / p.length();
    std::array<int, 4> idx{};
    int n = 0;
    for (int k = 0; k < a.order; ++k) idx[n++] = a.index[k];
    for (int k = 0; k < b.order; ++k) idx[n++] = b.index[k];
    const double parity = (b.order % 2 == 0) ? 1.0 : -1.0;
    const double base = p.eta() * std::exp(-0.5 * s * delta.squaredNorm());
    return a.sign * b.sign * parity * base * se_derivative_factor(delta, s, std::span<const int>(idx.data(), n));
}

CrossBlocks cross_blocks(const Vec& x, const Mat& X, const KernelParams& p) {
    const auto d = x.size();
    if (X.cols() != d || d == 0) throw InputError("cross_blocks: dimension mismatch");
    if (!x.allFinite() || !X.allFinite()) throw InputError("cross_blocks: non-finite coordinates");
    CrossBlocks out{Mat(X.rows(), d), Mat(X.rows(), d * d)};
    const auto u = Functional::value();
    for (Eigen::Index n = 0; n < X.rows(); ++n) {
        const Vec xn = X.row(n).transpose();
        for (int i = 0; i < d; ++i) {
            out.u_b(n, i) = functional_covariance(xn, u, x, energy_force(i), p);
            for (int j = 0; j < d; ++j) out.u_J(n, i * d + j) = functional_covariance(xn, u, x, energy_jacobian(i, j), p);
        }
    }
    return out;
}

JointBlocks joint_blocks(const Vec& x, const Vec& x2, const KernelParams& p) {
    check_pair(x, x2, "joint_blocks");
    const int d = static_cast<int>(x.size());
    JointBlocks out{Mat(d, d), Mat(d, d * d), Mat(d * d, d * d)};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out.bb(i, j) = functional_covariance(x, energy_force(i), x2, energy_force(j), p);
        for (int e = 0; e < d; ++e)
            for (int g = 0; g < d; ++g)
                out.bJ(i, e * d + g) = functional_covariance(x, energy_force(i), x2, energy_jacobian(e, g), p);
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int e = 0; e < d; ++e)
                for (int g = 0; g < d; ++g)
                    out.JJ(i * d + j, e * d + g) =
                        functional_covariance(x, energy_jacobian(i, j), x2, energy_jacobian(e, g), p);
    return out;
}

Mat stacked_prior_covariance(const Mat& X, const KernelParams& p) {
    const int d = static_cast<int>(X.cols());
    const int q = 1 + d + d * d;
    std::vector<Functional> fs;
    fs.push_back(Functional::value());
    for (int i = 0; i < d; ++i) fs.push_back(energy_force(i));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) fs.push_back(energy_jacobian(i, j));
    const auto n = X.rows();
    Mat K(n * q, n * q);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const Vec xa = X.row(a).transpose(), xb = X.row(b).transpose();
            for (int fa = 0; fa < q; ++fa)
                for (int fb = 0; fb < q; ++fb) K(a * q + fa, b * q + fb) = functional_covariance(xa, fs[fa], xb, fs[fb], p);
        }
    return K;
}

}  // namespace gpgad
