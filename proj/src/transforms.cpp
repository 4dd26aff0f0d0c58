#include "weakmix/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "weakmix/errors.hpp"

namespace weakmix {

namespace {

constexpr double kAngleSlack = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_lemma2(const AlphaTau& at, std::span<const double> p, double tol) {
    double first = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        first += p[i] * at.alpha[i];
        second += p[i] * (at.tau[i] * at.tau[i] + at.alpha[i] * at.alpha[i]);
    }
    if (std::abs(first) > tol || std::abs(second - 1.0) > tol) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "moment constraints violated: sum p*alpha = " << first
            << ", sum p*(tau^2+alpha^2) = " << second;
        throw ValidationError(msg.str());
    }
}

void check_weights(std::span<const double> p) {
    if (p.size() < 2) {
        throw ValidationError("need k >= 2 components");
    }
    detail::check_simplex(p, 1e-10, "weights");
    for (double v : p) {
        if (v < kMinWeight) {
            throw ValidationError("degenerate simplex: a weight is below 1e-12");
        }
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Hyperspherical coefficients c_1..c_{m} from m - 1 angles.
std::vector<double> sphere_coefficients(std::span<const double> angles) {
    const std::size_t m = angles.size() + 1;
    std::vector<double> c(m);
    double running = 1.0;
    for (std::size_t s = 0; s + 1 < m; ++s) {
        c[s] = running * std::cos(angles[s]);
        running *= std::sin(angles[s]);
    }
    c[m - 1] = running;
    return c;
}

// Backward cumulative norms: tail[i] = ||y_i..y_{m-1}||.
std::vector<double> tail_norms(std::span<const double> y) {
    std::vector<double> tail(y.size() + 1, 0.0);
    double acc = 0.0;
    for (std::size_t i = y.size(); i-- > 0;) {
        acc += y[i] * y[i];
        tail[i] = std::sqrt(acc);
    }
    return tail;
}

} // namespace

MixtureMoments mixture_moments(const StandardParams& params) {
    params.validate();
    MixtureMoments out;
    const std::size_t k = params.k();
    for (std::size_t i = 0; i < k; ++i) {
        out.mean += params.weights[i] * params.locs[i];
    }
    double second = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double p = params.weights[i];
        const double m = params.locs[i];
        switch (params.family) {
        case Family::gaussian:
            second += p * (params.scales[i] * params.scales[i] + (m - out.mean) * (m - out.mean));
            break;
        case Family::poisson:
            second += p * (m + (m - out.mean) * (m - out.mean));
            break;
        case Family::exponential:
            second += p * (m * m + (m - out.mean) * (m - out.mean));
            break;
        }
    }
    out.variance = second;
    return out;
}

GlobalMoments global_moments(const StandardParams& params) {
    const MixtureMoments mm = mixture_moments(params);
    return {mm.mean, std::sqrt(mm.variance)};
}

AlphaTau to_alpha_tau(const StandardParams& params, const GlobalMoments& g) {
    params.validate();
    if (params.family != Family::gaussian) {
        throw ValidationError("to_alpha_tau applies to location-scale mixtures");
    }
    if (!(g.sigma > 0.0)) {
        throw ValidationError("global sigma must be > 0");
    }
    AlphaTau at;
    at.alpha.resize(params.k());
    at.tau.resize(params.k());
    for (std::size_t i = 0; i < params.k(); ++i) {
        at.alpha[i] = (params.locs[i] - g.mu) / g.sigma;
        at.tau[i] = params.scales[i] / g.sigma;
    }
    check_lemma2(at, params.weights, 1e-8);
    return at;
}

StandardParams from_alpha_tau(const AlphaTau& at, std::span<const double> weights,
                              const GlobalMoments& g) {
    const std::size_t k = weights.size();
    if (at.alpha.size() != k || at.tau.size() != k) {
        throw ValidationError("alpha/tau length differs from k");
    }
    if (!(g.sigma > 0.0)) {
        throw ValidationError("global sigma must be > 0");
    }
    for (double t : at.tau) {
        if (!(t > 0.0)) {
            throw ValidationError("tau entries must be > 0");
        }
    }
    StandardParams out;
    out.family = Family::gaussian;
    out.weights.assign(weights.begin(), weights.end());
    out.locs.resize(k);
    out.scales.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.locs[i] = g.mu + g.sigma * at.alpha[i];
        out.scales[i] = g.sigma * at.tau[i];
    }
    return out;
}

GammaEta to_gamma_eta(const AlphaTau& at, std::span<const double> weights) {
    const std::size_t k = weights.size();
    if (at.alpha.size() != k || at.tau.size() != k) {
        throw ValidationError("alpha/tau length differs from k");
    }
    GammaEta ge;
    ge.gamma.resize(k);
    ge.eta.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double root = std::sqrt(weights[i]);
        ge.gamma[i] = root * at.alpha[i];
        ge.eta[i] = root * at.tau[i];
    }
    return ge;
}

AlphaTau from_gamma_eta(const GammaEta& ge, std::span<const double> weights) {
    const std::size_t k = weights.size();
    if (ge.gamma.size() != k || ge.eta.size() != k) {
        throw ValidationError("gamma/eta length differs from k");
    }
    AlphaTau at;
    at.alpha.resize(k);
    at.tau.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double root = std::sqrt(weights[i]);
        at.alpha[i] = ge.gamma[i] / root;
        at.tau[i] = ge.eta[i] / root;
    }
    return at;
}

OrthonormalBasis build_basis(std::span<const double> weights) {
    check_weights(weights);
    const std::size_t k = weights.size();
    OrthonormalBasis basis;
    basis.vectors.reserve(k - 1);
    double head = weights[0]; // p_1 + ... + p_s
    for (std::size_t s = 1; s < k; ++s) {
        std::vector<double> v(k, 0.0);
        const double root_head = std::sqrt(head);
        for (std::size_t j = 0; j < s; ++j) {
            v[j] = -std::sqrt(weights[j] * weights[s]) / root_head;
        }
        v[s] = root_head;
        const double norm = std::sqrt(dot(v, v));
        for (double& x : v) {
            x /= norm;
        }
        basis.vectors.push_back(std::move(v));
        head += weights[s];
    }
    return basis;
}

std::vector<double> gamma_from_angles(double phi, std::span<const double> varpi,
                                      std::span<const double> weights) {
    const std::size_t k = weights.size();
    if (k < 2) {
        throw ValidationError("need k >= 2 components");
    }
    if (varpi.size() != k - 2) {
        throw ValidationError("expected k - 2 gamma angles");
    }
    if (!(std::abs(phi) <= 1.0 + kAngleSlack) || (k >= 3 && phi < 0.0)) {
        throw ValidationError("radius phi out of range");
    }
    AngularCoords probe;
    probe.phi = phi;
    probe.varpi.assign(varpi.begin(), varpi.end());
    probe.xi.assign(k - 1, 0.0);
    if (!angles_in_range(k, probe)) {
        throw ValidationError("gamma angle out of range");
    }
    const OrthonormalBasis basis = build_basis(weights);
    const std::vector<double> c = sphere_coefficients(varpi);
    std::vector<double> gamma(k, 0.0);
    for (std::size_t s = 0; s + 1 < k; ++s) {
        const double coef = phi * c[s];
        for (std::size_t j = 0; j <= s + 1; ++j) {
            gamma[j] += coef * basis.vectors[s][j];
        }
    }
    return gamma;
}

GammaAngles angles_from_gamma(std::span<const double> gamma, std::span<const double> weights) {
    const std::size_t k = weights.size();
    if (gamma.size() != k) {
        throw ValidationError("gamma length differs from k");
    }
    const OrthonormalBasis basis = build_basis(weights);
    std::vector<double> c(k - 1);
    std::vector<double> residual(gamma.begin(), gamma.end());
    for (std::size_t s = 0; s + 1 < k; ++s) {
        c[s] = dot(gamma, basis.vectors[s]);
        for (std::size_t j = 0; j < k; ++j) {
            residual[j] -= c[s] * basis.vectors[s][j];
        }
    }
    if (std::sqrt(dot(residual, residual)) > 1e-8) {
        throw ValidationError("gamma is not orthogonal to sqrt(p)");
    }

    GammaAngles out;
    if (k == 2) {
        out.phi = c[0];
        return out;
    }
    out.varpi.assign(k - 2, 0.0);
    const std::vector<double> tail = tail_norms(c);
    out.phi = tail[0];
    for (std::size_t j = 0; j + 1 < k - 2; ++j) {
        if (tail[j] == 0.0) {
            return out;
        }
        out.varpi[j] = std::atan2(tail[j + 1], c[j]);
    }
    const std::size_t last = k - 3;
    if (tail[last] == 0.0) {
        return out;
    }
    double w = std::atan2(c[last + 1], c[last]);
    if (w < 0.0) {
        w += kTwoPi;
    }
    out.varpi[last] = w;
    return out;
}

std::vector<double> eta_from_angles(double phi_sq, std::span<const double> xi) {
    if (!(phi_sq >= -kAngleSlack && phi_sq <= 1.0 + kAngleSlack)) {
        throw ValidationError("phi^2 must lie in [0, 1]");
    }
    for (double a : xi) {
        if (!(a >= -kAngleSlack && a <= std::numbers::pi / 2 + kAngleSlack)) {
            throw ValidationError("eta angle out of [0, pi/2]");
        }
    }
    const double r = std::sqrt(std::max(0.0, 1.0 - phi_sq));
    std::vector<double> c = sphere_coefficients(xi);
    for (double& v : c) {
        // cos/sin of angles within the slack can be -1e-16
        v = std::max(0.0, r * v);
    }
    return c;
}

std::vector<double> angles_from_eta(std::span<const double> eta, double phi_sq) {
    if (eta.size() < 2) {
        throw ValidationError("need k >= 2 components");
    }
    double ss = 0.0;
    for (double v : eta) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw ValidationError("eta entries must be non-negative");
        }
        ss += v * v;
    }
    if (std::abs(ss - (1.0 - phi_sq)) > kTransformTol) {
        throw ValidationError("sum of eta^2 differs from 1 - phi^2");
    }
    std::vector<double> xi(eta.size() - 1, 0.0);
    const std::vector<double> tail = tail_norms(eta);
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (tail[i] == 0.0) {
            break;
        }
        xi[i] = std::atan2(tail[i + 1], eta[i]);
    }
    return xi;
}

bool angles_in_range(std::size_t k, const AngularCoords& a) {
    if (a.varpi.size() + 2 != k || a.xi.size() + 1 != k) {
        return false;
    }
    if (!(std::abs(a.phi) <= 1.0 + kAngleSlack)) {
        return false;
    }
    if (k >= 3 && a.phi < 0.0) {
        return false;
    }
    for (std::size_t j = 0; j < a.varpi.size(); ++j) {
        const double hi = (j + 1 == a.varpi.size()) ? kTwoPi : std::numbers::pi;
        if (!(a.varpi[j] >= -kAngleSlack && a.varpi[j] <= hi + kAngleSlack)) {
            return false;
        }
    }
    for (double x : a.xi) {
        if (!(x >= -kAngleSlack && x <= std::numbers::pi / 2 + kAngleSlack)) {
            return false;
        }
    }
    return true;
}

StandardParams compose_standard(const GlobalMoments& g, std::span<const double> weights,
                                const AngularCoords& a) {
    const std::size_t k = weights.size();
    // Inline version of build_basis + gamma_from_angles + eta_from_angles.
    const std::vector<double> c = sphere_coefficients(a.varpi);
    std::vector<double> gamma(k, 0.0);
    double head = weights[0];
    for (std::size_t s = 1; s < k; ++s) {
        const double root_head = std::sqrt(head);
        const double norm = std::sqrt(head + weights[s]);
        const double coef = a.phi * c[s - 1] / norm;
        for (std::size_t j = 0; j < s; ++j) {
            gamma[j] -= coef * std::sqrt(weights[j] * weights[s]) / root_head;
        }
        gamma[s] += coef * root_head;
        head += weights[s];
    }
    const double r = std::sqrt(std::max(0.0, 1.0 - a.phi * a.phi));
    const std::vector<double> eta = sphere_coefficients(a.xi);

    StandardParams out;
    out.family = Family::gaussian;
    out.weights.assign(weights.begin(), weights.end());
    out.locs.resize(k);
    out.scales.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double root = std::sqrt(weights[i]);
        out.locs[i] = g.mu + g.sigma * gamma[i] / root;
        out.scales[i] = g.sigma * std::max(0.0, r * eta[i]) / root;
    }
    return out;
}

StandardParams standard_from_angular(const GlobalMoments& g, std::span<const double> weights,
                                     const AngularCoords& a) {
    check_weights(weights);
    if (!(g.sigma > 0.0)) {
        throw ValidationError("global sigma must be > 0");
    }
    const std::size_t k = weights.size();
    if (!angles_in_range(k, a)) {
        throw ValidationError("angular coordinates out of range");
    }
    GammaEta ge;
    ge.gamma = gamma_from_angles(a.phi, a.varpi, weights);
    ge.eta = eta_from_angles(a.phi_sq(), a.xi);
    return from_alpha_tau(from_gamma_eta(ge, weights), weights, g);
}

std::pair<GlobalMoments, AngularCoords> angular_from_standard(const StandardParams& params) {
    const GlobalMoments g = global_moments(params);
    const GammaEta ge = to_gamma_eta(to_alpha_tau(params, g), params.weights);
    const GammaAngles ga = angles_from_gamma(ge.gamma, params.weights);
    AngularCoords a;
    a.phi = ga.phi;
    a.varpi = ga.varpi;
    a.xi = angles_from_eta(ge.eta, a.phi_sq());
    return {g, a};
}

StandardParams standard_from_rate(Family family, const RateReparam& r) {
    if (family == Family::gaussian) {
        throw ValidationError("rate reparameterisation needs a Poisson or exponential family");
    }
    const std::size_t k = r.weights.size();
    if (r.gamma.size() != k) {
        throw ValidationError("gamma length differs from k");
    }
    if (!(r.lambda > 0.0)) {
        throw ValidationError("lambda must be > 0");
    }
    StandardParams out;
    out.family = family;
    out.weights = r.weights;
    out.locs.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(r.weights[i] > 0.0)) {
            throw ValidationError("weights must be > 0");
        }
        out.locs[i] = r.lambda * r.gamma[i] / r.weights[i];
    }
    return out;
}

RateReparam rate_from_standard(const StandardParams& params) {
    params.validate();
    if (params.family == Family::gaussian) {
        throw ValidationError("rate reparameterisation needs a Poisson or exponential family");
    }
    RateReparam r;
    r.weights = params.weights;
    r.lambda = mixture_moments(params).mean;
    r.gamma.resize(params.k());
    for (std::size_t i = 0; i < params.k(); ++i) {
        r.gamma[i] = params.weights[i] * params.locs[i] / r.lambda;
    }
    return r;
}

} // namespace weakmix
