#include "weakmix/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "weakmix/errors.hpp"

namespace weakmix {

std::string_view to_string(Family family) {
    switch (family) {
    case Family::gaussian:
        return "gaussian";
    case Family::poisson:
        return "poisson";
    case Family::exponential:
        return "exponential";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "gaussian" || name == "normal") {
        return Family::gaussian;
    }
    if (name == "poisson") {
        return Family::poisson;
    }
    if (name == "exponential") {
        return Family::exponential;
    }
    throw ValidationError("unknown family '" + std::string(name) + "'");
}

namespace detail {

void check_simplex(std::span<const double> p, double tol, const char* what) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << what << ": entries must be finite and non-negative";
            throw ValidationError(msg.str());
        }
        total += v;
    }
    if (std::abs(total - 1.0) > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": entries sum to " << total << ", expected 1";
        throw ValidationError(msg.str());
    }
}

} // namespace detail

void StandardParams::validate() const {
    const std::size_t kk = weights.size();
    if (kk < 1) {
        throw ValidationError("mixture needs at least one component");
    }
    if (locs.size() != kk) {
        throw ValidationError("locs and weights differ in length");
    }
    detail::check_simplex(weights, 1e-12, "weights");
    if (family == Family::gaussian) {
        if (scales.size() != kk) {
            throw ValidationError("scales and weights differ in length");
        }
        for (double s : scales) {
            if (!(s > 0.0) || !std::isfinite(s)) {
                throw ValidationError("component standard deviations must be > 0");
            }
        }
        for (double m : locs) {
            if (!std::isfinite(m)) {
                throw ValidationError("component means must be finite");
            }
        }
    } else {
        for (double l : locs) {
            if (!(l > 0.0) || !std::isfinite(l)) {
                throw ValidationError("component rates must be > 0");
            }
        }
    }
}

double Dataset::mean() const {
    if (values.empty()) {
        return 0.0;
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double Dataset::variance() const {
    if (values.size() < 2) {
        return 0.0;
    }
    const double m = mean();
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(values.size() - 1);
}

} // namespace weakmix
