#include "contagion/meanfield.hpp"

#include <optional>
#include <stdexcept>

namespace contagion {

double action_probability(const SignalStructure& sig, Belief q) noexcept {
    return 1.0 - state_match_prob(sig, q);
}

double residual(const SignalStructure& sig, Belief q) noexcept {
    return action_probability(sig, q) - q;
}

namespace {

double bisect(const SignalStructure& sig, double lo, double hi, double tol) {
    double r_lo = residual(sig, lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double r_mid = residual(sig, mid);
        if (r_mid == 0.0) {
            return mid;
        }
        if ((r_mid < 0.0) == (r_lo < 0.0)) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<FixedPoint> fixed_points(const SignalStructure& sig, double tol, std::size_t grid) {
    if (!sig.informative()) {
        throw std::domain_error("fixed_points: uninformative signal structure is degenerate");
    }
    if (grid < 2 || !(tol > 0.0)) {
        throw std::invalid_argument("fixed_points: need grid >= 2 and tol > 0");
    }
    const auto at = [grid](std::size_t k) {
        return static_cast<double>(k) / static_cast<double>(grid);
    };

    std::vector<double> r(grid + 1);
    for (std::size_t k = 0; k <= grid; ++k) {
        r[k] = residual(sig, at(k));
    }

    std::vector<FixedPoint> out;
    // Roots inside an end cell can sit far closer to the endpoint than the
    // grid spacing; walk toward the endpoint geometrically while q is still
    // distinct from it.
    const double h = at(1);
    std::optional<FixedPoint> first_root;
    double r0 = r[1];
    if (r[1] > 0.0) {
        double outer = h;
        for (double q = h / 2; q > 0.0; q /= 2) {
            const double rq = residual(sig, q);
            if (rq < 0.0) {
                first_root = FixedPoint{bisect(sig, q, outer, tol), Stability::unstable};
                r0 = rq;
                break;
            }
            outer = q;
        }
    }
    out.push_back({0.0, r0 < 0.0 ? Stability::stable : Stability::unstable});
    if (first_root) {
        out.push_back(*first_root);
    }
    for (std::size_t k = 1; k + 1 < grid; ++k) {
        const double a = r[k];
        const double b = r[k + 1];
        if (a == 0.0) {
            const double left = r[k - 1];
            out.push_back({at(k), (left > 0.0 || b < 0.0) ? Stability::stable
                                                           : Stability::unstable});
            continue;
        }
        if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
            out.push_back({bisect(sig, at(k), at(k + 1), tol),
                           a < 0.0 ? Stability::unstable : Stability::stable});
        }
    }
    double r1 = r[grid - 1];
    if (r1 < 0.0) {
        double outer = 1.0 - h;
        for (double gap = h / 2;; gap /= 2) {
            const double q = 1.0 - gap;
            if (q == 1.0) {
                break;
            }
            const double rq = residual(sig, q);
            if (rq > 0.0) {
                out.push_back({bisect(sig, outer, q, tol), Stability::unstable});
                r1 = rq;
                break;
            }
            outer = q;
        }
    }
    out.push_back({1.0, r1 > 0.0 ? Stability::stable : Stability::unstable});
    return out;
}

std::vector<Belief> iterate_map(const SignalStructure& sig, Belief q0, std::size_t n) {
    std::vector<Belief> out;
    out.reserve(n + 1);
    out.push_back(q0);
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(action_probability(sig, out.back()));
    }
    return out;
}

std::vector<CurveSample> meanfield_curve(const SignalStructure& sig, std::size_t samples) {
    if (samples < 2) {
        throw std::invalid_argument("meanfield_curve: need at least two samples");
    }
    std::vector<CurveSample> out;
    out.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
        const double q = static_cast<double>(k) / static_cast<double>(samples - 1);
        out.push_back({q, action_probability(sig, q)});
    }
    return out;
}

}  // namespace contagion
