#pragma once

// Representative-agent self-consistency under equal weighting: the average
// action q is a fixed point of q -> Pr(x = 1 | q) = 1 - state_match_prob(q).

#include <cstddef>
#include <vector>

#include "contagion/signal_model.hpp"

namespace contagion {

enum class Stability { stable, unstable };

struct FixedPoint {
    Belief q;
    Stability stability;
};

/// Pr(x = 1 | q) under θ = 0.
double action_probability(const SignalStructure& sig, Belief q) noexcept;

/// r(q) = Pr(x = 1 | q) - q. Zero at both endpoints for every structure.
double residual(const SignalStructure& sig, Belief q) noexcept;

/// All fixed points in [0, 1], ascending: the endpoints plus every interior
/// sign change of r found on a uniform grid of `grid` cells and refined by
/// bisection to an interval narrower than `tol`. The two end cells are also
/// searched on a geometric grid toward the endpoint, down to the spacing of
/// doubles there; a root closer to 1 than that is not representable and is
/// lost. Stability follows from the sign of r on either side. Throws std::domain_error for an uninformative
/// structure (r vanishes identically away from q = 1/2).
std::vector<FixedPoint> fixed_points(const SignalStructure& sig, double tol = 1e-8,
                                     std::size_t grid = 1024);

/// q_0 = q0, q_{k+1} = Pr(x = 1 | q_k); returns n + 1 values.
std::vector<Belief> iterate_map(const SignalStructure& sig, Belief q0, std::size_t n);

struct CurveSample {
    Belief q;
    double action_probability;
};

/// `samples` evenly spaced points on [0, 1] (samples >= 2).
std::vector<CurveSample> meanfield_curve(const SignalStructure& sig, std::size_t samples);

}  // namespace contagion
