#pragma once

#include <functional>

#include "equiconv/types.hpp"

namespace equiconv::ode {

struct Options {
    double rtol = 1e-11;
    double atol = 1e-13;
    double h_min = 1e-13;
    std::size_t max_steps = 5'000'000;
};

using Rhs = std::function<void(double x, const CVec& y, CVec& dy)>;
using Observer = std::function<void(std::size_t index, const CVec& y)>;

// Adaptive Dormand-Prince 5(4) integration from x0 to x1 (either direction).
// Each point of `stops` (ordered along the direction of integration) lying in
// the closed range is hit exactly and reported to the observer with its index.
// Steps never cross a stop, so stops double as discontinuity locations.
CVec integrate(const Rhs& f, double x0, double x1, CVec y0, const RVec& stops, const Observer& observer,
               const Options& opt = {});

} // namespace equiconv::ode
