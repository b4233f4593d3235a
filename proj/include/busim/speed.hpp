#pragma once

#include <cstddef>

#include "busim/types.hpp"

namespace busim::sim {

// Time-of-day speed: v_off scaled down by two Gaussian rush-hour dips and
// clamped from below at v_min:
//   v(t) = max(v_min, v_off * (1 - k * (exp(-((t-t_m)/sigma)^2)
//                                     + exp(-((t-t_e)/sigma)^2))))
double speed_at(const SpeedShape& shape, double v_off_kmh, double t_min);

// Batch variant through the kernel dispatcher.
void speed_batch(const SpeedShape& shape, double v_off_kmh, const double* t_min,
                 size_t n, double* out);

// Distance a bus covers in one step starting at minute t_min, in meters.
double step_distance_m(const SpeedShape& shape, double v_off_kmh, double t_min,
                       int step_min);

}  // namespace busim::sim
