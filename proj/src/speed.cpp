#include "busim/speed.hpp"

#include <algorithm>
#include <cmath>

#include "busim/kernels.hpp"

namespace busim::sim {

double speed_at(const SpeedShape& shape, double v_off_kmh, double t_min) {
  const double um = (t_min - shape.t_morning_min) / shape.sigma_min;
  const double ue = (t_min - shape.t_evening_min) / shape.sigma_min;
  const double dip = std::exp(-um * um) + std::exp(-ue * ue);
  return std::max(shape.v_min_kmh, v_off_kmh * (1.0 - shape.k * dip));
}

void speed_batch(const SpeedShape& shape, double v_off_kmh, const double* t_min,
                 size_t n, double* out) {
  kernels::active().speed_profile(t_min, n, v_off_kmh, shape.t_morning_min,
                                  shape.t_evening_min, shape.sigma_min, shape.k,
                                  shape.v_min_kmh, out);
}

double step_distance_m(const SpeedShape& shape, double v_off_kmh, double t_min,
                       int step_min) {
  return speed_at(shape, v_off_kmh, t_min) * (step_min / 60.0) * 1000.0;
}

}  // namespace busim::sim
