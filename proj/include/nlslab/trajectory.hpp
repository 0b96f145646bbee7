#pragma once

#include <vector>

#include "nlslab/params.hpp"
#include "nlslab/spectral_field.hpp"

namespace nlslab {

struct FieldSample {
  double t = 0.0;
  SpectralField field;
};

using Trajectory = std::vector<FieldSample>;

// Pushes a unit-scale time-indexed solution to scale N: the sample recorded
// at time tau describes the scaled solution at time tau / N^2, with modes
// k -> N k and amplitudes multiplied by N^(1/m).
inline Trajectory rescale_up(const Trajectory& unit, const ScalingMap& sm) {
  Trajectory out;
  out.reserve(unit.size());
  const double tf = sm.time_factor();
  for (const auto& s : unit) out.push_back({s.t / tf, rescale_field(s.field, sm)});
  return out;
}

}  // namespace nlslab
