#pragma once

// Brute-force click statistics of the single-mode SPDC source by explicit
// Fock-space expansion of the two-mode squeezed state. Shares no code with the
// singular-value formulas; used to cross-check them.

#include <array>

#include "diqkd/spdc.hpp"

namespace diqkd::oracle {

/// Probabilities of the 16 (Alice pattern, Bob pattern) events, index
/// 4 * alice + bob with pattern bit 0 = main detector, bit 1 = perpendicular.
/// Photon numbers per emission mode are truncated at `cutoff`. Only
/// src.modes == 1 is supported.
std::array<double, 16> fock_joint_distribution(const SqueezedSourceParams& src, const DetectionModel& det,
                                               const MeasurementSetting& a, const MeasurementSetting& b,
                                               int cutoff = 20);

}  // namespace diqkd::oracle
