#pragma once

namespace locc {

// Comparison tolerances. All deciders treat a >= b as a >= b - decision.
struct Tolerances {
  double decision = 1e-9;
  double normalization = 1e-10;
  double svd = 1e-12;
  double feasibility = 1e-8;
  // Margins below this are reported as boundary ties by the agreement harness.
  double tie = 1e-7;
};

inline constexpr Tolerances kDefaultTolerances{};

// Negative Schmidt numbers above -kClipFloor are numerical zeros.
inline constexpr double kClipFloor = 1e-12;

}  // namespace locc
