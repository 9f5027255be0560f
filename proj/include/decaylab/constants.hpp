#pragma once

namespace decaylab {

// Half-width of the vertical strip of admissible Re(s), shared by the
// transfer-operator, renewal, and pipeline modules.
inline constexpr double kStripEps = 0.05;

}  // namespace decaylab
