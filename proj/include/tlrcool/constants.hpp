#pragma once

namespace tlrcool {

// CODATA 2018. h and k_B are exact; hbar = h / 2pi.
inline constexpr double si_hbar = 1.0545718176461565e-34; // J s
inline constexpr double si_kb = 1.380649e-23;             // J / K

}
