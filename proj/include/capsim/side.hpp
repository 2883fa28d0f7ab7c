#pragma once

namespace capsim {

enum class Side { kLeft, kRight };

inline Side mirror(Side s) { return s == Side::kLeft ? Side::kRight : Side::kLeft; }

/// Sign of the lateral (y, positive left) direction pointing toward this side.
inline double side_sign(Side s) { return s == Side::kLeft ? 1.0 : -1.0; }

inline char side_char(Side s) { return s == Side::kLeft ? 'L' : 'R'; }

}  // namespace capsim
