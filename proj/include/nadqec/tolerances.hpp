#pragma once

namespace nadqec::tol {

/// Structural checks: unitarity, channel completeness, PSD floor.
inline constexpr double structural = 1e-10;

/// Arithmetic checks: hermiticity, trace normalization, state norms.
inline constexpr double arithmetic = 1e-12;

/// Minimum eigenvalue accepted for a positive semidefinite density matrix.
inline constexpr double psd_floor = -1e-10;

}  // namespace nadqec::tol
