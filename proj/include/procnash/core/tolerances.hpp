#pragma once

namespace procnash::tol {

// Exploitability at or below this certifies an equilibrium.
inline constexpr double kCertificate = 1e-8;

// Slack for identities that hold exactly in real arithmetic.
inline constexpr double kArithmetic = 1e-12;

// Simplex-sum tolerance for a MixedStrategy.
inline constexpr double kSimplexSum = 1e-9;

// Post-clamp mass at or below this is a degenerate weight vector.
inline constexpr double kDegenerateMass = 1e-12;

}  // namespace procnash::tol
