#pragma once

namespace mathseed::layout_constants {

inline constexpr double kScriptScale = 0.7;
inline constexpr double kScriptScriptScale = 0.5;

// Script shifts, as fractions of the base box and of the x-height.
inline constexpr double kSuperscriptShift = 0.45;       // x base height
inline constexpr double kSubscriptDepthShift = 0.25;    // x base depth
inline constexpr double kSubscriptXHeightShift = 0.15;  // x x-height
// Minimum vertical gap between a superscript and a subscript, in rule thicknesses.
inline constexpr double kScriptClearance = 4.0;

// Fraction gaps between bar and numerator/denominator, in rule thicknesses.
inline constexpr double kFracGapDisplay = 3.0;
inline constexpr double kFracGapOther = 1.0;
// Horizontal overhang of the fraction bar on each side, in rule thicknesses.
inline constexpr double kFracPad = 1.0;

// Radical clearance above the radicand, in rule thicknesses.
inline constexpr double kRadicalGap = 2.0;
// Gap between a big operator and its stacked limits, in rule thicknesses.
inline constexpr double kLimitGap = 2.0;

// Inter-atom spaces in mu (1/18 em).
inline constexpr double kThinMu = 3.0;
inline constexpr double kMediumMu = 4.0;
inline constexpr double kThickMu = 5.0;

// Baseline-to-baseline distance as a multiple of the taller adjacent line.
inline constexpr double kLineSpacing = 1.2;

}  // namespace mathseed::layout_constants
