#pragma once

// Benchmark optima generated by tools/derive_minima.cpp: multistart box L-BFGS
// (1000 random starts plus the published minimisers) for the non-separable
// functions, exact coordinate-wise scans for Michalewicz and Styblinski-Tang.

namespace aegis::minima {

inline constexpr double kBranin = 0.39788735772973816;
inline constexpr double kEggholder = -959.64066272085097;
inline constexpr double kEggholderX0 = 512;
inline constexpr double kEggholderX1 = 404.23180516963424;
inline constexpr double kGoldsteinPrice = 2.9999999999999041;
inline constexpr double kSixHumpCamel = -1.0316284534898774;
inline constexpr double kSixHumpCamelX0 = 0.089842013112883035;
inline constexpr double kSixHumpCamelX1 = -0.71265640309186384;
inline constexpr double kHartmann3 = -3.8627797873326628;
inline constexpr double kHartmann3X[3] = {0.11458887611016763, 0.5556488946195608, 0.85254698467769174};
inline constexpr double kHartmann6 = -3.3223680114155156;
inline constexpr double kHartmann6X[6] = {0.20168951099463048, 0.15001069182826562, 0.47687397422731148, 0.27533243047871425, 0.31165161658971735, 0.65730053405083155};
inline constexpr double kMichalewiczCoordinate[10] = {2.2029055232808989, 1.570796332063253, 1.2849915683940893, 1.9230584707885829, 1.7204697730546323, 1.5707963285510154, 1.4544139712271527, 1.7560865206795806, 1.6557174167546247, 1.5707963278485679};
inline constexpr double kMichalewicz5 = -4.687658179088146;
inline constexpr double kMichalewicz10 = -9.6601517156413408;
inline constexpr double kStyblinskiTangX = -2.9035340182455212;
inline constexpr double kStyblinskiTangPerCoordinate = -39.166165703771405;

}  // namespace aegis::minima
