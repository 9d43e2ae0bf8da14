#pragma once

// Reference values computed independently with 30-digit arithmetic
// (mpmath partial sums and quadrature), frozen here.
namespace oracle {

// sum_{k>=1} 1/(k!)^2 = I_0(2) - 1
inline constexpr double tail_sum_n0 = 1.27958530233606726744;
// sum_{k>=4} 1/(k!)^2
inline constexpr double tail_sum_n3 = 0.00180752455828948966;
// 1 / I_0(2)
inline constexpr double patie_L = 0.43867627983704873938;
// sum_k 1/(k!^2 (k+1))
inline constexpr double b1_numerator = 1.590636854637329063;
inline constexpr double b1 = 0.697774657964007982;
inline constexpr double brownian_H_1_1 = 2.36310624574894125;
inline constexpr double A_limit_gamma1 = 1.17801263590447529;

inline constexpr double b_09 = 0.645274019363243845;
inline constexpr double b_11 = 0.747980137897088744;
inline constexpr double A30_g09 = 1.41692005661238455;
inline constexpr double A30_g10 = 1.17777968072060884;
inline constexpr double A30_g11 = 0.988723172172116722;
inline constexpr double A1e4_g09 = 1.90959543707844221;
inline constexpr double A1e4_g10 = 1.17801263380746395;
inline constexpr double A1e4_g11 = 0.744721459584932814;

}  // namespace oracle
