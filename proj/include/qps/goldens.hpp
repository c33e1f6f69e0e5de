#pragma once

// Reference instances and reference values used by the self-test and the
// test suites.

#include <array>
#include <string_view>
#include <vector>

#include "qps/marginals.hpp"

namespace qps::goldens {

inline constexpr std::string_view kEventMatrix3 =
    "11110000\n"
    "11001100\n"
    "10101010\n"
    "00000011\n"
    "00000101\n"
    "00010001\n";

inline constexpr std::string_view kEventMatrix4 =
    "1111111100000000\n"
    "1111000011110000\n"
    "1100110011001100\n"
    "1010101010101010\n"
    "0000000000001111\n"
    "0000000000110011\n"
    "0000000001010101\n"
    "0000001100000011\n"
    "0000010100000101\n"
    "0001000100010001\n";

/// Pair marginals that no single classical space admits.
inline MarginalSet contextual_triple() {
    MarginalSet s;
    s.n = 3;
    for (int i = 1; i <= 3; ++i)
        s.pbar[i] = parse_probability("1/2");
    s.pjoint[{1, 2}] = parse_probability("9/20");
    s.pjoint[{1, 3}] = parse_probability("9/20");
    s.pjoint[{2, 3}] = parse_probability("1/10");
    return s;
}

/// Classically representable triple with a unique P(A1 A2 A3) = 1/20.
inline MarginalSet tight_triple() {
    MarginalSet s = contextual_triple();
    s.pjoint[{1, 2}] = parse_probability("1/20");
    return s;
}

/// Every unary 1/2 and every pair 1/4.
inline MarginalSet uniform_pairs(int n) {
    MarginalSet s;
    s.n = n;
    for (int i = 1; i <= n; ++i) {
        s.pbar[i] = parse_probability("1/2");
        for (int j = i + 1; j <= n; ++j)
            s.pjoint[{i, j}] = parse_probability("1/4");
    }
    return s;
}

/// Three-significant-figure reference diagonals of rho.
inline constexpr std::array<double, 8> kReferenceDiagonalContextual{
    0.0105, 0.242, 0.242, 0.0469, 0.201, 0.115, 0.115, 0.0274};
inline constexpr std::array<double, 8> kReferenceDiagonalTight{
    0.0134, 0.227, 0.287, 0.0469, 0.234, 0.135, 0.0343, 0.0217};

inline constexpr double kReferenceDiagonalTolerance = 0.02;

} // namespace qps::goldens
