#pragma once

#include <array>

#include "support.hpp"

namespace testsupport {

/// Triangle markets whose exact optimum lies on the 0.1 MW grid: 13 with linear costs,
/// 7 quadratic; most have at least one branch at its limit.
inline const std::array<ThreeBusInstance, 20> kThreeBusInstances = {{
    {10, 20, 10, 90, 100, {28, 19, 7}, {0, 0, 0}, {10, 0, 0}, {100, 200, 160}, {100, 70, 50}},
    {5, 20, 5, 90, 70, {15, 19, 27}, {0, 0, 0}, {10, 10, 0}, {100, 160, 100}, {130, 40, 100}},
    {20, 10, 10, 100, 30, {23, 9, 11}, {0.05, 0.2, 0.1}, {0, 10, 0}, {80, 80, 160}, {70, 90, 40}},
    {5, 20, 5, 50, 50, {2, 16, 13}, {0, 0, 0}, {0, 0, 10}, {180, 140, 140}, {80, 40, 70}},
    {10, 5, 10, 30, 40, {8, 23, 4}, {0, 0, 0}, {10, 0, 0}, {80, 80, 140}, {100, 110, 60}},
    {20, 5, 5, 120, 100, {7, 22, 13}, {0.1, 0.2, 0.05}, {0, 0, 10}, {140, 80, 80}, {60, 140, 140}},
    {5, 5, 20, 30, 90, {25, 20, 22}, {0, 0, 0}, {10, 10, 0}, {140, 120, 80}, {130, 120, 60}},
    {10, 10, 5, 80, 80, {21, 17, 16}, {0, 0, 0}, {10, 10, 0}, {180, 120, 180}, {30, 70, 120}},
    {5, 20, 5, 90, 30, {21, 18, 21}, {0.2, 0.1, 0.05}, {10, 10, 0}, {180, 100, 100}, {140, 30, 150}},
    {20, 20, 10, 100, 120, {6, 17, 17}, {0, 0, 0}, {10, 10, 0}, {200, 160, 120}, {70, 50, 110}},
    {10, 20, 10, 70, 100, {10, 16, 21}, {0, 0, 0}, {10, 0, 0}, {120, 160, 120}, {150, 60, 120}},
    {5, 20, 5, 80, 120, {13, 2, 29}, {0.1, 0.2, 0.1}, {10, 0, 0}, {80, 160, 180}, {90, 140, 100}},
    {10, 5, 5, 100, 30, {26, 24, 15}, {0, 0, 0}, {0, 0, 10}, {100, 200, 100}, {100, 40, 60}},
    {5, 10, 5, 120, 110, {11, 10, 18}, {0, 0, 0}, {0, 10, 10}, {200, 180, 200}, {120, 40, 100}},
    {10, 5, 20, 30, 80, {19, 19, 16}, {0.2, 0.1, 0.1}, {0, 10, 0}, {200, 200, 80}, {130, 120, 40}},
    {5, 20, 5, 110, 40, {10, 21, 13}, {0, 0, 0}, {10, 10, 0}, {160, 180, 120}, {70, 60, 60}},
    {10, 20, 5, 70, 60, {9, 19, 16}, {0, 0, 0}, {10, 10, 0}, {180, 180, 120}, {40, 50, 120}},
    {20, 20, 20, 20, 60, {11, 7, 11}, {0.1, 0.2, 0.1}, {0, 10, 10}, {80, 160, 140}, {40, 120, 140}},
    {10, 10, 10, 90, 40, {25, 25, 16}, {0, 0, 0}, {0, 0, 10}, {100, 100, 120}, {80, 100, 30}},
    {5, 10, 20, 90, 80, {3, 6, 8}, {0, 0, 0}, {0, 10, 0}, {200, 120, 80}, {140, 60, 110}},
}};

}  // namespace testsupport
