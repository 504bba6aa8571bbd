#pragma once

// Program sources used as executable fixtures across the test suite, kept
// byte-faithful to their published prompt listings (blank lines included).

namespace fixtures {

inline constexpr const char* kMultiLatentInterventional = R"(def generated_func_1273(x, r1, r2, r3):

    prep = x + (r2 - r3)

    if x != r1:
        result = x + r2
        for i in range(6):
            pass
        result = result = x * r1
    else:
        result = x + r3
        for j in range(2):
            pass
        result = result = x + r3

    result = result + (r1 - r2 - r3)
    return result
)";

inline constexpr const char* kWhileCounterfactual = R"(def generated_func_997660_100(x, r):

    primary_sum = 0
    secondary_sum = 0
    counter = 0

    while counter < x:
        primary_sum += r + counter
        secondary_sum += counter * 2

        if primary_sum > secondary_sum:
            primary_sum -= 5

        counter += 1

    return (primary_sum + secondary_sum) // 5
)";

// This listing ships with a decorative import line, which the parser strips.
inline constexpr const char* kMultiLatentCounterfactual = R"(import random

def generated_func_1136(x, r1, r2, r3):

    prep = x * (r2 + r3)

    if x == r1:
        result = x * r3
        for i in range(2):
            pass
        result = result = x + r2
    else:
        result = x - r2
        for j in range(6):
            pass
        result = result = x + r1

    result = result * (r1 + r2 * r3)
    return result
)";

}  // namespace fixtures
