#pragma once

#include <cstdint>
#include <string>

#include "splitlab/errors.hpp"

namespace splitlab {

// Index arithmetic is checked: overflow is a hard error, never wraparound.

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw IndexOverflowError("integer overflow in " + std::to_string(a) + " + " +
                                 std::to_string(b));
    }
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw IndexOverflowError("integer overflow in " + std::to_string(a) + " * " +
                                 std::to_string(b));
    }
    return r;
}

inline std::uint64_t checked_add_u64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw IndexOverflowError("unsigned overflow in " + std::to_string(a) + " + " +
                                 std::to_string(b));
    }
    return r;
}

} // namespace splitlab
