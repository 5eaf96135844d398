// Shared plumbing: error types, checked arithmetic, hashing, execution policy.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#define RWSOS_OMP 1
#else
#define RWSOS_OMP 0
#endif

namespace rwsos {

// Batch kernels come in two flavours. Serial is the reference; Parallel
// must produce identical results and is what the tools use by default.
enum class Exec { Serial, Parallel };

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OverflowError : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line, col;
    std::string expected;
    ParseError(int l, int c, std::string exp)
        : Error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                ": expected " + exp),
          line(l), col(c), expected(std::move(exp)) {}
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in +");
    return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer overflow in -");
    return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in *");
    return r;
}

inline void hash_mix(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

inline int max_threads() {
#if RWSOS_OMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace rwsos
