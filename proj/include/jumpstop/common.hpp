#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace jumpstop {

inline constexpr const char* kVersion = "jumpstop-0.1.0";

using Vec = std::vector<double>;

/// Row-major dense matrix, sized on construction.
struct Mat {
    int rows = 0, cols = 0;
    Vec data;
    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}
    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

class InvariantError : public std::runtime_error {
  public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
  public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) {
    double s = 0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

/// Thread cap from JUMPSTOP_THREADS (default: hardware concurrency).
inline unsigned thread_cap() {
    if (const char* env = std::getenv("JUMPSTOP_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Splits [0,n) into contiguous blocks, one per worker. Deterministic
/// regardless of thread count since each index is written exactly once.
inline void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body) {
    unsigned workers = thread_cap();
    if (workers <= 1 || n < 4096) {
        body(0, n);
        return;
    }
    size_t block = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (size_t lo = 0; lo < n; lo += block) {
        size_t hi = std::min(n, lo + block);
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

/// Pairwise-tree sum; association order depends only on the length.
inline double pairwise_sum(const double* x, size_t n) {
    if (n <= 8) {
        double s = 0;
        for (size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace jumpstop
