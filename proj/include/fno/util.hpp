#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fno {

using cplx = std::complex<double>;

/// Raised when a trivially-regularized evaluation meets a vanishing
/// resonance denominator. Never a silent skip.
struct ResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an evaluation would exceed the configured tuple budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Streaming pairwise (binary-tree) summation. Deterministic for a fixed
/// insertion order; error grows like log(count) ulps instead of count.
template <typename T>
class PairwiseSum {
  public:
    void add(T x) {
        ++count_;
        std::uint64_t c = count_;
        // carry-combine like binary increment: level i holds a sum of 2^i terms
        std::size_t level = 0;
        while ((c & 1u) == 0u) {
            x += partial_[level];
            partial_[level] = T{};
            ++level;
            c >>= 1;
        }
        if (level >= partial_.size()) partial_.resize(level + 1, T{});
        partial_[level] = x;
    }

    T total() const {
        T s{};
        for (auto it = partial_.begin(); it != partial_.end(); ++it) s += *it;
        return s;
    }

    std::uint64_t count() const { return count_; }

  private:
    std::vector<T> partial_;
    std::uint64_t count_ = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97f4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent substream seed from a master seed and a path of
/// indices (component, sample index, ...). Stable across platforms.
inline std::uint64_t substream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x632BE59BD9B4E019ull));
    return s;
}

/// Minimal counter-based generator; deterministic and state-free beyond the
/// counter, so substreams never alias.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97f4A7C15ull;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Uniform in (0,1); never returns 0 or 1.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit(), u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Proper complex gaussian with E|z|^2 = var.
    cplx next_complex_gaussian(double var) {
        double s = std::sqrt(var * 0.5);
        return {s * next_normal(), s * next_normal()};
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Runs fn(i) for i in [0,n) on up to `threads` workers. Work items must be
/// independent; results are expected to land in pre-sized slots so the
/// outcome does not depend on the thread count. The first exception thrown
/// by any item is rethrown on the caller.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (threads == 0) threads = hw ? hw : 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline double relative_residual(double diff, double scale) {
    return diff / (scale + 1e-30);
}

}  // namespace fno
