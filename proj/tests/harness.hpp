#pragma once

#include <cmath>
#include <cstdio>

inline int g_checks = 0;
inline int g_failures = 0;

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

#define CHECK(cond)                                                                   \
    do {                                                                              \
        ++g_checks;                                                                   \
        if (!(cond)) {                                                                \
            ++g_failures;                                                             \
            std::printf("FAIL %s:%d  %s\n", __FILE__, __LINE__, #cond);               \
        }                                                                             \
    } while (0)

#define CHECK_CLOSE(a, b, rel)                                                        \
    do {                                                                              \
        ++g_checks;                                                                   \
        const double va_ = (a), vb_ = (b);                                            \
        if (!close_rel(va_, vb_, (rel))) {                                            \
            ++g_failures;                                                             \
            std::printf("FAIL %s:%d  %s = %.17g vs %s = %.17g\n", __FILE__, __LINE__, \
                        #a, va_, #b, vb_);                                            \
        }                                                                             \
    } while (0)

#define CHECK_ABS(a, b, tol)                                                          \
    do {                                                                              \
        ++g_checks;                                                                   \
        const double va_ = (a), vb_ = (b);                                            \
        if (!close_abs(va_, vb_, (tol))) {                                            \
            ++g_failures;                                                             \
            std::printf("FAIL %s:%d  %s = %.17g vs %s = %.17g\n", __FILE__, __LINE__, \
                        #a, va_, #b, vb_);                                            \
        }                                                                             \
    } while (0)

#define CHECK_THROWS(expr, Ex)                                                        \
    do {                                                                              \
        ++g_checks;                                                                   \
        bool caught_ = false;                                                         \
        try {                                                                         \
            (void)(expr);                                                             \
        } catch (const Ex&) {                                                         \
            caught_ = true;                                                           \
        } catch (...) {                                                               \
        }                                                                             \
        if (!caught_) {                                                               \
            ++g_failures;                                                             \
            std::printf("FAIL %s:%d  expected %s from %s\n", __FILE__, __LINE__, #Ex, \
                        #expr);                                                       \
        }                                                                             \
    } while (0)

inline int harness_exit(const char* name) {
    if (g_failures)
        std::printf("%s: %d of %d checks FAILED\n", name, g_failures, g_checks);
    else
        std::printf("%s: %d checks passed\n", name, g_checks);
    return g_failures ? 1 : 0;
}
