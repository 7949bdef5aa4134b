#pragma once

// Not-a-knot cubic spline on a uniform lattice, stored as node slopes so that
// evaluation is a cubic Hermite formula on one interval.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

namespace pmc::detail {

/// Node slopes of the not-a-knot spline through y (uniform spacing h, size >= 4).
inline void spline_slopes(const double* y, int m, double h, double* slopes, std::vector<double>& work) {
    // Tridiagonal system:
    //   m0 + 2 m1                 = (5 s0 + s1) / 2
    //   m_{i-1} + 4 m_i + m_{i+1} = 3 (y_{i+1} - y_{i-1}) / h
    //   2 m_{n-2} + m_{n-1}       = (s_{n-3} + 5 s_{n-2}) / 2
    // with s_k = (y_{k+1} - y_k) / h.
    work.resize(2 * static_cast<std::size_t>(m));
    double* cp = work.data();
    double* dp = work.data() + m;
    auto slope = [&](int k) { return (y[k + 1] - y[k]) / h; };

    double b = 1.0, c = 2.0, d = 0.5 * (5.0 * slope(0) + slope(1));
    cp[0] = c / b;
    dp[0] = d / b;
    for (int i = 1; i < m; ++i) {
        double a;
        if (i < m - 1) {
            a = 1.0;
            b = 4.0;
            c = 1.0;
            d = 3.0 * (y[i + 1] - y[i - 1]) / h;
        } else {
            a = 2.0;
            b = 1.0;
            c = 0.0;
            d = 0.5 * (slope(m - 3) + 5.0 * slope(m - 2));
        }
        const double denom = b - a * cp[i - 1];
        cp[i] = c / denom;
        dp[i] = (d - a * dp[i - 1]) / denom;
    }
    slopes[m - 1] = dp[m - 1];
    for (int i = m - 2; i >= 0; --i) slopes[i] = dp[i] - cp[i] * slopes[i + 1];
}

/// Interval index and local coordinate t in [0, 1] for height s.
inline int locate(double s, double first, double h, int m, double& t) {
    const double u = (s - first) / h;
    int j = static_cast<int>(std::floor(u));
    j = std::clamp(j, 0, m - 2);
    t = u - j;
    return j;
}

inline double hermite_value(double y0, double y1, double m0, double m1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

inline double hermite_derivative(double y0, double y1, double m0, double m1, double h, double t) {
    const double t2 = t * t;
    return (6 * t2 - 6 * t) * (y0 - y1) / h + (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1;
}

}  // namespace pmc::detail
