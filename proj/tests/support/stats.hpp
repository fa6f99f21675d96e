#pragma once

// Small statistics helpers for the test and acceptance suites: linear and
// planar least-squares fits, Pearson correlation, bisquare robust weighting,
// and a Jacobi eigensolver for Hermitian 4x4 matrices (via the real 8x8
// embedding).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace stats {

struct LineFit {
    double intercept = 0, slope = 0;
};

inline LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>* w = nullptr) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
        sxx += wi * x[i] * x[i];
        sxy += wi * x[i] * y[i];
    }
    LineFit fit;
    const double denom = sw * sxx - sx * sx;
    fit.slope = denom != 0 ? (sw * sxy - sx * sy) / denom : 0.0;
    fit.intercept = sw != 0 ? (sy - fit.slope * sx) / sw : 0.0;
    return fit;
}

inline double pearson_r2(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>* w = nullptr) {
    double sw = 0, mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        sw += wi;
        mx += wi * x[i];
        my += wi * y[i];
    }
    mx /= sw;
    my /= sw;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        sxy += wi * (x[i] - mx) * (y[i] - my);
        sxx += wi * (x[i] - mx) * (x[i] - mx);
        syy += wi * (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return 0.0;
    return sxy * sxy / (sxx * syy);
}

// Tukey bisquare iteratively reweighted line fit; returns the final weights.
inline std::vector<double> bisquare_weights(const std::vector<double>& x,
                                            const std::vector<double>& y,
                                            int iterations = 20) {
    std::vector<double> w(x.size(), 1.0);
    for (int it = 0; it < iterations; ++it) {
        const LineFit fit = linear_fit(x, y, &w);
        std::vector<double> abs_res;
        for (std::size_t i = 0; i < x.size(); ++i)
            abs_res.push_back(std::abs(y[i] - fit.intercept - fit.slope * x[i]));
        auto sorted = abs_res;
        std::sort(sorted.begin(), sorted.end());
        const double mad = sorted[sorted.size() / 2];
        const double scale = 6.0 * (mad > 1e-12 ? mad : 1e-12);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = abs_res[i] / scale;
            w[i] = u < 1.0 ? (1 - u * u) * (1 - u * u) : 0.0;
        }
    }
    return w;
}

// Least-squares plane z = c0 + c1*x + c2*y with its coefficient of
// determination.
struct PlaneFit {
    double c0 = 0, c1 = 0, c2 = 0;
    double r2 = 0;
};

inline PlaneFit plane_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& z) {
    const std::size_t n = x.size();
    double a[3][3] = {};
    double b[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3] = {1.0, x[i], y[i]};
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) a[p][q] += row[p] * row[q];
            b[p] += row[p] * z[i];
        }
    }
    // Gaussian elimination with partial pivoting.
    double m[3][4];
    for (int p = 0; p < 3; ++p) {
        for (int q = 0; q < 3; ++q) m[p][q] = a[p][q];
        m[p][3] = b[p];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col || m[col][col] == 0) continue;
            const double f = m[r][col] / m[col][col];
            for (int q = col; q < 4; ++q) m[r][q] -= f * m[col][q];
        }
    }
    PlaneFit fit;
    fit.c0 = m[0][3] / m[0][0];
    fit.c1 = m[1][3] / m[1][1];
    fit.c2 = m[2][3] / m[2][2];

    double mean_z = 0;
    for (double v : z) mean_z += v;
    mean_z /= static_cast<double>(n);
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.c0 + fit.c1 * x[i] + fit.c2 * y[i];
        ss_res += (z[i] - pred) * (z[i] - pred);
        ss_tot += (z[i] - mean_z) * (z[i] - mean_z);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    return fit;
}

// Eigenvalues of a real symmetric matrix by the cyclic Jacobi method.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> m, int n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m[p * n + q] * m[p * n + q];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m[p * n + q]) < 1e-300) continue;
                const double theta = (m[q * n + q] - m[p * n + p]) / (2 * m[p * n + q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m[k * n + p], mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m[p * n + k], mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = m[i * n + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Eigenvalues of a Hermitian 4x4 via the [[Re,-Im],[Im,Re]] embedding
// (each eigenvalue appears twice).
inline std::vector<double> hermitian4_eigenvalues(const std::array<std::complex<double>, 16>& h) {
    std::vector<double> m(64, 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            m[i * 8 + j] = h[i * 4 + j].real();
            m[(i + 4) * 8 + (j + 4)] = h[i * 4 + j].real();
            m[i * 8 + (j + 4)] = -h[i * 4 + j].imag();
            m[(i + 4) * 8 + j] = h[i * 4 + j].imag();
        }
    const auto doubled = symmetric_eigenvalues(std::move(m), 8);
    return {doubled[0], doubled[2], doubled[4], doubled[6]};
}

}  // namespace stats
