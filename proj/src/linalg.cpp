#include "sefm/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "sefm/errors.hpp"

namespace sefm {

Mat3 inverse(const Mat3& a) {
    double d = det(a);
    if (std::abs(d) < 1e-300)
        throw DegeneracyError("matrix not invertible");
    Mat3 r;
    r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    r(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    r(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    r(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    r(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return (1.0 / d) * r;
}

/*
 * One-sided Jacobi: rotate column pairs of the working matrix until all
 * pairs are orthogonal. The accumulated rotations form V, the column norms
 * of the final matrix are the singular values, and the normalized columns
 * form U. Converges to near machine precision on the small, well-scaled
 * systems used here (<= a few hundred rows, <= 9 columns).
 */
SvdResult svd(const MatX& a) {
    int m = a.rows();
    int n = a.cols();

    // One-sided Jacobi wants at least as many rows as columns. Padding with
    // zero rows changes neither the singular values nor V.
    int mw = std::max(m, n);
    MatX w(mw, n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) w(r, c) = a(r, c);

    MatX v(n, n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    const double eps = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int r = 0; r < mw; ++r) {
                    app += w(r, p) * w(r, p);
                    aqq += w(r, q) * w(r, q);
                    apq += w(r, p) * w(r, q);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                converged = false;

                double zeta = (aqq - app) / (2.0 * apq);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;

                for (int r = 0; r < mw; ++r) {
                    double wp = w(r, p), wq = w(r, q);
                    w(r, p) = c * wp - s * wq;
                    w(r, q) = s * wp + c * wq;
                }
                for (int r = 0; r < n; ++r) {
                    double vp = v(r, p), vq = v(r, q);
                    v(r, p) = c * vp - s * vq;
                    v(r, q) = s * vp + c * vq;
                }
            }
        }
        if (converged) break;
    }

    // Column norms are the singular values; sort descending.
    std::vector<double> sv(n);
    std::vector<int> order(n);
    for (int c = 0; c < n; ++c) {
        double s2 = 0.0;
        for (int r = 0; r < mw; ++r) s2 += w(r, c) * w(r, c);
        sv[c] = std::sqrt(s2);
        order[c] = c;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return sv[i] > sv[j]; });

    SvdResult res;
    res.u = MatX(m, n);
    res.s.resize(n);
    res.v = MatX(n, n);
    for (int c = 0; c < n; ++c) {
        int src = order[c];
        res.s[c] = sv[src];
        double inv = sv[src] > 0.0 ? 1.0 / sv[src] : 0.0;
        for (int r = 0; r < m; ++r) res.u(r, c) = w(r, src) * inv;
        for (int r = 0; r < n; ++r) res.v(r, c) = v(r, src);
    }
    return res;
}

Svd3Result svd3(const Mat3& a) {
    MatX ax(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ax(i, j) = a(i, j);
    SvdResult r = svd(ax);

    Svd3Result out;
    for (int i = 0; i < 3; ++i) {
        out.s[i] = r.s[i];
        for (int j = 0; j < 3; ++j) {
            out.u(i, j) = r.u(i, j);
            out.v(i, j) = r.v(i, j);
        }
    }
    // Complete U where singular values vanished: the zero columns carry no
    // information, so rebuild them from cross products of valid ones.
    if (norm(out.u.col(2)) < 0.5)
        out.u.set_col(2, normalized(cross(out.u.col(0), out.u.col(1))));
    if (norm(out.u.col(1)) < 0.5)
        out.u.set_col(1, normalized(cross(out.u.col(2), out.u.col(0))));
    return out;
}

Vec3 null_vector3(const Mat3& a) {
    Svd3Result r = svd3(a);
    return r.v.col(2);
}

}  // namespace sefm
