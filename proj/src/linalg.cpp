#include "risolve/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>

namespace risolve {

double dot(const Vector& a, const Vector& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vector& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

void axpy(double alpha, const Vector& x, Vector& y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void SparseSymmetric::multiply(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
    }
}

Vector SparseSymmetric::apply(const Vector& x) const {
    Vector y(n, 0.0);
    multiply(x.data(), y.data());
    return y;
}

double SparseSymmetric::quadratic(const Vector& x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) row += vals[k] * x[cols[k]];
        s += x[i] * row;
    }
    return s;
}

double SparseSymmetric::symmetry_defect() const {
    std::map<std::pair<int, int>, double> entries;
    for (int i = 0; i < n; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) entries[{i, cols[k]}] = vals[k];
    double defect = 0.0;
    for (const auto& [ij, v] : entries) {
        auto it = entries.find({ij.second, ij.first});
        double vt = (it == entries.end()) ? 0.0 : it->second;
        defect = std::max(defect, std::abs(v - vt));
    }
    return defect;
}

SparseSymmetric SparseBuilder::finish(double time_tag) const {
    SparseSymmetric a;
    a.n = n_;
    a.time_tag = time_tag;
    a.row_ptr.assign(n_ + 1, 0);
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n_; ++i) {
        row.assign(rows_[i].begin(), rows_[i].end());
        std::sort(row.begin(), row.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        int last = -1;
        for (const auto& [j, v] : row) {
            if (j == last) {
                a.vals.back() += v;
            } else {
                a.cols.push_back(j);
                a.vals.push_back(v);
                last = j;
            }
        }
        a.row_ptr[i + 1] = static_cast<int>(a.cols.size());
    }
    return a;
}

CgResult cg_solve(const SparseSymmetric& a, const Vector& b, Vector& x,
                  double rel_tol, int max_iter) {
    CgResult res;
    const int n = a.n;
    if (x.size() != static_cast<std::size_t>(n)) x.assign(n, 0.0);
    Vector r(n), p(n), ap(n);
    a.multiply(x.data(), r.data());
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    p = r;
    double rs = dot(r, r);
    const double bnorm = std::max(norm2(b), 1e-300);
    res.relative_residual = std::sqrt(rs) / bnorm;
    if (res.relative_residual <= rel_tol) {
        res.converged = true;
        return res;
    }
    for (int it = 0; it < max_iter; ++it) {
        a.multiply(p.data(), ap.data());
        const double pap = dot(p, ap);
        if (pap <= 0.0) break; // not SPD (or p exhausted)
        const double alpha = rs / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rs_new = dot(r, r);
        res.iterations = it + 1;
        res.relative_residual = std::sqrt(rs_new) / bnorm;
        if (res.relative_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        const double beta = rs_new / rs;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs = rs_new;
    }
    return res;
}

double largest_eigenvalue(const SparseSymmetric& a, int iterations) {
    const int n = a.n;
    if (n == 0) return 0.0;
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + i); // fixed, not axis-aligned
    Vector y(n);
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        a.multiply(x.data(), y.data());
        const double xx = dot(x, x);
        lambda = dot(x, y) / xx;
        const double yn = norm2(y);
        if (yn == 0.0) return 0.0;
        for (int i = 0; i < n; ++i) x[i] = y[i] / yn;
    }
    return lambda;
}

EigResult smallest_generalized_eigenvalue(const SparseSymmetric& a,
                                          const SparseSymmetric& b,
                                          double rayleigh_tol, int max_iter) {
    EigResult res;
    const int n = a.n;
    Vector x(n, 1.0);
    Vector bx(n), y(n, 0.0);
    double rho_prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        b.multiply(x.data(), bx.data());
        auto cg = cg_solve(a, bx, y, 1e-13, 50 * n + 100);
        if (!cg.converged && cg.relative_residual > 1e-8) return res;
        const double yby = std::sqrt(y.empty() ? 0.0 : std::max(b.quadratic(y), 1e-300));
        for (int i = 0; i < n; ++i) x[i] = y[i] / yby;
        const double rho = a.quadratic(x) / b.quadratic(x);
        res.value = rho;
        res.iterations = it + 1;
        if (it > 0 && std::abs(rho - rho_prev) <= rayleigh_tol * std::abs(rho)) {
            res.converged = true;
            res.vector = x;
            return res;
        }
        rho_prev = rho;
    }
    res.vector = x;
    return res;
}

} // namespace risolve
