#pragma once

#include <utility>
#include <vector>

namespace risolve {

using Vector = std::vector<double>;

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double norm_inf(const Vector& a);
void axpy(double alpha, const Vector& x, Vector& y); // y += alpha*x

/// Symmetric sparse matrix in CSR form; both triangles are stored so that
/// multiply() is a plain row sweep.
struct SparseSymmetric {
    int n = 0;
    std::vector<int> row_ptr; // size n+1
    std::vector<int> cols;
    std::vector<double> vals;
    double time_tag = 0.0;

    void multiply(const double* x, double* y) const;
    Vector apply(const Vector& x) const;
    double quadratic(const Vector& x) const; // x·Ax
    double symmetry_defect() const;          // max |a_ij - a_ji|
};

/// Triplet accumulator; duplicate entries are summed on finish().
class SparseBuilder {
public:
    explicit SparseBuilder(int n) : n_(n), rows_(n) {}
    void add(int i, int j, double v) { rows_[i].emplace_back(j, v); }
    SparseSymmetric finish(double time_tag = 0.0) const;

private:
    int n_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradients for SPD systems. x holds the initial guess on entry.
CgResult cg_solve(const SparseSymmetric& a, const Vector& b, Vector& x,
                  double rel_tol, int max_iter);

/// Rayleigh-quotient power iteration with a fixed deterministic start.
double largest_eigenvalue(const SparseSymmetric& a, int iterations = 50);

struct EigResult {
    double value = 0.0;
    Vector vector;
    int iterations = 0;
    bool converged = false;
};

/// Smallest eigenvalue of the SPD pencil (a, b) by inverse power iteration,
/// stopping when the Rayleigh quotient is stationary to rayleigh_tol.
EigResult smallest_generalized_eigenvalue(const SparseSymmetric& a,
                                          const SparseSymmetric& b,
                                          double rayleigh_tol = 1e-10,
                                          int max_iter = 200);

} // namespace risolve
