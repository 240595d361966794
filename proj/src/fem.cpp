#include "risolve/fem.hpp"

#include "risolve/errors.hpp"

#include <cmath>
#include <ostream>

namespace risolve {

namespace {

struct QuadPoint {
    std::array<double, 3> bary;
    double weight; // relative to cell volume
};

// A is evaluated with these short rules: exact for affine coefficients
// against P1 gradients, which keeps the quadrature error below the scheme's
// rate.
const std::vector<QuadPoint>& assembly_rule(int dim) {
    static const std::vector<QuadPoint> line = {{{0.5, 0.5, 0.0}, 1.0}};
    static const std::vector<QuadPoint> tri = {
        {{0.5, 0.5, 0.0}, 1.0 / 3.0},
        {{0.0, 0.5, 0.5}, 1.0 / 3.0},
        {{0.5, 0.0, 0.5}, 1.0 / 3.0},
    };
    return dim == 1 ? line : tri;
}

// dense rules for smooth integrands and L^p norms of P1 fields:
// Gauss-Legendre(5) on segments (degree 9), 12-point degree-6 rule on
// triangles
const std::vector<QuadPoint>& dense_rule(int dim) {
    static const std::vector<QuadPoint> line = [] {
        const double xs[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                              0.9061798459386640, -0.9061798459386640};
        const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
        std::vector<QuadPoint> r;
        for (int i = 0; i < 5; ++i) {
            const double x = 0.5 * (1.0 + xs[i]);
            r.push_back({{1.0 - x, x, 0.0}, 0.5 * ws[i]});
        }
        return r;
    }();
    static const std::vector<QuadPoint> tri = [] {
        std::vector<QuadPoint> r;
        auto add3 = [&r](double a, double b, double w) {
            r.push_back({{a, b, b}, w});
            r.push_back({{b, a, b}, w});
            r.push_back({{b, b, a}, w});
        };
        auto add6 = [&r](double a, double b, double c, double w) {
            r.push_back({{a, b, c}, w});
            r.push_back({{a, c, b}, w});
            r.push_back({{b, a, c}, w});
            r.push_back({{b, c, a}, w});
            r.push_back({{c, a, b}, w});
            r.push_back({{c, b, a}, w});
        };
        add3(0.873821971016996, 0.063089014491502, 0.050844906370207);
        add3(0.501426509658179, 0.249286745170910, 0.116786275726379);
        add6(0.636502499121399, 0.310352451033785, 0.053145049844816, 0.082851075618374);
        return r;
    }();
    return dim == 1 ? line : tri;
}

void quad_position(const SimplicialMesh& mesh, int c, const QuadPoint& q, double* x) {
    const auto& cell = mesh.cells[c];
    const int nv = mesh.vertices_per_cell();
    x[0] = x[1] = 0.0;
    for (int a = 0; a < nv; ++a) {
        x[0] += q.bary[a] * mesh.vertices[cell[a]][0];
        x[1] += q.bary[a] * mesh.vertices[cell[a]][1];
    }
}

// values of the m components of the zero-extended field at the cell vertices
void gather_cell_values(const FemSpace& space, const NodalField& v, int c,
                        std::array<std::array<double, 4>, 3>& vals) {
    const auto& cell = space.mesh.cells[c];
    const int nv = space.mesh.vertices_per_cell();
    for (int a = 0; a < nv; ++a) {
        const int node = space.vertex_to_node[cell[a]];
        for (int comp = 0; comp < space.m; ++comp)
            vals[a][comp] = (node >= 0) ? v.coeffs[node * space.m + comp] : 0.0;
    }
}

} // namespace

FemSpace make_space(SimplicialMesh mesh, int m) {
    FemSpace s;
    s.m = m;
    s.vertex_to_node.assign(mesh.num_vertices(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (!mesh.boundary[v]) {
            s.vertex_to_node[v] = s.n_nodes++;
            s.node_to_vertex.push_back(v);
        }
    }
    s.mesh = std::move(mesh);
    return s;
}

SparseSymmetric assemble_stiffness(const FemSpace& space, const EllipticTensor& tensor, double t) {
    const auto& mesh = space.mesh;
    const int m = space.m;
    const int d = mesh.dim;
    if (tensor.d != d || tensor.m < m)
        throw Error("assemble_stiffness: tensor dimensions do not match the space");
    const int md = tensor.m * d; // tensor block stride; only the first m components are read
    const int nv = mesh.vertices_per_cell();
    SparseBuilder builder(space.n_dofs());
    const auto& rule = assembly_rule(d);
    std::vector<double> a(md * md), a_avg(md * md);
    std::array<std::array<double, 2>, 3> grads;
    double x[2];
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        mesh.cell_gradients(c, grads);
        std::fill(a_avg.begin(), a_avg.end(), 0.0);
        for (const auto& q : rule) {
            quad_position(mesh, c, q, x);
            tensor.evaluate(t, std::span<const double>(x, d), a);
            for (int k = 0; k < md * md; ++k) a_avg[k] += q.weight * a[k];
        }
        const auto& cell = mesh.cells[c];
        for (int i = 0; i < nv; ++i) {
            const int ni = space.vertex_to_node[cell[i]];
            if (ni < 0) continue;
            for (int j = 0; j < nv; ++j) {
                const int nj = space.vertex_to_node[cell[j]];
                if (nj < 0) continue;
                for (int alpha = 0; alpha < m; ++alpha)
                    for (int beta = 0; beta < m; ++beta) {
                        double entry = 0.0;
                        for (int aa = 0; aa < d; ++aa)
                            for (int bb = 0; bb < d; ++bb)
                                entry += grads[i][aa] * a_avg[(alpha * d + aa) * md + (beta * d + bb)] *
                                         grads[j][bb];
                        builder.add(ni * m + alpha, nj * m + beta, vol * entry);
                    }
            }
        }
    }
    return builder.finish(t);
}

SparseSymmetric assemble_mass(const FemSpace& space) {
    const auto& mesh = space.mesh;
    const int nv = mesh.vertices_per_cell();
    SparseBuilder builder(space.n_nodes);
    const double diag = (mesh.dim == 1) ? 1.0 / 3.0 : 1.0 / 6.0;
    const double off = (mesh.dim == 1) ? 1.0 / 6.0 : 1.0 / 12.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        const auto& cell = mesh.cells[c];
        for (int i = 0; i < nv; ++i) {
            const int ni = space.vertex_to_node[cell[i]];
            if (ni < 0) continue;
            for (int j = 0; j < nv; ++j) {
                const int nj = space.vertex_to_node[cell[j]];
                if (nj < 0) continue;
                builder.add(ni, nj, vol * (i == j ? diag : off));
            }
        }
    }
    return builder.finish();
}

Vector lumped_mass(const FemSpace& space) {
    const auto& mesh = space.mesh;
    const int nv = mesh.vertices_per_cell();
    Vector w(space.n_nodes, 0.0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double share = mesh.cell_volume(c) / nv;
        const auto& cell = mesh.cells[c];
        for (int i = 0; i < nv; ++i) {
            const int ni = space.vertex_to_node[cell[i]];
            if (ni >= 0) w[ni] += share;
        }
    }
    return w;
}

Vector assemble_load(const FemSpace& space, const ForceField& force, double t) {
    const auto& mesh = space.mesh;
    const int m = space.m;
    const int nv = mesh.vertices_per_cell();
    // nodal interpolant of f(t,·) at every vertex, then the consistent mass
    // cellwise
    std::vector<double> f_all(mesh.num_vertices() * m);
    std::vector<double> fv(m);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        force.evaluate(t, std::span<const double>(mesh.vertices[v].data(), mesh.dim), fv);
        for (int comp = 0; comp < m; ++comp) f_all[v * m + comp] = fv[comp];
    }
    const double diag = (mesh.dim == 1) ? 1.0 / 3.0 : 1.0 / 6.0;
    const double off = (mesh.dim == 1) ? 1.0 / 6.0 : 1.0 / 12.0;
    Vector b(space.n_dofs(), 0.0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        const auto& cell = mesh.cells[c];
        for (int i = 0; i < nv; ++i) {
            const int ni = space.vertex_to_node[cell[i]];
            if (ni < 0) continue;
            for (int j = 0; j < nv; ++j)
                for (int comp = 0; comp < m; ++comp)
                    b[ni * m + comp] += vol * (i == j ? diag : off) * f_all[cell[j] * m + comp];
        }
    }
    return b;
}

Vector apply_mass_blockwise(const FemSpace& space, const SparseSymmetric& mass, const Vector& v) {
    const int m = space.m;
    Vector out(v.size(), 0.0);
    for (int i = 0; i < mass.n; ++i)
        for (int k = mass.row_ptr[i]; k < mass.row_ptr[i + 1]; ++k) {
            const int j = mass.cols[k];
            for (int comp = 0; comp < m; ++comp)
                out[i * m + comp] += mass.vals[k] * v[j * m + comp];
        }
    return out;
}

namespace {

Vector ritz_rhs(const FemSpace& space, const SpatialFunction& g, const EllipticTensor& tensor,
                double t) {
    const auto& mesh = space.mesh;
    const int m = space.m;
    const int d = mesh.dim;
    if (tensor.d != d || tensor.m < m)
        throw Error("ritz_project: tensor dimensions do not match the space");
    const int md = tensor.m * d;
    const int nv = mesh.vertices_per_cell();
    const auto& rule = dense_rule(d);
    Vector rhs(space.n_dofs(), 0.0);
    std::vector<double> a(md * md), dg(md);
    std::array<std::array<double, 2>, 3> grads;
    double x[2];
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        mesh.cell_gradients(c, grads);
        const auto& cell = mesh.cells[c];
        for (const auto& q : rule) {
            quad_position(mesh, c, q, x);
            const std::span<const double> xs(x, d);
            tensor.evaluate(t, xs, a);
            for (int alpha = 0; alpha < m; ++alpha)
                for (int i = 0; i < d; ++i) dg[alpha * d + i] = g.gradient(xs, alpha, i);
            for (int j = 0; j < nv; ++j) {
                const int nj = space.vertex_to_node[cell[j]];
                if (nj < 0) continue;
                for (int beta = 0; beta < m; ++beta) {
                    double s = 0.0;
                    for (int alpha = 0; alpha < m; ++alpha)
                        for (int i = 0; i < d; ++i)
                            for (int b = 0; b < d; ++b)
                                s += dg[alpha * d + i] * a[(alpha * d + i) * md + (beta * d + b)] *
                                     grads[j][b];
                    rhs[nj * m + beta] += vol * q.weight * s;
                }
            }
        }
    }
    return rhs;
}

} // namespace

NodalField ritz_project(const FemSpace& space, const SpatialFunction& g,
                        const EllipticTensor& tensor, double t) {
    const SparseSymmetric k = assemble_stiffness(space, tensor, t);
    const Vector rhs = ritz_rhs(space, g, tensor, t);
    NodalField out;
    out.time = t;
    out.coeffs.assign(space.n_dofs(), 0.0);
    const auto cg = cg_solve(k, rhs, out.coeffs, kCgRelTol, cg_iteration_cap(space.n_dofs()));
    if (!cg.converged)
        throw LinearSolveFailure("ritz_project: CG stalled at relative residual " +
                                 std::to_string(cg.relative_residual));
    return out;
}

NodalField elliptic_project_initial(const FemSpace& space, const SpatialFunction& u0,
                                    const EllipticTensor& tensor) {
    return ritz_project(space, u0, tensor, 0.0);
}

NodalField discrete_operator_L(const FemSpace& space, const NodalField& z,
                               const EllipticTensor& tensor, double t) {
    const SparseSymmetric k = assemble_stiffness(space, tensor, t);
    const Vector w = lumped_mass(space);
    NodalField out;
    out.time = t;
    out.coeffs = k.apply(z.coeffs);
    for (int i = 0; i < space.n_nodes; ++i)
        for (int comp = 0; comp < space.m; ++comp) out.coeffs[i * space.m + comp] /= -w[i];
    return out;
}

NodalField discrete_green_G(const FemSpace& space, const NodalField& z,
                            const EllipticTensor& tensor, double t) {
    const SparseSymmetric k = assemble_stiffness(space, tensor, t);
    const Vector w = lumped_mass(space);
    Vector rhs(space.n_dofs());
    for (int i = 0; i < space.n_nodes; ++i)
        for (int comp = 0; comp < space.m; ++comp)
            rhs[i * space.m + comp] = w[i] * z.coeffs[i * space.m + comp];
    NodalField out;
    out.time = t;
    out.coeffs.assign(space.n_dofs(), 0.0);
    const auto cg = cg_solve(k, rhs, out.coeffs, kCgRelTol, cg_iteration_cap(space.n_dofs()));
    if (!cg.converged)
        throw LinearSolveFailure("discrete_green_G: CG stalled at relative residual " +
                                 std::to_string(cg.relative_residual));
    return out;
}

double lp_norm(const FemSpace& space, const NodalField& v, int p) {
    if (p != 2 && p != 4 && p != 6)
        throw UnsupportedExponent("lp_norm supports p in {2,4,6}, got " + std::to_string(p));
    const auto& mesh = space.mesh;
    const int nv = mesh.vertices_per_cell();
    const auto& rule = dense_rule(mesh.dim);
    std::array<std::array<double, 4>, 3> vals;
    double acc = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        gather_cell_values(space, v, c, vals);
        for (const auto& q : rule) {
            double s2 = 0.0;
            for (int comp = 0; comp < space.m; ++comp) {
                double val = 0.0;
                for (int a = 0; a < nv; ++a) val += q.bary[a] * vals[a][comp];
                s2 += val * val;
            }
            acc += vol * q.weight * std::pow(s2, p / 2.0);
        }
    }
    return std::pow(acc, 1.0 / p);
}

double l2_norm(const FemSpace& space, const NodalField& v) { return lp_norm(space, v, 2); }

double h1_seminorm(const FemSpace& space, const NodalField& v) {
    return grad_lp_norm(space, v, 2);
}

double grad_lp_norm(const FemSpace& space, const NodalField& v, int p) {
    if (p < 1) throw UnsupportedExponent("grad_lp_norm: p must be >= 1");
    const auto& mesh = space.mesh;
    const int nv = mesh.vertices_per_cell();
    std::array<std::array<double, 2>, 3> grads;
    std::array<std::array<double, 4>, 3> vals;
    double acc = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        mesh.cell_gradients(c, grads);
        gather_cell_values(space, v, c, vals);
        double frob2 = 0.0;
        for (int comp = 0; comp < space.m; ++comp)
            for (int i = 0; i < mesh.dim; ++i) {
                double gi = 0.0;
                for (int a = 0; a < nv; ++a) gi += vals[a][comp] * grads[a][i];
                frob2 += gi * gi;
            }
        acc += vol * std::pow(frob2, p / 2.0);
    }
    return std::pow(acc, 1.0 / p);
}

FieldError field_error(const FemSpace& space, const NodalField& v, const SpatialFunction& g) {
    const auto& mesh = space.mesh;
    const int nv = mesh.vertices_per_cell();
    const auto& rule = dense_rule(mesh.dim);
    std::array<std::array<double, 2>, 3> grads;
    std::array<std::array<double, 4>, 3> vals;
    double x[2];
    double l2 = 0.0, h1 = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        mesh.cell_gradients(c, grads);
        gather_cell_values(space, v, c, vals);
        for (const auto& q : rule) {
            quad_position(mesh, c, q, x);
            const std::span<const double> xs(x, mesh.dim);
            for (int comp = 0; comp < space.m; ++comp) {
                double val = 0.0;
                for (int a = 0; a < nv; ++a) val += q.bary[a] * vals[a][comp];
                const double e = val - g.value(xs, comp);
                l2 += vol * q.weight * e * e;
                for (int i = 0; i < mesh.dim; ++i) {
                    double gi = 0.0;
                    for (int a = 0; a < nv; ++a) gi += vals[a][comp] * grads[a][i];
                    const double eg = gi - g.gradient(xs, comp, i);
                    h1 += vol * q.weight * eg * eg;
                }
            }
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

double evaluate_field(const FemSpace& space, const NodalField& v, const double* x, int comp) {
    std::array<double, 3> bary;
    const int c = space.mesh.locate(x, bary);
    const auto& cell = space.mesh.cells[c];
    double val = 0.0;
    for (int a = 0; a < space.mesh.vertices_per_cell(); ++a) {
        const int node = space.vertex_to_node[cell[a]];
        if (node >= 0) val += bary[a] * v.coeffs[node * space.m + comp];
    }
    return val;
}

NodalField interpolate(const FemSpace& space, const SpatialFunction& g) {
    NodalField out;
    out.coeffs.assign(space.n_dofs(), 0.0);
    for (int i = 0; i < space.n_nodes; ++i) {
        const auto& xy = space.mesh.vertices[space.node_to_vertex[i]];
        const std::span<const double> xs(xy.data(), space.mesh.dim);
        for (int comp = 0; comp < space.m; ++comp)
            out.coeffs[i * space.m + comp] = g.value(xs, comp);
    }
    return out;
}

EigResult poincare_eigenpair(const FemSpace& space, int max_iterations) {
    // scalar pencil; the constant is component-independent
    FemSpace scalar = (space.m == 1) ? space : make_space(space.mesh, 1);
    const SparseSymmetric k = assemble_stiffness(scalar, identity_tensor(space.mesh.dim, 1), 0.0);
    const SparseSymmetric mass = assemble_mass(scalar);
    EigResult eig = smallest_generalized_eigenvalue(k, mass, 1e-10, max_iterations);
    if (!eig.converged)
        throw EigenSolveFailure("poincare_constant: inverse iteration did not converge in " +
                                std::to_string(max_iterations) + " iterations");
    return eig;
}

double poincare_constant(const FemSpace& space, int max_iterations) {
    return 1.0 / std::sqrt(poincare_eigenpair(space, max_iterations).value);
}

void dump_matrix_triplets(const SparseSymmetric& a, std::ostream& os) {
    for (int i = 0; i < a.n; ++i)
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            os << i << " " << a.cols[k] << " " << a.vals[k] << "\n";
}

} // namespace risolve
