#pragma once

#include "risolve/linalg.hpp"
#include "risolve/mesh.hpp"
#include "risolve/model.hpp"

#include <functional>
#include <memory>

namespace risolve {

/// P1 space with homogeneous Dirichlet conditions: boundary vertices are
/// eliminated, coefficients are node-major blocks of m components.
struct FemSpace {
    SimplicialMesh mesh;
    int m = 1;
    std::vector<int> vertex_to_node; // -1 on boundary vertices
    std::vector<int> node_to_vertex;
    int n_nodes = 0;

    int n_dofs() const { return n_nodes * m; }
};

FemSpace make_space(SimplicialMesh mesh, int m = 1);

struct NodalField {
    Vector coeffs; // n_nodes*m
    double time = 0.0;
};

/// Spatial function with gradient, sampled during projections and error
/// measurement; component-valued.
struct SpatialFunction {
    std::function<double(std::span<const double> x, int comp)> value;
    std::function<double(std::span<const double> x, int comp, int dir)> gradient;
};

// assembly

SparseSymmetric assemble_stiffness(const FemSpace& space, const EllipticTensor& tensor, double t);
SparseSymmetric assemble_mass(const FemSpace& space); // scalar (per-node), applied blockwise
Vector lumped_mass(const FemSpace& space);            // per-node weights, all > 0
/// Consistent-mass load of the nodal interpolant of f(t,·).
Vector assemble_load(const FemSpace& space, const ForceField& force, double t);
/// Apply the scalar mass matrix blockwise to an m-component coefficient vector.
Vector apply_mass_blockwise(const FemSpace& space, const SparseSymmetric& mass, const Vector& v);

// projections and discrete operators

/// Ritz projector at time t: A_t-weighted elliptic projection onto the space.
NodalField ritz_project(const FemSpace& space, const SpatialFunction& g,
                        const EllipticTensor& tensor, double t);
/// Initial projector (the Ritz projector frozen at t = 0).
NodalField elliptic_project_initial(const FemSpace& space, const SpatialFunction& u0,
                                    const EllipticTensor& tensor);

/// Discrete elliptic operator: the nodewise (lumped) Riesz representative of
/// phi -> -a_t(z, phi). With this sign -L is induced by an SPD form.
NodalField discrete_operator_L(const FemSpace& space, const NodalField& z,
                               const EllipticTensor& tensor, double t);
/// Discrete Green operator: solves a_t(x, phi) = (z, phi)_lumped. Inverse of
/// L up to the sign convention: G(L z) = L(G z) = -z.
NodalField discrete_green_G(const FemSpace& space, const NodalField& z,
                            const EllipticTensor& tensor, double t);

// norms of the P1 interpolant (zero-extended to the boundary)

double l2_norm(const FemSpace& space, const NodalField& v);
double h1_seminorm(const FemSpace& space, const NodalField& v);
double lp_norm(const FemSpace& space, const NodalField& v, int p); // p in {2,4,6}
double grad_lp_norm(const FemSpace& space, const NodalField& v, int p); // cellwise-constant gradients, any p>=1

/// L2 / H1-seminorm errors of a nodal field against a smooth function,
/// measured with a dense per-cell quadrature.
struct FieldError {
    double l2 = 0.0;
    double h1_semi = 0.0;
};
FieldError field_error(const FemSpace& space, const NodalField& v, const SpatialFunction& g);

/// Point evaluation of the zero-extended P1 interpolant.
double evaluate_field(const FemSpace& space, const NodalField& v, const double* x, int comp = 0);

/// Nodal interpolation of a spatial function onto the interior dofs.
NodalField interpolate(const FemSpace& space, const SpatialFunction& g);

/// Numerical Poincare constant: 1/sqrt(lambda_min) of the pencil
/// (unit-tensor stiffness, consistent mass) on the zero-trace space.
double poincare_constant(const FemSpace& space, int max_iterations = 200);
/// Same eigen-solve, returning the eigenvector too (used as an ascent seed).
EigResult poincare_eigenpair(const FemSpace& space, int max_iterations = 200);

/// Coordinate-triplet dump, one "i j value" line per entry.
void dump_matrix_triplets(const SparseSymmetric& a, std::ostream& os);

// solver settings shared by the elliptic solves
inline constexpr double kCgRelTol = 1e-12;
inline int cg_iteration_cap(int n) { return 20 * n + 50; }

} // namespace risolve
