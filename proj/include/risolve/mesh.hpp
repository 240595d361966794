#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace risolve {

/// Structured simplicial mesh of the unit interval (dim 1) or the unit
/// square (dim 2, right-diagonal triangulation). grid_n is the number of
/// intervals per axis; vertices are ordered lexicographically so point
/// location stays index arithmetic.
struct SimplicialMesh {
    int dim = 1;
    int grid_n = 0;
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 3>> cells; // segments use slots 0..1
    std::vector<std::uint8_t> boundary;    // per-vertex flag
    double h = 0.0;                        // max cell diameter
    double rho = 1.0;                      // max/min cell diameter

    int vertices_per_cell() const { return dim + 1; }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }
    double cell_volume(int c) const;
    double cell_diameter(int c) const;
    double total_volume() const;

    /// Cellwise-constant gradients of the local P1 hat functions,
    /// grads[a][i] = ∂_i φ_a on cell c.
    void cell_gradients(int c, std::array<std::array<double, 2>, 3>& grads) const;

    /// Cell containing x (structured lookup) plus barycentric weights of the
    /// cell vertices at x.
    int locate(const double* x, std::array<double, 3>& bary) const;
};

SimplicialMesh unit_interval(int n);
SimplicialMesh unit_square(int n);

/// Uniform refinement halving h; old vertex positions are kept.
SimplicialMesh refine(const SimplicialMesh& mesh);

} // namespace risolve
