#include "risolve/mesh.hpp"

#include "risolve/errors.hpp"

#include <algorithm>
#include <cmath>

namespace risolve {

double SimplicialMesh::cell_volume(int c) const {
    const auto& cell = cells[c];
    if (dim == 1) {
        return std::abs(vertices[cell[1]][0] - vertices[cell[0]][0]);
    }
    const auto& a = vertices[cell[0]];
    const auto& b = vertices[cell[1]];
    const auto& d = vertices[cell[2]];
    return 0.5 * std::abs((b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]));
}

double SimplicialMesh::cell_diameter(int c) const {
    const auto& cell = cells[c];
    const int nv = vertices_per_cell();
    double diam = 0.0;
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j) {
            const double dx = vertices[cell[i]][0] - vertices[cell[j]][0];
            const double dy = vertices[cell[i]][1] - vertices[cell[j]][1];
            diam = std::max(diam, std::hypot(dx, dy));
        }
    return diam;
}

double SimplicialMesh::total_volume() const {
    double v = 0.0;
    for (int c = 0; c < num_cells(); ++c) v += cell_volume(c);
    return v;
}

void SimplicialMesh::cell_gradients(int c, std::array<std::array<double, 2>, 3>& grads) const {
    const auto& cell = cells[c];
    if (dim == 1) {
        const double len = vertices[cell[1]][0] - vertices[cell[0]][0];
        grads[0] = {-1.0 / len, 0.0};
        grads[1] = {1.0 / len, 0.0};
        grads[2] = {0.0, 0.0};
        return;
    }
    const auto& a = vertices[cell[0]];
    const auto& b = vertices[cell[1]];
    const auto& d = vertices[cell[2]];
    const double det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
    // gradient of barycentric coordinate of each vertex
    grads[0] = {(b[1] - d[1]) / det, (d[0] - b[0]) / det};
    grads[1] = {(d[1] - a[1]) / det, (a[0] - d[0]) / det};
    grads[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
}

int SimplicialMesh::locate(const double* x, std::array<double, 3>& bary) const {
    const int n = grid_n;
    if (dim == 1) {
        int i = std::clamp(static_cast<int>(std::floor(x[0] * n)), 0, n - 1);
        const double xi = x[0] * n - i;
        bary = {1.0 - xi, xi, 0.0};
        return i;
    }
    int i = std::clamp(static_cast<int>(std::floor(x[0] * n)), 0, n - 1);
    int j = std::clamp(static_cast<int>(std::floor(x[1] * n)), 0, n - 1);
    const double xi = x[0] * n - i;
    const double eta = x[1] * n - j;
    // quad (i,j) is split along the (i,j)-(i+1,j+1) diagonal; lower triangle
    // is {(i,j),(i+1,j),(i+1,j+1)}, upper is {(i,j),(i+1,j+1),(i,j+1)}
    const int c = 2 * (j * n + i);
    if (xi >= eta) {
        bary = {1.0 - xi, xi - eta, eta};
        return c;
    }
    bary = {1.0 - eta, xi, eta - xi};
    return c + 1;
}

SimplicialMesh unit_interval(int n) {
    if (n < 2) throw Error("unit_interval: n must be >= 2");
    SimplicialMesh m;
    m.dim = 1;
    m.grid_n = n;
    m.vertices.resize(n + 1);
    m.boundary.assign(n + 1, 0);
    for (int i = 0; i <= n; ++i) m.vertices[i] = {static_cast<double>(i) / n, 0.0};
    m.boundary[0] = m.boundary[n] = 1;
    m.cells.resize(n);
    for (int i = 0; i < n; ++i) m.cells[i] = {i, i + 1, -1};
    m.h = 1.0 / n;
    m.rho = 1.0;
    return m;
}

SimplicialMesh unit_square(int n) {
    if (n < 2) throw Error("unit_square: n must be >= 2");
    SimplicialMesh m;
    m.dim = 2;
    m.grid_n = n;
    const int nv = (n + 1) * (n + 1);
    m.vertices.resize(nv);
    m.boundary.assign(nv, 0);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const int v = j * (n + 1) + i;
            m.vertices[v] = {static_cast<double>(i) / n, static_cast<double>(j) / n};
            if (i == 0 || i == n || j == 0 || j == n) m.boundary[v] = 1;
        }
    m.cells.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int v00 = j * (n + 1) + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + (n + 1);
            const int v11 = v01 + 1;
            m.cells.push_back({v00, v10, v11});
            m.cells.push_back({v00, v11, v01});
        }
    m.h = std::sqrt(2.0) / n;
    m.rho = 1.0;
    return m;
}

SimplicialMesh refine(const SimplicialMesh& mesh) {
    // structured meshes only, so red refinement is regeneration at 2n
    return mesh.dim == 1 ? unit_interval(2 * mesh.grid_n) : unit_square(2 * mesh.grid_n);
}

} // namespace risolve
