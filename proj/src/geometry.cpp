// SPDX-License-Identifier: Apache-2.0
//
// lsfp-sim: large-scale fading precoding for multi-cell massive MIMO downlink
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "lsfp/geometry.hpp"

#include <cmath>
#include <limits>

#include "lsfp/errors.hpp"

namespace lsfp
{

namespace
{

// Axial coordinates (i, j) on the triangular BS lattice with basis
// u1 = s*(1, 0), u2 = s*(1/2, sqrt(3)/2) and spacing s = sqrt(3)*radius.
Eigen::Vector2d lattice_point(int i, int j, double spacing)
{
    const Eigen::Vector2d u1(spacing, 0.0);
    const Eigen::Vector2d u2(0.5 * spacing, 0.5 * std::sqrt(3.0) * spacing);
    return i * u1 + j * u2;
}

// The six cluster translations are the 60-degree rotations of one axial
// vector with squared lattice norm i^2 + i*j + j^2 = L (7 or 19); rotation
// acts on axial coordinates as (i, j) -> (-j, i + j).
std::vector<Eigen::Vector2d> cluster_translations(int i0, int j0, double spacing)
{
    std::vector<Eigen::Vector2d> out;
    out.emplace_back(Eigen::Vector2d::Zero());
    int i = i0, j = j0;
    for (int r = 0; r < 6; r++) {
        out.emplace_back(lattice_point(i, j, spacing));
        const int ni = -j, nj = i + j;
        i = ni;
        j = nj;
    }
    return out;
}

// Point-in-hexagon for the Voronoi cell of the triangular lattice: the cell
// is bounded by the perpendicular bisectors toward the six neighbors, i.e.
// |d . n| <= spacing/2 for the three neighbor axes n.
bool inside_hexagon(const Eigen::Vector2d &d, double spacing)
{
    const double half = 0.5 * spacing;
    const double c30 = 0.5 * std::sqrt(3.0);
    const Eigen::Vector2d axes[3] = {{1.0, 0.0}, {0.5, c30}, {-0.5, c30}};
    for (const auto &n : axes)
        if (std::abs(d.dot(n)) > half)
            return false;
    return true;
}

}  // namespace

NetworkGeometry build_hex_torus(int cell_count, double cell_radius,
                                double exclusion_radius)
{
    if (cell_count != 7 && cell_count != 19)
        throw ConfigError("unsupported cell count " + std::to_string(cell_count) +
                          ", expected 7 or 19");
    if (cell_radius <= 0.0)
        throw ConfigError("cell radius must be positive");
    if (exclusion_radius < 0.0 || exclusion_radius >= 0.5 * std::sqrt(3.0) * cell_radius)
        throw ConfigError("exclusion radius must lie in [0, hexagon inradius)");

    const double spacing = std::sqrt(3.0) * cell_radius;

    NetworkGeometry geom;
    geom.cell_count = cell_count;
    geom.cell_radius = cell_radius;
    geom.exclusion_radius = exclusion_radius;

    geom.bs_positions.emplace_back(Eigen::Vector2d::Zero());
    // First ring: the six lattice neighbors.
    const int ring1[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
    for (const auto &ij : ring1)
        geom.bs_positions.emplace_back(lattice_point(ij[0], ij[1], spacing));

    if (cell_count == 19) {
        const int ring2[12][2] = {{1, 1},  {-1, 2}, {-2, 1}, {-1, -1}, {1, -2}, {2, -1},
                                  {2, 0},  {0, 2},  {-2, 2}, {-2, 0},  {0, -2}, {2, -2}};
        for (const auto &ij : ring2)
            geom.bs_positions.emplace_back(lattice_point(ij[0], ij[1], spacing));
        geom.wrap_vectors = cluster_translations(3, 2, spacing);
    } else {
        geom.wrap_vectors = cluster_translations(2, 1, spacing);
    }
    return geom;
}

double wrapped_distance(const NetworkGeometry &geom, const Eigen::Vector2d &a,
                        const Eigen::Vector2d &b)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto &w : geom.wrap_vectors)
        best = std::min(best, (a - (b + w)).norm());
    return best;
}

int nearest_bs(const NetworkGeometry &geom, const Eigen::Vector2d &p)
{
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < geom.cell_count; j++) {
        const double d = wrapped_distance(geom, p, geom.bs_positions[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

UserDrop drop_users(const NetworkGeometry &geom, int users_per_cell, Rng &rng)
{
    if (users_per_cell < 1)
        throw ConfigError("users per cell must be >= 1");

    const double spacing = std::sqrt(3.0) * geom.cell_radius;
    const double r = geom.cell_radius;

    UserDrop drop;
    drop.cells = geom.cell_count;
    drop.users = users_per_cell;
    drop.positions.resize(static_cast<size_t>(geom.cell_count) * users_per_cell);

    for (int l = 0; l < geom.cell_count; l++) {
        for (int k = 0; k < users_per_cell; k++) {
            Eigen::Vector2d off;
            do {
                off = {rng.uniform(-r, r), rng.uniform(-r, r)};
            } while (!inside_hexagon(off, spacing) ||
                     off.norm() < geom.exclusion_radius);
            drop.positions[user_index(k, l, geom.cell_count)] =
                geom.bs_positions[l] + off;
        }
    }
    return drop;
}

}  // namespace lsfp
