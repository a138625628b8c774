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

#ifndef LSFP_GEOMETRY_HPP
#define LSFP_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

#include "lsfp/random.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

// Hexagonal cluster of L cells wrapped into a torus. Distances are taken
// modulo the cluster translation lattice, so every cell sees a statistically
// identical interference environment. All lengths in km.
struct NetworkGeometry
{
    int cell_count = 0;
    double cell_radius = 0.0;      // hexagon circumradius
    double exclusion_radius = 0.0; // no users closer than this to their BS
    std::vector<Eigen::Vector2d> bs_positions;
    std::vector<Eigen::Vector2d> wrap_vectors;  // zero vector + 6 translations
};

// User positions; positions[user_index(k, l, L)] lies inside cell l.
struct UserDrop
{
    int cells = 0;
    int users = 0;
    std::vector<Eigen::Vector2d> positions;
};

// Builds the wrap-around layout for a one-layer (L=7) or two-layer (L=19)
// hexagonal cluster with inter-BS spacing sqrt(3) * cell_radius.
NetworkGeometry build_hex_torus(int cell_count, double cell_radius,
                                double exclusion_radius = 0.0625);

// Torus metric: minimum over wrap images of the Euclidean distance.
double wrapped_distance(const NetworkGeometry &geom, const Eigen::Vector2d &a,
                        const Eigen::Vector2d &b);

// Index of the closest BS under the torus metric, lowest index on ties.
int nearest_bs(const NetworkGeometry &geom, const Eigen::Vector2d &p);

// Uniform positions in each cell's hexagon by rejection sampling, excluding
// the central disk of radius geom.exclusion_radius around the serving BS.
UserDrop drop_users(const NetworkGeometry &geom, int users_per_cell, Rng &rng);

}  // namespace lsfp

#endif
