/*
   Copyright 2026 The glbm Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "glbm/brownmap.hpp"
#include "glbm/matrix.hpp"

namespace glbm {

/// Scalar field on the plane; must be safe to call concurrently.
using ScalarField = std::function<double(cplx)>;

struct Window {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = -1.0;
    double im_max = 1.0;

    double half_extent() const;
    cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    /// Same center, every side scaled by `factor`.
    Window scaled(double factor) const;
    bool contains(cplx z) const;
};

/// Closed polyline; the first vertex is repeated at the end.
struct Polyline {
    std::vector<cplx> vertices;
};

/// Sampled field on a lattice: value(i, j) at re_min + i h, im_min + j h.
struct FieldGrid {
    Window bounds;
    double h = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values; // row-major, ny rows of nx values

    double value(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    cplx point(std::size_t i, std::size_t j) const;
};

/// Sublevel set {field < level} with its traced boundary.
struct Region {
    double level = 0.0;
    FieldGrid grid;
    std::vector<std::uint8_t> membership; // 1 where the lattice value is < level
    std::vector<Polyline> boundary;
    /// Number of boundary curves: interior components plus bounded complement components.
    std::size_t component_count = 0;
    /// Connected components of the sublevel lattice (4-neighbour).
    std::size_t interior_components = 0;
    /// Vertices of a pushed-forward boundary evaluated at an offset point.
    std::size_t flagged_vertices = 0;
    /// Images of sampled interior lattice points, filled by pushforward_region.
    std::vector<cplx> mapped_interior;
};

struct RegionOptions {
    /// Edge-crossing refinement target |field - level|.
    double edge_tol = 1e-6;
    /// Expand the window until the outer lattice ring lies above the level.
    bool auto_expand = true;
    /// Largest admissible half extent after expansion.
    double max_half_extent = 1e4;
    /// Largest admissible lattice size.
    std::size_t max_points = 40'000'000;
    /// Worker threads for lattice evaluation; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// A priori radius of the support domain: max |lambda| e^{2t}, plus padding.
double support_radius_bound(double max_abs_lambda, double t, double padding = 1.0);

/// Traces {field < level} on a lattice of spacing h by marching squares, refining every
/// edge crossing by bisection. Saddle cells follow the cell-center value.
/// Throws window-too-small when expansion would exceed the caps.
Region sigma_region(const ScalarField& field, double level, Window window, double h, const RegionOptions& opts = {});

/// Maps the boundary (and every `interior_stride`-th interior lattice point) through psi_map.
/// Vertices where J is undefined are evaluated at offsets along the local normal and flagged.
Region pushforward_region(const Region& region, const PointCloud& mu, cplx zeta, double eps,
                          std::size_t interior_stride = 0);

/// Support region of B(t, zeta) generated with the +zeta/2 drift: psi with the opposite sign of zeta,
/// so that far from the cloud the region scales by exp(zeta/2) like the process mean.
Region zeta_support_region(const Region& region, const PointCloud& mu, cplx zeta, double eps,
                           std::size_t interior_stride = 0);

/// Even-odd point-in-polygon test over all boundary curves.
bool region_contains(const Region& region, cplx z);
/// Distance from z to the nearest boundary segment.
double boundary_distance(const Region& region, cplx z);

/// Fraction of points inside the region dilated by `margin`.
double containment_fraction(std::span<const cplx> points, const Region& region, double margin);

/// CSV with columns component_id, vertex_index, re, im.
void write_polylines_csv(const Region& region, std::ostream& out);
/// Row-major uint8 membership lattice plus a JSON header with bounds and resolution.
void write_membership_grid(const Region& region, const std::filesystem::path& binary_path,
                           const std::filesystem::path& header_path);

} // namespace glbm
