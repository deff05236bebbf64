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

#include "glbm/region.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "glbm/error.hpp"
#include "glbm/numfmt.hpp"

namespace glbm {

namespace {

constexpr std::size_t kBisectionLimit = 200;

FieldGrid make_grid(const Window& w, double h) {
    FieldGrid g;
    g.h = h;
    g.nx = static_cast<std::size_t>(std::ceil((w.re_max - w.re_min) / h - 1e-9)) + 1;
    g.ny = static_cast<std::size_t>(std::ceil((w.im_max - w.im_min) / h - 1e-9)) + 1;
    g.bounds = {w.re_min, w.re_min + static_cast<double>(g.nx - 1) * h, w.im_min,
                w.im_min + static_cast<double>(g.ny - 1) * h};
    return g;
}

void evaluate_grid(FieldGrid& g, const ScalarField& field, unsigned threads) {
    g.values.assign(g.nx * g.ny, 0.0);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, g.ny));
    std::atomic<std::size_t> next_row{0};
    auto work = [&] {
        for (std::size_t j = next_row++; j < g.ny; j = next_row++)
            for (std::size_t i = 0; i < g.nx; ++i) g.values[j * g.nx + i] = field(g.point(i, j));
    };
    if (threads <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

bool ring_above(const FieldGrid& g, double level) {
    for (std::size_t i = 0; i < g.nx; ++i)
        if (!(g.value(i, 0) > level) || !(g.value(i, g.ny - 1) > level)) return false;
    for (std::size_t j = 0; j < g.ny; ++j)
        if (!(g.value(0, j) > level) || !(g.value(g.nx - 1, j) > level)) return false;
    return true;
}

// Flood fill over cells with membership == want. Returns (components, components touching the border).
std::pair<std::size_t, std::size_t> count_components(const std::vector<std::uint8_t>& member, std::size_t nx,
                                                     std::size_t ny, std::uint8_t want, bool eight_neighbours) {
    std::vector<std::uint8_t> seen(member.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t comps = 0;
    std::size_t touching = 0;
    for (std::size_t start = 0; start < member.size(); ++start) {
        if (member[start] != want || seen[start]) continue;
        ++comps;
        bool border = false;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            const std::size_t i = cur % nx;
            const std::size_t j = cur / nx;
            if (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) border = true;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    if (!eight_neighbours && di != 0 && dj != 0) continue;
                    const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                    const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(nx) ||
                        jj >= static_cast<std::ptrdiff_t>(ny))
                        continue;
                    const std::size_t nb = static_cast<std::size_t>(jj) * nx + static_cast<std::size_t>(ii);
                    if (member[nb] == want && !seen[nb]) {
                        seen[nb] = 1;
                        stack.push_back(nb);
                    }
                }
            }
        }
        if (border) ++touching;
    }
    return {comps, touching};
}

class Tracer {
public:
    Tracer(const FieldGrid& g, const std::vector<std::uint8_t>& member, const ScalarField& field, double level,
           double tol)
        : g_(g), member_(member), field_(field), level_(level), tol_(tol) {}

    std::vector<Polyline> trace() {
        for (std::size_t j = 0; j + 1 < g_.ny; ++j)
            for (std::size_t i = 0; i + 1 < g_.nx; ++i) cell(i, j);
        return chain();
    }

private:
    // Horizontal edge (i,j)-(i+1,j) has id 2k, vertical edge (i,j)-(i,j+1) has id 2k+1, k = j nx + i.
    std::uint64_t hedge(std::size_t i, std::size_t j) const { return 2 * (j * g_.nx + i); }
    std::uint64_t vedge(std::size_t i, std::size_t j) const { return 2 * (j * g_.nx + i) + 1; }
    bool in(std::size_t i, std::size_t j) const { return member_[j * g_.nx + i] != 0; }

    void link(std::uint64_t a, std::uint64_t b) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }

    void cell(std::size_t i, std::size_t j) {
        const bool c0 = in(i, j), c1 = in(i + 1, j), c2 = in(i + 1, j + 1), c3 = in(i, j + 1);
        const int code = int(c0) | int(c1) << 1 | int(c2) << 2 | int(c3) << 3;
        if (code == 0 || code == 15) return;
        const std::uint64_t e0 = hedge(i, j), e1 = vedge(i + 1, j), e2 = hedge(i, j + 1), e3 = vedge(i, j);
        if (code == 5 || code == 10) {
            const cplx center = g_.point(i, j) + cplx{0.5 * g_.h, 0.5 * g_.h};
            const bool center_in = field_(center) < level_;
            if ((code == 5) == center_in) {
                link(e0, e1);
                link(e2, e3);
            } else {
                link(e0, e3);
                link(e1, e2);
            }
            return;
        }
        std::uint64_t found[2];
        int k = 0;
        if (c0 != c1) found[k++] = e0;
        if (c1 != c2) found[k++] = e1;
        if (c2 != c3) found[k++] = e2;
        if (c3 != c0) found[k++] = e3;
        link(found[0], found[1]);
    }

    cplx crossing(std::uint64_t edge) {
        auto it = crossings_.find(edge);
        if (it != crossings_.end()) return it->second;
        const std::size_t k = edge / 2;
        const std::size_t i = k % g_.nx;
        const std::size_t j = k / g_.nx;
        const std::size_t i2 = (edge % 2 == 0) ? i + 1 : i;
        const std::size_t j2 = (edge % 2 == 0) ? j : j + 1;
        cplx lo = g_.point(i, j);
        cplx hi = g_.point(i2, j2);
        if (!in(i, j)) std::swap(lo, hi);
        cplx mid = 0.5 * (lo + hi);
        for (std::size_t it2 = 0; it2 < kBisectionLimit; ++it2) {
            mid = 0.5 * (lo + hi);
            const double v = field_(mid);
            if (std::abs(v - level_) <= tol_) break;
            if (mid == lo || mid == hi) break;
            (v < level_ ? lo : hi) = mid;
        }
        crossings_.emplace(edge, mid);
        return mid;
    }

    std::vector<Polyline> chain() {
        std::vector<Polyline> out;
        std::unordered_map<std::uint64_t, bool> visited;
        auto walk = [&](std::uint64_t start, bool closed) {
            Polyline line;
            std::uint64_t prev = start;
            std::uint64_t cur = start;
            bool first = true;
            while (true) {
                visited[cur] = true;
                line.vertices.push_back(crossing(cur));
                const auto& nbs = adjacency_[cur];
                std::uint64_t next = cur;
                bool found = false;
                for (std::uint64_t nb : nbs) {
                    if ((first || nb != prev) && !visited[nb]) {
                        next = nb;
                        found = true;
                        break;
                    }
                }
                if (!found) break;
                first = false;
                prev = cur;
                cur = next;
            }
            if (closed) line.vertices.push_back(line.vertices.front());
            out.push_back(std::move(line));
        };
        std::vector<std::uint64_t> keys;
        keys.reserve(adjacency_.size());
        for (const auto& [edge, nbs] : adjacency_) keys.push_back(edge);
        std::sort(keys.begin(), keys.end());
        for (std::uint64_t e : keys)
            if (adjacency_[e].size() == 1 && !visited[e]) walk(e, false);
        for (std::uint64_t e : keys)
            if (!visited[e]) walk(e, true);
        return out;
    }

    const FieldGrid& g_;
    const std::vector<std::uint8_t>& member_;
    const ScalarField& field_;
    double level_;
    double tol_;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> adjacency_;
    std::unordered_map<std::uint64_t, cplx> crossings_;
};

struct Segment {
    cplx a;
    cplx b;
};

std::vector<Segment> segments_of(const Region& region) {
    std::vector<Segment> segs;
    for (const auto& line : region.boundary)
        for (std::size_t k = 0; k + 1 < line.vertices.size(); ++k)
            segs.push_back({line.vertices[k], line.vertices[k + 1]});
    return segs;
}

bool even_odd(const std::vector<Segment>& segs, cplx z) {
    bool inside = false;
    for (const auto& s : segs) {
        const double ya = s.a.imag(), yb = s.b.imag();
        if ((ya > z.imag()) == (yb > z.imag())) continue;
        const double x = s.a.real() + (z.imag() - ya) * (s.b.real() - s.a.real()) / (yb - ya);
        if (x > z.real()) inside = !inside;
    }
    return inside;
}

double segment_distance(const Segment& s, cplx z) {
    const cplx d = s.b - s.a;
    const double len2 = std::norm(d);
    double u = len2 > 0.0 ? ((z - s.a) * std::conj(d)).real() / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return std::abs(z - (s.a + u * d));
}

double nearest_distance(const std::vector<Segment>& segs, cplx z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : segs) best = std::min(best, segment_distance(s, z));
    return best;
}

} // namespace

double Window::half_extent() const { return 0.5 * std::max(re_max - re_min, im_max - im_min); }

Window Window::scaled(double factor) const {
    const cplx c = center();
    const double hx = 0.5 * (re_max - re_min) * factor;
    const double hy = 0.5 * (im_max - im_min) * factor;
    return {c.real() - hx, c.real() + hx, c.imag() - hy, c.imag() + hy};
}

bool Window::contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
}

cplx FieldGrid::point(std::size_t i, std::size_t j) const {
    return {bounds.re_min + static_cast<double>(i) * h, bounds.im_min + static_cast<double>(j) * h};
}

double support_radius_bound(double max_abs_lambda, double t, double padding) {
    return max_abs_lambda * std::exp(2.0 * t) + padding;
}

Region sigma_region(const ScalarField& field, double level, Window window, double h, const RegionOptions& opts) {
    require(std::isfinite(level) && level > 0.0, ErrorCode::InvalidParameter, "level must be positive");
    require(std::isfinite(h) && h > 0.0, ErrorCode::InvalidParameter, "resolution must be positive");
    require(window.re_max > window.re_min && window.im_max > window.im_min, ErrorCode::InvalidParameter,
            "window must have positive area");

    Region region;
    region.level = level;
    while (true) {
        FieldGrid g = make_grid(window, h);
        if (g.nx * g.ny > opts.max_points)
            fail(ErrorCode::WindowTooSmall, "lattice of " + std::to_string(g.nx * g.ny) + " points exceeds the cap");
        evaluate_grid(g, field, opts.threads);
        const bool done = !opts.auto_expand || ring_above(g, level);
        region.grid = std::move(g);
        if (done) break;
        window = window.scaled(2.0);
        if (window.half_extent() > opts.max_half_extent)
            fail(ErrorCode::WindowTooSmall,
                 "sublevel set still reaches the window edge at half extent " + format_double(window.half_extent()));
    }

    const FieldGrid& g = region.grid;
    region.membership.resize(g.values.size());
    for (std::size_t k = 0; k < g.values.size(); ++k) region.membership[k] = g.values[k] < level ? 1 : 0;

    const auto [inside, inside_touching] = count_components(region.membership, g.nx, g.ny, 1, false);
    const auto [outside, outside_touching] = count_components(region.membership, g.nx, g.ny, 0, true);
    (void)inside_touching;
    region.interior_components = inside;
    region.component_count = inside == 0 ? 0 : inside + (outside - outside_touching);

    Tracer tracer(g, region.membership, field, level, opts.edge_tol);
    region.boundary = tracer.trace();
    return region;
}

Region pushforward_region(const Region& region, const PointCloud& mu, cplx zeta, double eps,
                          std::size_t interior_stride) {
    Region out;
    out.level = region.level;
    out.component_count = region.component_count;
    out.interior_components = region.interior_components;

    auto map_vertex = [&](const std::vector<cplx>& verts, std::size_t k) -> cplx {
        const cplx z = verts[k];
        try {
            return psi_map(mu, zeta, z, eps);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UndefinedAtPoint) throw;
        }
        const std::size_t last = verts.size() - 1;
        const cplx before = verts[k == 0 ? last - 1 : k - 1];
        const cplx after = verts[k == last ? 1 : k + 1];
        cplx normal = cplx{0.0, 1.0} * (after - before);
        const double len = std::abs(normal);
        normal = len > 0.0 ? normal / len : cplx{1.0, 0.0};
        for (double s : {1.0, -1.0, 2.0, -2.0, 4.0, -4.0}) {
            try {
                const cplx v = psi_map(mu, zeta, z + s * eps * normal, eps);
                ++out.flagged_vertices;
                return v;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::UndefinedAtPoint) throw;
            }
        }
        fail(ErrorCode::UndefinedAtPoint, "no offset evaluation of the boundary vertex succeeded");
    };

    for (const auto& line : region.boundary) {
        Polyline mapped;
        mapped.vertices.reserve(line.vertices.size());
        for (std::size_t k = 0; k < line.vertices.size(); ++k) mapped.vertices.push_back(map_vertex(line.vertices, k));
        out.boundary.push_back(std::move(mapped));
    }

    if (interior_stride > 0) {
        const FieldGrid& g = region.grid;
        for (std::size_t j = 0; j < g.ny; j += interior_stride) {
            for (std::size_t i = 0; i < g.nx; i += interior_stride) {
                if (!region.membership[j * g.nx + i]) continue;
                try {
                    out.mapped_interior.push_back(psi_map(mu, zeta, g.point(i, j), eps));
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::UndefinedAtPoint) throw;
                }
            }
        }
    }
    return out;
}

Region zeta_support_region(const Region& region, const PointCloud& mu, cplx zeta, double eps,
                           std::size_t interior_stride) {
    return pushforward_region(region, mu, -zeta, eps, interior_stride);
}

bool region_contains(const Region& region, cplx z) { return even_odd(segments_of(region), z); }

double boundary_distance(const Region& region, cplx z) { return nearest_distance(segments_of(region), z); }

double containment_fraction(std::span<const cplx> points, const Region& region, double margin) {
    if (points.empty()) return 0.0;
    const auto segs = segments_of(region);
    std::size_t hits = 0;
    for (const cplx& z : points) {
        if (even_odd(segs, z) || (margin > 0.0 && nearest_distance(segs, z) <= margin)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(points.size());
}

void write_polylines_csv(const Region& region, std::ostream& out) {
    out << "component_id,vertex_index,re,im\n";
    for (std::size_t c = 0; c < region.boundary.size(); ++c) {
        const auto& v = region.boundary[c].vertices;
        for (std::size_t k = 0; k < v.size(); ++k)
            out << c << ',' << k << ',' << format_double(v[k].real()) << ',' << format_double(v[k].imag()) << '\n';
    }
}

void write_membership_grid(const Region& region, const std::filesystem::path& binary_path,
                           const std::filesystem::path& header_path) {
    const FieldGrid& g = region.grid;
    std::ofstream bin(binary_path, std::ios::binary);
    require(bin.good(), ErrorCode::IoError, "cannot open " + binary_path.string());
    bin.write(reinterpret_cast<const char*>(region.membership.data()),
              static_cast<std::streamsize>(region.membership.size()));
    require(bin.good(), ErrorCode::IoError, "failed writing " + binary_path.string());

    nlohmann::ordered_json header;
    header["dtype"] = "uint8";
    header["layout"] = "row-major, row j at im_min + j*h, column i at re_min + i*h";
    header["nx"] = g.nx;
    header["ny"] = g.ny;
    header["re_min"] = g.bounds.re_min;
    header["re_max"] = g.bounds.re_max;
    header["im_min"] = g.bounds.im_min;
    header["im_max"] = g.bounds.im_max;
    header["h"] = g.h;
    header["level"] = region.level;
    header["data"] = binary_path.filename().string();
    std::ofstream hdr(header_path);
    require(hdr.good(), ErrorCode::IoError, "cannot open " + header_path.string());
    hdr << header.dump(2) << '\n';
}

} // namespace glbm
