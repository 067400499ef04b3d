#include "curvatlas/generators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "curvatlas/rng.hpp"
#include "curvatlas/union_find.hpp"

namespace curvatlas {

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};  // E N W S
constexpr int kDy[4] = {0, 1, 0, -1};

struct I2 {
    int x = 0;
    int y = 0;
    bool operator==(const I2& o) const { return x == o.x && y == o.y; }
};

struct I2Hash {
    std::size_t operator()(const I2& p) const {
        return static_cast<std::size_t>(splitmix64(
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
            static_cast<std::uint32_t>(p.y)));
    }
};

}  // namespace

long LatticeField::occupied_count() const {
    long n = 0;
    for (auto b : hbond) n += b;
    for (auto b : vbond) n += b;
    return n;
}

LatticeField gen_bond_percolation_rect(int nx, int ny, double p, std::uint64_t seed) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("percolation: need at least 2x2 sites");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percolation: p outside [0,1]");
    LatticeField f;
    f.nx = nx;
    f.ny = ny;
    f.p = p;
    f.seed = seed;
    f.delta = 1.0 / static_cast<double>(std::max(nx, ny));
    f.hbond.resize(static_cast<std::size_t>(nx - 1) * static_cast<std::size_t>(ny));
    f.vbond.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny - 1));
    Rng rng(child_seed(seed, 0));
    for (auto& b : f.hbond) b = rng.bernoulli(p) ? 1 : 0;
    for (auto& b : f.vbond) b = rng.bernoulli(p) ? 1 : 0;
    return f;
}

LatticeField gen_bond_percolation(int n, double p, std::uint64_t seed) {
    return gen_bond_percolation_rect(n, n, p, seed);
}

namespace {

// Occupied bond from site (i,j) in direction d, staying in the box.
bool bond_open(const LatticeField& f, int i, int j, int d) {
    const int ni = i + kDx[d];
    const int nj = j + kDy[d];
    if (ni < 0 || ni >= f.nx || nj < 0 || nj >= f.ny) return false;
    switch (d) {
        case 0: return f.hocc(i, j);
        case 2: return f.hocc(ni, nj);
        case 1: return f.vocc(i, j);
        default: return f.vocc(ni, nj);
    }
}

}  // namespace

bool has_lr_crossing(const LatticeField& f) {
    const std::size_t n = static_cast<std::size_t>(f.nx) * static_cast<std::size_t>(f.ny);
    UnionFind uf(n + 2);
    const std::size_t L = n, R = n + 1;
    for (int j = 0; j < f.ny; ++j) {
        uf.unite(static_cast<std::size_t>(f.site(0, j)), L);
        uf.unite(static_cast<std::size_t>(f.site(f.nx - 1, j)), R);
    }
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i + 1 < f.nx; ++i)
            if (f.hocc(i, j))
                uf.unite(static_cast<std::size_t>(f.site(i, j)),
                         static_cast<std::size_t>(f.site(i + 1, j)));
    for (int j = 0; j + 1 < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i)
            if (f.vocc(i, j))
                uf.unite(static_cast<std::size_t>(f.site(i, j)),
                         static_cast<std::size_t>(f.site(i, j + 1)));
    return uf.same(L, R);
}

std::optional<PolyCurve> extract_crossing_path(const LatticeField& f) {
    const std::size_t n = static_cast<std::size_t>(f.nx) * static_cast<std::size_t>(f.ny);
    UnionFind uf(n);
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i + 1 < f.nx; ++i)
            if (f.hocc(i, j))
                uf.unite(static_cast<std::size_t>(f.site(i, j)),
                         static_cast<std::size_t>(f.site(i + 1, j)));
    for (int j = 0; j + 1 < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i)
            if (f.vocc(i, j))
                uf.unite(static_cast<std::size_t>(f.site(i, j)),
                         static_cast<std::size_t>(f.site(i, j + 1)));

    std::unordered_set<std::size_t> right_roots;
    for (int j = 0; j < f.ny; ++j)
        right_roots.insert(uf.find(static_cast<std::size_t>(f.site(f.nx - 1, j))));
    int start_j = -1;
    for (int j = 0; j < f.ny; ++j) {
        if (right_roots.count(uf.find(static_cast<std::size_t>(f.site(0, j)))) != 0) {
            start_j = j;
            break;
        }
    }
    if (start_j < 0) return std::nullopt;

    // Wall-following walk with the vacant region kept on the walker's right;
    // preference order right-turn, straight, left-turn, back.  Chronological
    // loop erasure turns the walk into a self-avoiding path.
    std::vector<I2> path;
    std::unordered_map<I2, std::size_t, I2Hash> on_path;
    auto push_site = [&](I2 s) {
        auto it = on_path.find(s);
        if (it != on_path.end()) {
            for (std::size_t k = it->second + 1; k < path.size(); ++k) on_path.erase(path[k]);
            path.resize(it->second + 1);
        } else {
            on_path.emplace(s, path.size());
            path.push_back(s);
        }
    };

    I2 pos{0, start_j};
    int dir = 0;  // heading E
    push_site(pos);
    const long cap = 16L * static_cast<long>(n) + 16;
    long steps = 0;
    while (pos.x != f.nx - 1) {
        int next = -1;
        for (int turn = 0; turn < 4; ++turn) {
            // right of dir, straight, left, back
            const int d = (dir + 3 + turn) % 4;
            if (bond_open(f, pos.x, pos.y, d)) {
                next = d;
                break;
            }
        }
        if (next < 0) return std::nullopt;  // isolated start site; no bonds
        pos = I2{pos.x + kDx[next], pos.y + kDy[next]};
        dir = next;
        push_site(pos);
        if (++steps > cap)
            throw std::runtime_error("extract_crossing_path: walk failed to terminate");
    }

    std::vector<Point> verts;
    verts.reserve(path.size());
    for (const auto& s : path) verts.push_back(f.coord(s.x, s.y));
    return PolyCurve(std::move(verts), f.delta);
}

int shell_cluster_crossings(const LatticeField& f, const Shell& shell) {
    shell.validate();
    const std::size_t n = static_cast<std::size_t>(f.nx) * static_cast<std::size_t>(f.ny);
    std::vector<signed char> zone(n, -1);  // -1 outside shell, 0 in shell
    std::vector<unsigned char> touch_in(n, 0), touch_out(n, 0);
    auto dist_to_center = [&](int i, int j) { return distance(f.coord(i, j), shell.center); };
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const double r = dist_to_center(i, j);
            const auto s = static_cast<std::size_t>(f.site(i, j));
            if (r >= shell.inner - 1e-12 && r <= shell.outer + 1e-12) {
                zone[s] = 0;
                if (r <= shell.inner + f.delta) touch_in[s] = 1;
                if (r >= shell.outer - f.delta) touch_out[s] = 1;
            }
        }
    UnionFind uf(n);
    auto try_unite = [&](int i0, int j0, int i1, int j1, bool occ) {
        if (!occ) return;
        const auto a = static_cast<std::size_t>(f.site(i0, j0));
        const auto b = static_cast<std::size_t>(f.site(i1, j1));
        if (zone[a] == 0 && zone[b] == 0) uf.unite(a, b);
    };
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i + 1 < f.nx; ++i) try_unite(i, j, i + 1, j, f.hocc(i, j));
    for (int j = 0; j + 1 < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) try_unite(i, j, i, j + 1, f.vocc(i, j));

    std::unordered_map<std::size_t, std::pair<bool, bool>> flags;
    for (std::size_t s = 0; s < n; ++s) {
        if (zone[s] != 0) continue;
        if (!touch_in[s] && !touch_out[s]) continue;
        auto& fl = flags[uf.find(s)];
        fl.first |= touch_in[s] != 0;
        fl.second |= touch_out[s] != 0;
    }
    int count = 0;
    for (const auto& [root, fl] : flags)
        if (fl.first && fl.second) ++count;
    return count;
}

bool cluster_kcrossing_event(const LatticeField& f, const Shell& shell, int k) {
    return shell_cluster_crossings(f, shell) >= k;
}

bool cylinder_cluster_crossing(const LatticeField& f, const Cylinder& cyl) {
    cyl.validate();
    const std::size_t n = static_cast<std::size_t>(f.nx) * static_cast<std::size_t>(f.ny);
    const double L = cyl.length();
    std::vector<signed char> in(n, 0);
    std::vector<unsigned char> face_a(n, 0), face_b(n, 0);
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const Point p = f.coord(i, j);
            if (!cyl.contains(p, 1e-12)) continue;
            const auto s = static_cast<std::size_t>(f.site(i, j));
            in[s] = 1;
            double axial = 0.0, radial = 0.0;
            cyl.decompose(p, axial, radial);
            if (axial <= f.delta) face_a[s] = 1;
            if (axial >= L - f.delta) face_b[s] = 1;
        }
    UnionFind uf(n);
    auto try_unite = [&](int i0, int j0, int i1, int j1, bool occ) {
        if (!occ) return;
        const auto a = static_cast<std::size_t>(f.site(i0, j0));
        const auto b = static_cast<std::size_t>(f.site(i1, j1));
        if (in[a] && in[b]) uf.unite(a, b);
    };
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i + 1 < f.nx; ++i) try_unite(i, j, i + 1, j, f.hocc(i, j));
    for (int j = 0; j + 1 < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) try_unite(i, j, i, j + 1, f.vocc(i, j));
    std::unordered_map<std::size_t, std::pair<bool, bool>> flags;
    for (std::size_t s = 0; s < n; ++s) {
        if (!in[s] || (!face_a[s] && !face_b[s])) continue;
        auto& fl = flags[uf.find(s)];
        fl.first |= face_a[s] != 0;
        fl.second |= face_b[s] != 0;
    }
    for (const auto& [root, fl] : flags)
        if (fl.first && fl.second) return true;
    return false;
}

PolyCurve gen_lerw(int n, std::uint64_t seed, const Point& start, double target_radius) {
    if (n < 2) throw std::invalid_argument("gen_lerw: n too small");
    const double delta = 1.0 / static_cast<double>(n);
    if (!(target_radius >= delta)) throw std::invalid_argument("gen_lerw: target radius below lattice spacing");
    const I2 s0{static_cast<int>(std::lround(start[0] * n)),
                static_cast<int>(std::lround(start[1] * n))};

    std::vector<I2> path;
    std::unordered_map<I2, std::size_t, I2Hash> on_path;
    auto push_site = [&](I2 s) {
        auto it = on_path.find(s);
        if (it != on_path.end()) {
            for (std::size_t k = it->second + 1; k < path.size(); ++k) on_path.erase(path[k]);
            path.resize(it->second + 1);
        } else {
            on_path.emplace(s, path.size());
            path.push_back(s);
        }
    };

    Rng rng(child_seed(seed, 1));
    I2 pos = s0;
    push_site(pos);
    const long cap = 100000000L;
    long steps = 0;
    const double r2 = target_radius * target_radius;
    while (true) {
        const double dx = (pos.x - s0.x) * delta;
        const double dy = (pos.y - s0.y) * delta;
        if (dx * dx + dy * dy >= r2) break;
        const int d = static_cast<int>(rng.below(4));
        pos = I2{pos.x + kDx[d], pos.y + kDy[d]};
        push_site(pos);
        if (++steps > cap) throw std::runtime_error("gen_lerw: step cap exceeded");
    }

    std::vector<Point> verts;
    verts.reserve(path.size());
    for (const auto& s : path) verts.push_back(Point(s.x * delta, s.y * delta));
    return PolyCurve(std::move(verts), delta);
}

PolyCurve gen_mst_path(int n, std::uint64_t seed, const Point& a, const Point& b) {
    if (n < 2) throw std::invalid_argument("gen_mst_path: n too small");
    // n x n sites spanning the closed unit square, spacing 1/(n-1).
    const double delta = 1.0 / static_cast<double>(n - 1);
    auto snap = [&](const Point& p) {
        return I2{std::clamp(static_cast<int>(std::lround(p[0] / delta)), 0, n - 1),
                  std::clamp(static_cast<int>(std::lround(p[1] / delta)), 0, n - 1)};
    };
    const I2 ia = snap(a), ib = snap(b);
    auto site = [&](const I2& s) { return static_cast<std::size_t>(s.y * n + s.x); };
    if (ia == ib)
        return PolyCurve({Point(ia.x * delta, ia.y * delta)}, delta);

    // Kruskal on uniform i.i.d. call numbers; bond index doubles as the RNG
    // counter so the weights are replayable per seed.
    struct Edge {
        double w;
        int u, v;
    };
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(2 * n * n));
    std::uint64_t ctr = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            Rng r(child_seed(seed, ctr++));
            edges.push_back({r.uniform(), j * n + i, j * n + i + 1});
        }
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) {
            Rng r(child_seed(seed, ctr++));
            edges.push_back({r.uniform(), j * n + i, (j + 1) * n + i});
        }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.w < y.w; });

    const std::size_t nsites = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    UnionFind uf(nsites);
    std::vector<std::vector<int>> adj(nsites);
    std::size_t accepted = 0;
    for (const auto& e : edges) {
        if (uf.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) {
            adj[static_cast<std::size_t>(e.u)].push_back(e.v);
            adj[static_cast<std::size_t>(e.v)].push_back(e.u);
            if (++accepted == nsites - 1) break;
        }
    }

    // BFS for the unique tree path.
    std::vector<int> prev(nsites, -1);
    std::deque<int> q;
    const int src = static_cast<int>(site(ia)), dst = static_cast<int>(site(ib));
    prev[static_cast<std::size_t>(src)] = src;
    q.push_back(src);
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        if (u == dst) break;
        for (int v : adj[static_cast<std::size_t>(u)])
            if (prev[static_cast<std::size_t>(v)] < 0) {
                prev[static_cast<std::size_t>(v)] = u;
                q.push_back(v);
            }
    }
    std::vector<Point> verts;
    for (int u = dst; ; u = prev[static_cast<std::size_t>(u)]) {
        verts.push_back(Point((u % n) * delta, (u / n) * delta));
        if (u == src) break;
    }
    std::reverse(verts.begin(), verts.end());
    return PolyCurve(std::move(verts), delta);
}

PolyCurve gen_rw_frontier(long steps, int n, std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("gen_rw_frontier: steps must be positive");
    if (n < 2) throw std::invalid_argument("gen_rw_frontier: n too small");
    const double delta = 1.0 / static_cast<double>(n);

    // Simulate the trail; enlarge the working box (up to 3 doublings) if the
    // walk escapes it.
    int box = n;
    std::vector<I2> trail;
    for (int attempt = 0;; ++attempt) {
        trail.clear();
        Rng rng(child_seed(seed, 2));
        I2 pos{0, 0};
        trail.push_back(pos);
        bool escaped = false;
        for (long t = 0; t < steps; ++t) {
            const int d = static_cast<int>(rng.below(4));
            pos = I2{pos.x + kDx[d], pos.y + kDy[d]};
            trail.push_back(pos);
            if (std::abs(pos.x) > box / 2 || std::abs(pos.y) > box / 2) {
                escaped = true;
                break;
            }
        }
        if (!escaped) break;
        if (attempt >= 3) throw std::runtime_error("gen_rw_frontier: trail escaped after 3 box doublings");
        box *= 2;
    }

    int min_x = trail[0].x, max_x = trail[0].x, min_y = trail[0].y, max_y = trail[0].y;
    for (const auto& t : trail) {
        min_x = std::min(min_x, t.x);
        max_x = std::max(max_x, t.x);
        min_y = std::min(min_y, t.y);
        max_y = std::max(max_y, t.y);
    }
    // One-cell exterior margin all around.
    const int ox = min_x - 1, oy = min_y - 1;
    const int w = max_x - min_x + 3, h = max_y - min_y + 3;
    std::vector<unsigned char> occ(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };
    for (const auto& t : trail) occ[idx(t.x - ox, t.y - oy)] = 1;

    // Exterior flood fill (4-connected) from the margin; the filled region R
    // is the trail plus its bounded holes.
    std::vector<unsigned char> ext(occ.size(), 0);
    std::deque<I2> q;
    q.push_back({0, 0});
    ext[idx(0, 0)] = 1;
    while (!q.empty()) {
        const I2 c = q.front();
        q.pop_front();
        for (int d = 0; d < 4; ++d) {
            const int x = c.x + kDx[d], y = c.y + kDy[d];
            if (x < 0 || x >= w || y < 0 || y >= h) continue;
            if (ext[idx(x, y)] || occ[idx(x, y)]) continue;
            ext[idx(x, y)] = 1;
            q.push_back({x, y});
        }
    }
    auto filled = [&](int x, int y) {
        if (x < 0 || x >= w || y < 0 || y >= h) return false;
        return ext[idx(x, y)] == 0;
    };

    // Trace the outer boundary of R along cell edges, region on the left
    // (counter-clockwise); at pinch corners prefer the left turn so the
    // contour hugs the region.
    I2 start{-1, -1};
    for (int y = 0; y < h && start.x < 0; ++y)
        for (int x = 0; x < w; ++x)
            if (filled(x, y)) {
                start = {x, y};
                break;
            }
    // Edge walk state: corner position + heading.
    I2 corner = start;
    int dir = 0;  // E along the bottom edge of the start cell
    std::vector<Point> verts;
    auto corner_point = [&](const I2& c) {
        return Point((c.x + ox) * delta, (c.y + oy) * delta);
    };
    verts.push_back(corner_point(corner));
    const I2 start_corner = corner;
    const int start_dir = dir;
    auto edge_ok = [&](const I2& c, int d) {
        // Edge from corner c heading d is on the boundary iff the cell on
        // its left is filled and the cell on its right is not.
        switch (d) {
            case 0: return filled(c.x, c.y) && !filled(c.x, c.y - 1);
            case 1: return filled(c.x - 1, c.y) && !filled(c.x, c.y);
            case 2: return filled(c.x - 1, c.y - 1) && !filled(c.x - 1, c.y);
            default: return filled(c.x, c.y - 1) && !filled(c.x - 1, c.y - 1);
        }
    };
    const std::size_t cap = occ.size() * 8 + 16;
    std::size_t walked = 0;
    while (true) {
        corner = I2{corner.x + kDx[dir], corner.y + kDy[dir]};
        verts.push_back(corner_point(corner));
        if (corner == start_corner) break;
        int next = -1;
        for (int turn = 0; turn < 4; ++turn) {
            const int d = (dir + 1 + 4 - turn) % 4;  // left, straight, right, back
            if (edge_ok(corner, d)) {
                next = d;
                break;
            }
        }
        if (next < 0) throw std::runtime_error("gen_rw_frontier: boundary trace stuck");
        dir = next;
        if (++walked > cap) throw std::runtime_error("gen_rw_frontier: boundary trace failed to close");
    }
    (void)start_dir;
    return PolyCurve(std::move(verts), delta);
}

PolyCurve gen_fixture(FixtureKind kind, int depth) {
    if (depth < 0) throw std::invalid_argument("gen_fixture: negative depth");
    switch (kind) {
        case FixtureKind::line:
            return PolyCurve({Point(0, 0), Point(1, 0)}, 0.0);
        case FixtureKind::staircase: {
            // Serpentine sweep of the unit square with 2^depth rows.
            const long rows = 1L << depth;
            const double hgt = 1.0 / static_cast<double>(rows);
            std::vector<Point> vs;
            double y = 0.0;
            bool rightward = true;
            vs.push_back(Point(0, 0));
            for (long r = 0; r < rows; ++r) {
                vs.push_back(Point(rightward ? 1.0 : 0.0, y));
                y += hgt;
                vs.push_back(Point(rightward ? 1.0 : 0.0, y));
                rightward = !rightward;
            }
            vs.push_back(Point(rightward ? 1.0 : 0.0, y));
            // Collapse zero-length tail leg if present.
            if (distance(vs[vs.size() - 1], vs[vs.size() - 2]) == 0.0) vs.pop_back();
            return PolyCurve(std::move(vs), 0.0);
        }
        case FixtureKind::koch: {
            std::vector<Point> vs{Point(0, 0), Point(1, 0)};
            const double c60 = 0.5, s60 = std::sqrt(3.0) / 2.0;
            for (int it = 0; it < depth; ++it) {
                std::vector<Point> next;
                next.reserve(vs.size() * 4);
                for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
                    const Point a = vs[i], b = vs[i + 1];
                    const Point u = (1.0 / 3.0) * (b - a);
                    const Point p1 = a + u;
                    const Point p3 = a + 2.0 * u;
                    // p2 = p1 + u rotated by +60 degrees
                    const Point p2(p1[0] + u[0] * c60 - u[1] * s60,
                                   p1[1] + u[0] * s60 + u[1] * c60);
                    next.push_back(a);
                    next.push_back(p1);
                    next.push_back(p2);
                    next.push_back(p3);
                }
                next.push_back(vs.back());
                vs = std::move(next);
            }
            return PolyCurve(std::move(vs), 0.0);
        }
        case FixtureKind::hairpin: {
            // Straight unit run with a thin doubling-back of depth 2^-depth
            // around x = 0.5.
            const double hpw = std::pow(2.0, -static_cast<double>(depth));
            const double eps = hpw / 64.0;
            std::vector<Point> vs{
                Point(0, 0),
                Point(0.5, 0),
                Point(0.5, eps),
                Point(0.5 - hpw, eps),
                Point(0.5 - hpw, 2 * eps),
                Point(0.5, 2 * eps),
                Point(0.5, 3 * eps),
                Point(1, 3 * eps),
            };
            return PolyCurve(std::move(vs), 0.0);
        }
    }
    throw std::invalid_argument("gen_fixture: unknown kind");
}

PolyCurve resample(const PolyCurve& c, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("resample: step must be positive");
    const auto& v = c.vertices();
    if (v.size() == 1) return PolyCurve(v, step);
    std::vector<Point> vs;
    vs.push_back(v[0]);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double len = distance(v[i], v[i + 1]);
        const long parts = std::max(1L, static_cast<long>(std::ceil(len / step - 1e-12)));
        for (long k = 1; k <= parts; ++k)
            vs.push_back(lerp(v[i], v[i + 1], static_cast<double>(k) / static_cast<double>(parts)));
    }
    return PolyCurve(std::move(vs), step);
}

double GeneratorSpec::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

GeneratorSpec::Kind generator_kind_from_string(const std::string& s) {
    if (s == "bond_perc") return GeneratorSpec::Kind::bond_perc;
    if (s == "lerw") return GeneratorSpec::Kind::lerw;
    if (s == "mst_path") return GeneratorSpec::Kind::mst_path;
    if (s == "rw_frontier") return GeneratorSpec::Kind::rw_frontier;
    if (s == "fixture") return GeneratorSpec::Kind::fixture;
    throw std::invalid_argument("unknown generator kind: " + s);
}

std::string to_string(GeneratorSpec::Kind k) {
    switch (k) {
        case GeneratorSpec::Kind::bond_perc: return "bond_perc";
        case GeneratorSpec::Kind::lerw: return "lerw";
        case GeneratorSpec::Kind::mst_path: return "mst_path";
        case GeneratorSpec::Kind::rw_frontier: return "rw_frontier";
        case GeneratorSpec::Kind::fixture: return "fixture";
    }
    return "?";
}

LatticeField draw_field(const GeneratorSpec& spec, std::uint64_t trial) {
    if (spec.kind != GeneratorSpec::Kind::bond_perc)
        throw std::invalid_argument("draw_field: generator is not a lattice model");
    const int n = static_cast<int>(spec.param("n", 64));
    const double p = spec.param("p", 0.5);
    return gen_bond_percolation(n, p, child_seed(spec.seed, trial));
}

CurveConfig draw_config(const GeneratorSpec& spec, std::uint64_t trial) {
    const std::uint64_t s = child_seed(spec.seed, trial);
    CurveConfig cfg;
    switch (spec.kind) {
        case GeneratorSpec::Kind::bond_perc: {
            const LatticeField f = draw_field(spec, trial);
            cfg.cutoff = f.delta;
            cfg.region = Box::unit(2);
            if (auto path = extract_crossing_path(f)) cfg.curves.push_back(std::move(*path));
            return cfg;
        }
        case GeneratorSpec::Kind::lerw: {
            const int n = static_cast<int>(spec.param("n", 256));
            const double radius = spec.param("radius", 0.25);
            cfg.cutoff = 1.0 / n;
            PolyCurve c = gen_lerw(n, s, Point(0.5, 0.5), radius);
            Point lo = c.front(), hi = c.front();
            for (const auto& p : c.vertices())
                for (int i = 0; i < 2; ++i) {
                    lo[i] = std::min(lo[i], p[i]);
                    hi[i] = std::max(hi[i], p[i]);
                }
            cfg.region = Box{lo, hi};
            cfg.curves.push_back(std::move(c));
            return cfg;
        }
        case GeneratorSpec::Kind::mst_path: {
            const int n = static_cast<int>(spec.param("n", 128));
            cfg.cutoff = 1.0 / n;
            cfg.region = Box::unit(2);
            cfg.curves.push_back(gen_mst_path(n, s, Point(0.0, 0.5), Point(1.0, 0.5)));
            return cfg;
        }
        case GeneratorSpec::Kind::rw_frontier: {
            const int n = static_cast<int>(spec.param("n", 128));
            const long steps = static_cast<long>(spec.param("steps", 4096));
            PolyCurve c = gen_rw_frontier(steps, n, s);
            cfg.cutoff = c.step();
            Point lo = c.front(), hi = c.front();
            for (const auto& p : c.vertices())
                for (int i = 0; i < 2; ++i) {
                    lo[i] = std::min(lo[i], p[i]);
                    hi[i] = std::max(hi[i], p[i]);
                }
            cfg.region = Box{lo, hi};
            cfg.curves.push_back(std::move(c));
            return cfg;
        }
        case GeneratorSpec::Kind::fixture: {
            const int depth = static_cast<int>(spec.param("depth", 0));
            const auto fk = static_cast<FixtureKind>(static_cast<int>(spec.param("fixture", 0)));
            const double delta = spec.param("delta", 1.0 / 256.0);
            PolyCurve c = resample(gen_fixture(fk, depth), delta);
            cfg.cutoff = delta;
            Point lo = c.front(), hi = c.front();
            for (const auto& p : c.vertices())
                for (int i = 0; i < 2; ++i) {
                    lo[i] = std::min(lo[i], p[i]);
                    hi[i] = std::max(hi[i], p[i]);
                }
            cfg.region = Box{lo, hi};
            cfg.curves.push_back(std::move(c));
            return cfg;
        }
    }
    throw std::invalid_argument("draw_config: unknown generator kind");
}

void write_field(std::ostream& os, const LatticeField& f) {
    os << "field v1 n=" << f.nx << " ny=" << f.ny << " p=" << f.p << " seed=" << f.seed << "\n";
    auto rle = [&](const std::vector<unsigned char>& bits) {
        // Runs alternate starting with zeros.
        unsigned char cur = 0;
        long run = 0;
        for (auto b : bits) {
            if (b == cur) {
                ++run;
            } else {
                os << run << ' ';
                cur = b;
                run = 1;
            }
        }
        os << run << "\n";
    };
    rle(f.hbond);
    rle(f.vbond);
}

LatticeField read_field(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("field: missing header");
    LatticeField f;
    {
        std::istringstream hs(header);
        std::string magic, ver, tok;
        hs >> magic >> ver;
        if (magic != "field" || ver != "v1") throw std::runtime_error("field: bad header");
        f.ny = -1;
        while (hs >> tok) {
            if (tok.rfind("n=", 0) == 0) f.nx = std::stoi(tok.substr(2));
            else if (tok.rfind("ny=", 0) == 0) f.ny = std::stoi(tok.substr(3));
            else if (tok.rfind("p=", 0) == 0) f.p = std::stod(tok.substr(2));
            else if (tok.rfind("seed=", 0) == 0) f.seed = std::stoull(tok.substr(5));
        }
        if (f.ny < 0) f.ny = f.nx;
    }
    f.delta = 1.0 / static_cast<double>(std::max(f.nx, f.ny));
    auto unrle = [&](std::size_t total) {
        std::vector<unsigned char> bits;
        bits.reserve(total);
        std::string line;
        if (!std::getline(is, line)) throw std::runtime_error("field: truncated");
        std::istringstream ls(line);
        long run = 0;
        unsigned char cur = 0;
        while (ls >> run) {
            for (long i = 0; i < run; ++i) bits.push_back(cur);
            cur = cur ? 0 : 1;
        }
        if (bits.size() != total) throw std::runtime_error("field: bond count mismatch");
        return bits;
    };
    f.hbond = unrle(static_cast<std::size_t>(f.nx - 1) * static_cast<std::size_t>(f.ny));
    f.vbond = unrle(static_cast<std::size_t>(f.nx) * static_cast<std::size_t>(f.ny - 1));
    return f;
}

}  // namespace curvatlas
