#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvatlas/curve.hpp"
#include "curvatlas/shapes.hpp"

namespace curvatlas {

// Independent bond percolation scaled down to the delta-lattice,
// delta = 1/n.  Sites are (i*delta, j*delta), 0 <= i < nx, 0 <= j < ny.
struct LatticeField {
    int nx = 0;
    int ny = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    double delta = 0.0;
    std::vector<unsigned char> hbond;  // (nx-1)*ny, (i,j)-(i+1,j)
    std::vector<unsigned char> vbond;  // nx*(ny-1), (i,j)-(i,j+1)

    int site(int i, int j) const { return j * nx + i; }
    bool hocc(int i, int j) const { return hbond[static_cast<std::size_t>(j * (nx - 1) + i)] != 0; }
    bool vocc(int i, int j) const { return vbond[static_cast<std::size_t>(j * nx + i)] != 0; }
    Point coord(int i, int j) const { return Point(i * delta, j * delta); }
    long occupied_count() const;
};

LatticeField gen_bond_percolation(int n, double p, std::uint64_t seed);
// Rectangular variant, nx columns by ny rows of sites ((nx-1) x (ny-1) bonds
// per row/column pattern); used for the self-duality check.
LatticeField gen_bond_percolation_rect(int nx, int ny, double p, std::uint64_t seed);

// True iff an occupied left-right (horizontal) crossing exists.
bool has_lr_crossing(const LatticeField& f);

// The lowest left-right crossing as a self-avoiding path of step delta;
// absent when no crossing exists.
std::optional<PolyCurve> extract_crossing_path(const LatticeField& f);

// Number of distinct occupied clusters, restricted to the closed shell, that
// join its inner and outer boundary.
int shell_cluster_crossings(const LatticeField& f, const Shell& shell);
bool cluster_kcrossing_event(const LatticeField& f, const Shell& shell, int k);

// Number of distinct occupied clusters, restricted to the closed cylinder
// (rectangle in 2D), that join its two faces; traversal event is >= 1.
bool cylinder_cluster_crossing(const LatticeField& f, const Cylinder& cyl);

// Loop-erased random walk from `start` until first exit from the ball of
// radius target_radius; self-avoiding by construction.
PolyCurve gen_lerw(int n, std::uint64_t seed, const Point& start, double target_radius);

// Unique path between a and b in the uniform-weight minimal spanning tree of
// the n x n lattice (Kruskal + union-find).
PolyCurve gen_mst_path(int n, std::uint64_t seed, const Point& a, const Point& b);

// Boundary of the unbounded component of the complement of a random-walk
// trail, traced as a closed polygonal curve of step delta = 1/n.
PolyCurve gen_rw_frontier(long steps, int n, std::uint64_t seed);

enum class FixtureKind { line, staircase, koch, hairpin };

// Deterministic test geometry.  Depth semantics: staircase rows 2^depth,
// Koch generation count, hairpin doubling-back at scale 2^-depth.
PolyCurve gen_fixture(FixtureKind kind, int depth);

// Subdivide legs so every leg is at most `step` long and tag the curve with
// that cutoff.
PolyCurve resample(const PolyCurve& c, double step);

// Generator specification for Monte-Carlo drivers.  Trials are replayable:
// trial i uses child_seed(seed, i).
struct GeneratorSpec {
    enum class Kind { bond_perc, lerw, mst_path, rw_frontier, fixture };
    Kind kind = Kind::bond_perc;
    std::uint64_t seed = 0;
    std::map<std::string, double> params;  // kind-specific, validated on use

    double param(const std::string& key, double fallback) const;
};

GeneratorSpec::Kind generator_kind_from_string(const std::string& s);
std::string to_string(GeneratorSpec::Kind k);

// Draw one configuration of curves for trial `trial` (fixture/lerw/mst/
// frontier kinds; bond_perc yields the lowest crossing when present).
CurveConfig draw_config(const GeneratorSpec& spec, std::uint64_t trial);
// Draw the raw field (bond_perc kind only).
LatticeField draw_field(const GeneratorSpec& spec, std::uint64_t trial);

// Field serialization: header `field v1 n=<int> p=<f> seed=<u64>` then
// run-length-encoded bond bits.
void write_field(std::ostream& os, const LatticeField& f);
LatticeField read_field(std::istream& is);

}  // namespace curvatlas
