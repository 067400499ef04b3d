#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "curvatlas/curve.hpp"

namespace curvatlas {

// Minimal number of contiguous segments of diameter <= l partitioning the
// curve.  Segments may be cut mid-leg; cut points are exact parameter values.
long partition_count(const PolyCurve& c, double l);

// Maximal number of arc-ordered points with successive Euclidean distances
// >= l (greedy earliest-admissible placement).
long packing_count(const PolyCurve& c, double l);

// Number of cells of the fixed grid of mesh l/sqrt(d) (cell diameter l,
// anchored at the origin) intersected by the curve.
long box_count(const PolyCurve& c, double l);

// Greedy cut points for partition_count, with the prefix count at each cut:
// entry i holds (arc position of cut i, M(C_s, l) for the prefix ending
// there).  The final entry is (length, partition_count).
struct PrefixCounts {
    std::vector<double> cuts;    // 0 < c_1 < ... < c_M = length
    std::vector<long> counts;    // counts[i] = M of the prefix ending at cuts[i]
};
PrefixCounts prefix_partition_counts(const PolyCurve& c, double l);

// Grid cell key for the fixed mesh-h grid anchored at the origin.
struct CellKey {
    std::int64_t i[3] = {0, 0, 0};
    auto operator<=>(const CellKey&) const = default;
};

// Cells of the mesh-h grid met by the curve (tie-broken so that an exact
// corner pass steps one axis at a time; the opposite corner cell is not
// counted).
std::set<CellKey> grid_cells(const PolyCurve& c, double h);

}  // namespace curvatlas
