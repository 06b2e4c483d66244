#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sicgen/sicstg.hpp"

// Independent reference implementations used to check the production
// algorithms. These stay deliberately naive.
namespace oracles {

/// Edge set derived by checking the three SIC edge conditions over every
/// ordered vertex pair, decoding labels field by field. O(V^2 * width).
std::vector<sicgen::SicEdge> sic_edges_pairwise(
    const sicgen::CellShape& shape,
    const std::vector<sicgen::Configuration>& vertices);

/// Minimal number of edge duplications that gives every vertex equal in- and
/// out-degree, found by exhaustive search over duplication vectors in order
/// of increasing total. Returns nullopt when no solution exists within
/// max_total.
std::optional<std::uint64_t> min_duplications_exhaustive(
    const sicgen::SicGraph& g, std::uint64_t max_total);

}  // namespace oracles
