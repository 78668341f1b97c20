#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "t2qc/errors.hpp"

namespace t2qc {

/// Subset of the ordered sign list, bit j set = sign j included.
using SignSubset = std::uint32_t;

inline int subset_size(SignSubset s) { return std::popcount(s); }

inline SignSubset full_set(int p) {
    return p >= 32 ? ~SignSubset{0} : (SignSubset{1} << p) - 1;
}

inline bool subset_contains(SignSubset s, int j) { return (s >> j) & 1u; }

inline std::vector<int> subset_indices(SignSubset s) {
    std::vector<int> idx;
    for (int j = 0; s >> j; ++j)
        if ((s >> j) & 1u) idx.push_back(j);
    return idx;
}

inline SignSubset subset_from_indices(const std::vector<int>& idx) {
    SignSubset s = 0;
    for (int j : idx) s |= SignSubset{1} << j;
    return s;
}

/// Pipe-separated sign names in list order, e.g. "BT|HR|SpO2".
inline std::string subset_name(SignSubset s, const std::vector<std::string>& signs) {
    std::string out;
    for (int j = 0; j < int(signs.size()); ++j) {
        if (!subset_contains(s, j)) continue;
        if (!out.empty()) out += '|';
        out += signs[j];
    }
    return out;
}

/// All nonempty subsets of {0..p-1} ordered by (size, ascending mask); the
/// ascending-mask tiebreak is lexicographic order of the index lists.
inline std::vector<SignSubset> all_nonempty_subsets(int p) {
    if (p < 1 || p > 24) throw DataError("subset enumeration limited to 1..24 signs");
    std::vector<SignSubset> out;
    out.reserve((std::size_t{1} << p) - 1);
    for (SignSubset m = 1, end = full_set(p); m <= end; ++m) out.push_back(m);
    std::stable_sort(out.begin(), out.end(), [](SignSubset a, SignSubset b) {
        int sa = subset_size(a), sb = subset_size(b);
        return sa != sb ? sa < sb : a < b;
    });
    return out;
}

}  // namespace t2qc
