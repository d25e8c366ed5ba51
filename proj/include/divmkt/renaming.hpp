#pragma once

#include "divmkt/errors.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace divmkt {

/// Index renaming after company i (0-based) splits: companies after i shift
/// down one place and the two children take the last two positions.
template <class T>
std::vector<T> rename_after_split(std::span<const T> v, std::size_t i, T first_child, T second_child) {
    if (i >= v.size()) {
        throw ContractViolation("split index out of range");
    }
    std::vector<T> out;
    out.reserve(v.size() + 1);
    for (std::size_t nu = 0; nu < v.size(); ++nu) {
        if (nu != i) {
            out.push_back(v[nu]);
        }
    }
    out.push_back(first_child);
    out.push_back(second_child);
    return out;
}

/// Index renaming after companies i < j (0-based) merge: the others keep their
/// relative order and the merged company takes the last position.
template <class T>
std::vector<T> rename_after_merger(std::span<const T> v, std::size_t i, std::size_t j, T merged) {
    if (!(i < j && j < v.size())) {
        throw ContractViolation("merger indices must satisfy i < j < N");
    }
    std::vector<T> out;
    out.reserve(v.size() - 1);
    for (std::size_t nu = 0; nu < v.size(); ++nu) {
        if (nu != i && nu != j) {
            out.push_back(v[nu]);
        }
    }
    out.push_back(merged);
    return out;
}

} // namespace divmkt
