#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "granpack/errors.hpp"

namespace granpack {

// Uniform-cell spatial hash over particle centers. Each particle lives in the
// cell containing its center; queries widen their scan by the largest radius
// inserted so far, so the returned set is a superset of every particle whose
// disk could overlap the probe disk regardless of the cell size chosen.
class GridIndex {
public:
    explicit GridIndex(double cell_size) : cell_(cell_size) {
        if (!(cell_size > 0.0) || !std::isfinite(cell_size))
            throw DomainError("grid cell size must be positive and finite");
    }

    double cell_size() const { return cell_; }
    double max_radius() const { return max_radius_; }
    std::size_t size() const { return count_; }

    void insert(int index, double x, double y, double r) {
        cells_[key(coord(x), coord(y))].push_back(index);
        max_radius_ = std::max(max_radius_, r);
        ++count_;
    }

    // Indices of candidate neighbours for a disk of radius r at (x, y).
    void neighbors(double x, double y, double r, std::vector<int>& out) const {
        out.clear();
        if (count_ == 0) return;
        const double reach = r + max_radius_;
        const std::int64_t ix0 = coord(x - reach), ix1 = coord(x + reach);
        const std::int64_t iy0 = coord(y - reach), iy1 = coord(y + reach);
        for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
            for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
                const auto it = cells_.find(key(ix, iy));
                if (it == cells_.end()) continue;
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
    }

private:
    std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

    static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
    }

    double cell_;
    double max_radius_ = 0.0;
    std::size_t count_ = 0;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

} // namespace granpack
