#pragma once

#include <filesystem>
#include <vector>

#include "indoorlidar/sensor.hpp"

namespace ilidar {

struct BevExtent {
    double x_min;
    double x_max;
    double y_min;
    double y_max;
};

// Channels are row-major, rows over y, cols over x. Cells are half-open:
// a point exactly on the max edge is out of extent.
struct BevGrid {
    double cell_size = 0.1;
    BevExtent extent{0.0, 0.0, 0.0, 0.0};
    int rows = 0;
    int cols = 0;
    std::vector<float> max_height;      // -inf where density == 0
    std::vector<float> mean_intensity;  // 0 where density == 0
    std::vector<std::int32_t> density;
    std::int64_t dropped_points = 0;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * cols + col;
    }
};

BevGrid rasterize_bev(const PointCloud& cloud, double cell_size,
                      const BevExtent& extent);

// <prefix>.meta.txt plus <prefix>.<channel>.bin (float32 LE, row-major).
void write_bev_grid(const BevGrid& grid, const std::filesystem::path& prefix);

}  // namespace ilidar
