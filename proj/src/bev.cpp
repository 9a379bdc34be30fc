#include "indoorlidar/bev.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace ilidar {

BevGrid rasterize_bev(const PointCloud& cloud, double cell_size,
                      const BevExtent& extent) {
    if (!(cell_size > 0.0)) {
        throw std::invalid_argument("rasterize_bev: cell_size must be > 0");
    }
    if (!(extent.x_max > extent.x_min) || !(extent.y_max > extent.y_min)) {
        throw std::invalid_argument("rasterize_bev: degenerate extent");
    }
    BevGrid grid;
    grid.cell_size = cell_size;
    grid.extent = extent;
    grid.cols = static_cast<int>(std::ceil((extent.x_max - extent.x_min) / cell_size));
    grid.rows = static_cast<int>(std::ceil((extent.y_max - extent.y_min) / cell_size));
    const std::size_t cells = static_cast<std::size_t>(grid.rows) * grid.cols;
    grid.max_height.assign(cells, -std::numeric_limits<float>::infinity());
    grid.mean_intensity.assign(cells, 0.0f);
    grid.density.assign(cells, 0);

    // Exact sums keep the mean independent of point order.
    std::vector<double> intensity_sum(cells, 0.0);

    for (const auto& p : cloud.points) {
        if (p.x < extent.x_min || p.x >= extent.x_max || p.y < extent.y_min ||
            p.y >= extent.y_max) {
            ++grid.dropped_points;
            continue;
        }
        const int col = static_cast<int>(
            std::floor((p.x - extent.x_min) / cell_size));
        const int row = static_cast<int>(
            std::floor((p.y - extent.y_min) / cell_size));
        if (col < 0 || col >= grid.cols || row < 0 || row >= grid.rows) {
            ++grid.dropped_points;
            continue;
        }
        const std::size_t i = grid.index(row, col);
        ++grid.density[i];
        intensity_sum[i] += p.intensity;
        grid.max_height[i] = std::max(grid.max_height[i], p.z);
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (grid.density[i] > 0) {
            grid.mean_intensity[i] =
                static_cast<float>(intensity_sum[i] / grid.density[i]);
        }
    }
    return grid;
}

void write_bev_grid(const BevGrid& grid, const std::filesystem::path& prefix) {
    const std::filesystem::path meta = prefix.string() + ".meta.txt";
    std::ofstream out(meta);
    if (!out) throw std::runtime_error("cannot write " + meta.string());
    out << "rows " << grid.rows << "\n"
        << "cols " << grid.cols << "\n"
        << "cell_size " << grid.cell_size << "\n"
        << "extent " << grid.extent.x_min << " " << grid.extent.x_max << " "
        << grid.extent.y_min << " " << grid.extent.y_max << "\n"
        << "channels max_height mean_intensity density\n"
        << "dropped_points " << grid.dropped_points << "\n";

    auto write_channel = [&](const std::string& name,
                             const std::vector<float>& data) {
        const std::filesystem::path path = prefix.string() + "." + name + ".bin";
        std::ofstream bin(path, std::ios::binary | std::ios::trunc);
        if (!bin) throw std::runtime_error("cannot write " + path.string());
        bin.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(float)));
    };
    write_channel("max_height", grid.max_height);
    write_channel("mean_intensity", grid.mean_intensity);
    std::vector<float> density_f(grid.density.begin(), grid.density.end());
    write_channel("density", density_f);
}

}  // namespace ilidar
