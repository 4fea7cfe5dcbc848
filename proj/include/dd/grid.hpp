#pragma once

#include <cstddef>
#include <vector>

#include "dd/data.hpp"
#include "dd/vec2.hpp"

namespace dd {

/// Uniform tensor grid over an axis-aligned box with equal spacing in x and y.
class BoxGrid {
  public:
    BoxGrid(double xmin, double xmax, double ymin, double ymax, int nx, int ny);
    /// Grid whose spacing is h; the box extents must be integer multiples of h.
    static BoxGrid with_spacing(const std::vector<double>& box, double h);

    double xmin() const { return xmin_; }
    double xmax() const { return xmax_; }
    double ymin() const { return ymin_; }
    double ymax() const { return ymax_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }
    std::vector<double> box() const { return {xmin_, xmax_, ymin_, ymax_}; }

    std::size_t num_nodes() const { return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1); }
    std::size_t num_cells() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t node_index(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ + 1) + i; }
    Vec2 node(int i, int j) const { return {xmin_ + i * h_, ymin_ + j * h_}; }
    Vec2 node(std::size_t idx) const {
        return node(static_cast<int>(idx % (nx_ + 1)), static_cast<int>(idx / (nx_ + 1)));
    }
    bool contains(Vec2 x) const;

  private:
    double xmin_, xmax_, ymin_, ymax_;
    int nx_, ny_;
    double h_;
};

/// Piecewise bilinear field given by its nodal values.
class NodalField {
  public:
    NodalField(const BoxGrid& grid, std::vector<double> values);
    NodalField(const BoxGrid& grid, double value);

    const BoxGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Bilinear interpolation; throws for points outside the box.
    double interpolate(Vec2 x) const;
    /// Gradient of the bilinear patch containing x.
    Vec2 gradient(Vec2 x) const;

    /// Value and gradient inside cell (ci, cj) at local coordinates (s, t) in [0,1]^2.
    double cell_value(int ci, int cj, double s, double t) const;
    Vec2 cell_gradient(int ci, int cj, double s, double t) const;

  private:
    void locate(Vec2 x, int& ci, int& cj, double& s, double& t) const;

    BoxGrid grid_;
    std::vector<double> values_;
};

/// Samples bulk data at the grid nodes.
NodalField inject(const BoxGrid& grid, const BulkData& data);

}  // namespace dd
