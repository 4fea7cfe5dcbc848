#include "dd/grid.hpp"

#include <algorithm>
#include <cmath>

#include "dd/error.hpp"

namespace dd {

BoxGrid::BoxGrid(double xmin, double xmax, double ymin, double ymax, int nx, int ny)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), nx_(nx), ny_(ny), h_((xmax - xmin) / nx) {
    DD_REQUIRE(nx >= 1 && ny >= 1, "grid needs at least one cell per axis");
    DD_REQUIRE(xmax > xmin && ymax > ymin, "box extents must be positive");
    const double hy = (ymax - ymin) / ny;
    DD_REQUIRE(std::abs(h_ - hy) <= 1e-12 * std::max(1.0, h_), "grid spacing must be equal in x and y");
}

BoxGrid BoxGrid::with_spacing(const std::vector<double>& box, double h) {
    DD_REQUIRE(box.size() == 4, "box must have four entries");
    DD_REQUIRE(h > 0.0, "grid spacing must be positive");
    const double nxf = (box[1] - box[0]) / h;
    const double nyf = (box[3] - box[2]) / h;
    const int nx = static_cast<int>(std::lround(nxf));
    const int ny = static_cast<int>(std::lround(nyf));
    DD_REQUIRE(std::abs(nxf - nx) <= 1e-9 * nxf && std::abs(nyf - ny) <= 1e-9 * nyf,
               "box extents must be integer multiples of h");
    return {box[0], box[1], box[2], box[3], nx, ny};
}

bool BoxGrid::contains(Vec2 x) const {
    const double tol = 1e-12 * std::max(1.0, xmax_ - xmin_);
    return x.x >= xmin_ - tol && x.x <= xmax_ + tol && x.y >= ymin_ - tol && x.y <= ymax_ + tol;
}

NodalField::NodalField(const BoxGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    DD_REQUIRE(values_.size() == grid_.num_nodes(), "value count does not match the grid");
    for (double v : values_) DD_REQUIRE(std::isfinite(v), "nodal values must be finite");
}

NodalField::NodalField(const BoxGrid& grid, double value) : grid_(grid), values_(grid.num_nodes(), value) {}

void NodalField::locate(Vec2 x, int& ci, int& cj, double& s, double& t) const {
    if (!grid_.contains(x)) throw PreconditionError("NodalField: point outside the box");
    const double fx = (x.x - grid_.xmin()) / grid_.h();
    const double fy = (x.y - grid_.ymin()) / grid_.h();
    ci = std::clamp(static_cast<int>(std::floor(fx)), 0, grid_.nx() - 1);
    cj = std::clamp(static_cast<int>(std::floor(fy)), 0, grid_.ny() - 1);
    s = fx - ci;
    t = fy - cj;
}

double NodalField::cell_value(int ci, int cj, double s, double t) const {
    const double v00 = values_[grid_.node_index(ci, cj)];
    const double v10 = values_[grid_.node_index(ci + 1, cj)];
    const double v01 = values_[grid_.node_index(ci, cj + 1)];
    const double v11 = values_[grid_.node_index(ci + 1, cj + 1)];
    return (1 - s) * (1 - t) * v00 + s * (1 - t) * v10 + (1 - s) * t * v01 + s * t * v11;
}

Vec2 NodalField::cell_gradient(int ci, int cj, double s, double t) const {
    const double v00 = values_[grid_.node_index(ci, cj)];
    const double v10 = values_[grid_.node_index(ci + 1, cj)];
    const double v01 = values_[grid_.node_index(ci, cj + 1)];
    const double v11 = values_[grid_.node_index(ci + 1, cj + 1)];
    const double inv = 1.0 / grid_.h();
    return {((1 - t) * (v10 - v00) + t * (v11 - v01)) * inv, ((1 - s) * (v01 - v00) + s * (v11 - v10)) * inv};
}

double NodalField::interpolate(Vec2 x) const {
    int ci = 0, cj = 0;
    double s = 0, t = 0;
    locate(x, ci, cj, s, t);
    return cell_value(ci, cj, s, t);
}

Vec2 NodalField::gradient(Vec2 x) const {
    int ci = 0, cj = 0;
    double s = 0, t = 0;
    locate(x, ci, cj, s, t);
    return cell_gradient(ci, cj, s, t);
}

NodalField inject(const BoxGrid& grid, const BulkData& data) {
    std::vector<double> v(grid.num_nodes());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(v.size()); ++k)
        v[k] = data.value(grid.node(static_cast<std::size_t>(k)));
    return {grid, std::move(v)};
}

}  // namespace dd
