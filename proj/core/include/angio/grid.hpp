#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "angio/vec2.hpp"

namespace angio {

enum class MaskMode {
    Disk,        // active iff |x_ij| <= R
    FullSquare,  // every node active; used by convergence studies on the square
};

/// Uniform node grid over [-R, R]^2 with x_ij = ((k - i) h, (k - j) h),
/// i, j = 0..2k, k = R / h. Node (i, j) is stored at flat index i * n + j.
class Grid {
public:
    Grid(double radius, double h, MaskMode mode = MaskMode::Disk);

    double h() const noexcept { return h_; }
    double radius() const noexcept { return radius_; }
    int k() const noexcept { return k_; }
    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
    MaskMode mask_mode() const noexcept { return mode_; }

    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
    }
    double x_of(int i) const noexcept { return (k_ - i) * h_; }
    double y_of(int j) const noexcept { return (k_ - j) * h_; }
    Vec2 node(int i, int j) const noexcept { return {x_of(i), y_of(j)}; }

    bool in_range(int i, int j) const noexcept { return i >= 0 && j >= 0 && i < n_ && j < n_; }
    bool active(int i, int j) const noexcept { return in_range(i, j) && active_[index(i, j)] != 0; }
    bool active(std::size_t idx) const noexcept { return active_[idx] != 0; }
    std::size_t active_count() const noexcept { return active_count_; }

    /// True iff p lies in the closed simulation domain (disk, or square for FullSquare).
    bool contains(Vec2 p) const noexcept;

    bool operator==(const Grid& o) const noexcept {
        return h_ == o.h_ && radius_ == o.radius_ && mode_ == o.mode_;
    }

private:
    double radius_;
    double h_;
    int k_;
    int n_;
    MaskMode mode_;
    std::vector<std::uint8_t> active_;
    std::size_t active_count_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double radius, double h, MaskMode mode = MaskMode::Disk) {
    return std::make_shared<const Grid>(radius, h, mode);
}

/// Node values of one scalar quantity. Inactive nodes hold 0 and are never
/// read by the numerics.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, double fill = 0.0);

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double& operator[](std::size_t idx) noexcept { return values_[idx]; }
    double operator[](std::size_t idx) const noexcept { return values_[idx]; }

    /// Masked read; asserts the node is active in debug builds.
    double at(int i, int j) const noexcept {
        assert(grid_->active(i, j));
        return values_[grid_->index(i, j)];
    }
    double& at(int i, int j) noexcept {
        assert(grid_->active(i, j));
        return values_[grid_->index(i, j)];
    }

    bool same_grid(const ScalarField& o) const noexcept {
        return grid_ == o.grid_ || (grid_ && o.grid_ && *grid_ == *o.grid_);
    }

    /// Max / min over active nodes (0 when no node is active).
    double max_active() const noexcept;
    double min_active() const noexcept;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Sets every active node to fn(x, y); inactive nodes stay 0.
template <class Fn>
ScalarField sample(const GridPtr& grid, Fn&& fn) {
    ScalarField f(grid);
    for (int i = 0; i < grid->n(); ++i) {
        for (int j = 0; j < grid->n(); ++j) {
            if (grid->active(i, j)) f[grid->index(i, j)] = fn(grid->x_of(i), grid->y_of(j));
        }
    }
    return f;
}

/// Gradient at node (i, j): central differences, one-sided next to inactive
/// neighbours, zero along an axis with no active neighbour.
Vec2 node_gradient(const ScalarField& field, int i, int j);

/// Node gradients bilinearly interpolated to p. Throws DomainError outside the domain.
Vec2 gradient_at(const ScalarField& field, Vec2 p);

/// Bilinear interpolation; weights of inactive corners are renormalized over
/// the active ones. Throws DomainError outside the domain.
double interpolate_at(const ScalarField& field, Vec2 p);

/// h^2 times the sum over active nodes.
double integrate(const ScalarField& field);

}  // namespace angio
