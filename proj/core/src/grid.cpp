#include "angio/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "angio/errors.hpp"

namespace angio {

Grid::Grid(double radius, double h, MaskMode mode) : radius_(radius), h_(h), mode_(mode) {
    if (!(radius > 0.0) || !(h > 0.0) || !std::isfinite(radius) || !std::isfinite(h)) {
        throw DomainError("grid: radius and spacing must be positive");
    }
    const double ratio = radius / h;
    const double k = std::round(ratio);
    if (k < 1.0 || std::abs(ratio - k) > 1e-9 * ratio) {
        throw DomainError("grid: spacing must divide the radius exactly");
    }
    k_ = static_cast<int>(k);
    n_ = 2 * k_ + 1;
    active_.assign(size(), 0);
    const long long kk = static_cast<long long>(k_) * k_;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            const long long di = k_ - i;
            const long long dj = k_ - j;
            const bool on = mode == MaskMode::FullSquare || di * di + dj * dj <= kk;
            active_[index(i, j)] = on ? 1 : 0;
            active_count_ += on ? 1 : 0;
        }
    }
}

bool Grid::contains(Vec2 p) const noexcept {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    if (mode_ == MaskMode::FullSquare) return std::abs(p.x) <= radius_ && std::abs(p.y) <= radius_;
    return norm(p) <= radius_;
}

ScalarField::ScalarField(GridPtr grid, double fill) : grid_(std::move(grid)) {
    values_.assign(grid_->size(), 0.0);
    if (fill != 0.0) {
        for (std::size_t idx = 0; idx < values_.size(); ++idx) {
            if (grid_->active(idx)) values_[idx] = fill;
        }
    }
}

double ScalarField::max_active() const noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (grid_->active(idx)) m = std::max(m, values_[idx]);
    }
    return std::isfinite(m) ? m : 0.0;
}

double ScalarField::min_active() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (grid_->active(idx)) m = std::min(m, values_[idx]);
    }
    return std::isfinite(m) ? m : 0.0;
}

Vec2 node_gradient(const ScalarField& field, int i, int j) {
    const Grid& g = field.grid();
    const double h = g.h();
    const double c = field.at(i, j);

    // i - 1 is the +x neighbour, j - 1 the +y neighbour.
    auto axis = [&](bool plus_on, double plus, bool minus_on, double minus) {
        if (plus_on && minus_on) return (plus - minus) / (2.0 * h);
        if (plus_on) return (plus - c) / h;
        if (minus_on) return (c - minus) / h;
        return 0.0;
    };

    const bool xp = g.active(i - 1, j);
    const bool xm = g.active(i + 1, j);
    const bool yp = g.active(i, j - 1);
    const bool ym = g.active(i, j + 1);
    const double gx = axis(xp, xp ? field.at(i - 1, j) : 0.0, xm, xm ? field.at(i + 1, j) : 0.0);
    const double gy = axis(yp, yp ? field.at(i, j - 1) : 0.0, ym, ym ? field.at(i, j + 1) : 0.0);
    return {gx, gy};
}

namespace {

struct Stencil {
    std::array<int, 4> i{};
    std::array<int, 4> j{};
    std::array<double, 4> w{};
};

// Fractional index along one axis, snapped onto a node when within round-off.
void locate_axis(double coord, const Grid& g, int& lo, double& t) {
    double s = g.k() - coord / g.h();
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-12 * std::max(1.0, std::abs(s))) s = r;
    lo = static_cast<int>(std::floor(s));
    lo = std::clamp(lo, 0, g.n() - 2);
    t = std::clamp(s - lo, 0.0, 1.0);
}

Stencil bilinear_stencil(const Grid& g, Vec2 p) {
    if (!g.contains(p)) {
        std::ostringstream os;
        os << "point (" << p.x << ", " << p.y << ") lies outside the domain";
        throw DomainError(os.str());
    }
    int i0 = 0;
    int j0 = 0;
    double ti = 0.0;
    double tj = 0.0;
    locate_axis(p.x, g, i0, ti);
    locate_axis(p.y, g, j0, tj);

    Stencil s;
    s.i = {i0, i0 + 1, i0, i0 + 1};
    s.j = {j0, j0, j0 + 1, j0 + 1};
    s.w = {(1 - ti) * (1 - tj), ti * (1 - tj), (1 - ti) * tj, ti * tj};
    double total = 0.0;
    for (int c = 0; c < 4; ++c) {
        if (!g.active(s.i[c], s.j[c])) s.w[c] = 0.0;
        total += s.w[c];
    }
    if (!(total > 0.0)) throw DomainError("interpolation stencil has no active node");
    if (total != 1.0) {
        for (double& w : s.w) w /= total;
    }
    return s;
}

}  // namespace

double interpolate_at(const ScalarField& field, Vec2 p) {
    const Stencil s = bilinear_stencil(field.grid(), p);
    double v = 0.0;
    for (int c = 0; c < 4; ++c) {
        if (s.w[c] != 0.0) v += s.w[c] * field.at(s.i[c], s.j[c]);
    }
    return v;
}

Vec2 gradient_at(const ScalarField& field, Vec2 p) {
    const Stencil s = bilinear_stencil(field.grid(), p);
    Vec2 v;
    for (int c = 0; c < 4; ++c) {
        if (s.w[c] != 0.0) v += s.w[c] * node_gradient(field, s.i[c], s.j[c]);
    }
    return v;
}

double integrate(const ScalarField& field) {
    const Grid& g = field.grid();
    double sum = 0.0;
    const auto vals = field.values();
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
        if (g.active(idx)) sum += vals[idx];
    }
    return g.h() * g.h() * sum;
}

}  // namespace angio
