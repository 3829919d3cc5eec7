#include "vsd/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vsd/errors.hpp"

namespace vsd {

Grid2D::Grid2D(int n_cells) : n_(n_cells), h_(1.0 / n_cells) {
    if (n_cells < 4) throw std::invalid_argument("Grid2D: need at least 4 cells per axis, got " + std::to_string(n_cells));
}

double Grid2D::eigenvalue(int n, int m) const noexcept {
    const double sx = std::sin(n * std::numbers::pi * h_ / 2.0);
    const double sy = std::sin(m * std::numbers::pi * h_ / 2.0);
    return 4.0 / (h_ * h_) * (sx * sx + sy * sy);
}

Grid2D build_grid(int n_cells) { return Grid2D(n_cells); }

GridField::GridField(const Grid2D& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.interior_count()) throw std::invalid_argument("GridField: value count does not match grid");
}

namespace {
void require_same_grid(const GridField& a, const GridField& b, const char* who) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}
}  // namespace

GridField& GridField::operator+=(const GridField& o) {
    require_same_grid(*this, o, "GridField::operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
}

GridField& GridField::operator-=(const GridField& o) {
    require_same_grid(*this, o, "GridField::operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
}

GridField& GridField::operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
}

GridField& GridField::axpy(double a, const GridField& x) {
    require_same_grid(*this, x, "GridField::axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
    return *this;
}

void GridField::fill(double v) noexcept {
    for (double& x : values_) x = v;
}

RegionMask region_mask(const Grid2D& grid, const Box& box) {
    if (!(0.0 <= box.x0 && box.x0 < box.x1 && box.x1 <= 1.0 && 0.0 <= box.y0 && box.y0 < box.y1 && box.y1 <= 1.0)) {
        throw std::invalid_argument("region_mask: box must satisfy 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1");
    }
    RegionMask mask(grid, box);
    mask.indicator_.assign(grid.interior_count(), 0);
    // Nodes on the box edges are included; the slack absorbs i*h roundoff.
    const double slack = 1e-9 * grid.h();
    for (std::size_t k = 0; k < grid.interior_count(); ++k) {
        const double x = grid.x_of(k);
        const double y = grid.y_of(k);
        if (x >= box.x0 - slack && x <= box.x1 + slack && y >= box.y0 - slack && y <= box.y1 + slack) {
            mask.indicator_[k] = 1;
            mask.nodes_.push_back(k);
        }
    }
    if (mask.nodes_.empty()) throw std::invalid_argument("region_mask: box contains no interior node");
    return mask;
}

void apply_laplacian(const GridField& u, GridField& out) {
    require_same_grid(u, out, "apply_laplacian");
    const Grid2D& g = u.grid();
    const int m = g.nodes_per_axis();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    const auto v = u.values();
    auto o = out.values();
    for (int j = 0; j < m; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * m;
        for (int i = 0; i < m; ++i) {
            const std::size_t k = row + i;
            double s = 4.0 * v[k];
            if (i > 0) s -= v[k - 1];
            if (i + 1 < m) s -= v[k + 1];
            if (j > 0) s -= v[k - m];
            if (j + 1 < m) s -= v[k + m];
            o[k] = s * inv_h2;
        }
    }
}

GridField apply_laplacian(const GridField& u) {
    GridField out(u.grid());
    apply_laplacian(u, out);
    return out;
}

double inner(const GridField& u, const GridField& v) {
    require_same_grid(u, v, "inner");
    const auto a = u.values();
    const auto b = v.values();
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    const double h = u.grid().h();
    return h * h * s;
}

double norm2(const GridField& u) { return std::sqrt(inner(u, u)); }

GridField solve_spd(double shift, double conv_diag, const GridField& rhs, double tol, const GridField* initial_guess,
                    CgStats* stats) {
    const double c = shift + conv_diag;
    if (!(c >= 0.0)) throw std::invalid_argument("solve_spd: shift + conv_diag must be nonnegative");
    const Grid2D& g = rhs.grid();
    const double diag = c + 4.0 / (g.h() * g.h());
    const std::size_t n = rhs.size();
    const int cap = 10 * static_cast<int>(n);

    GridField w = initial_guess ? *initial_guess : GridField(g);
    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        if (stats) *stats = {};
        return GridField(g);
    }

    GridField r(g), z(g), p(g), ap(g);
    const auto apply = [&](const GridField& x, GridField& out) {
        apply_laplacian(x, out);
        out.axpy(c, x);
    };
    apply(w, ap);
    r = rhs;
    r -= ap;
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag;
    p = z;
    double rz = inner(r, z);
    double rel = norm2(r) / rhs_norm;
    int it = 0;
    while (rel > tol && it < cap) {
        apply(p, ap);
        const double alpha = rz / inner(p, ap);
        w.axpy(alpha, p);
        r.axpy(-alpha, ap);
        for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag;
        const double rz_next = inner(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        rel = norm2(r) / rhs_norm;
        ++it;
    }
    if (stats) *stats = {it, rel};
    if (!(rel <= tol)) {
        throw SolverError("solve_spd: CG did not converge in " + std::to_string(it) + " iterations", rel);
    }
    return w;
}

struct ShiftedLaplacianSolver::Plan {
    std::vector<double> buffer;
    fftw_plan plan = nullptr;
};

namespace {
// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

ShiftedLaplacianSolver::ShiftedLaplacianSolver(const Grid2D& grid, double shift)
    : grid_(grid), shift_(shift), plan_(std::make_unique<Plan>()) {
    if (!(shift + grid.eigenvalue(1, 1) > 0.0)) {
        throw std::invalid_argument("ShiftedLaplacianSolver: shifted operator is not positive definite");
    }
    const int m = grid.nodes_per_axis();
    plan_->buffer.assign(grid.interior_count(), 0.0);
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan_->plan = fftw_plan_r2r_2d(m, m, plan_->buffer.data(), plan_->buffer.data(), FFTW_RODFT00, FFTW_RODFT00,
                                       FFTW_ESTIMATE);
    }
    if (!plan_->plan) throw std::runtime_error("ShiftedLaplacianSolver: FFTW planning failed");
    // Unnormalized DST-I applied twice per axis multiplies by (2N)^2 overall.
    const double scale = 1.0 / (4.0 * grid.n_cells() * grid.n_cells());
    inv_diag_.resize(grid.interior_count());
    for (int q = 1; q <= m; ++q) {
        for (int p = 1; p <= m; ++p) {
            inv_diag_[grid.index(p, q)] = scale / (shift + grid.eigenvalue(p, q));
        }
    }
}

ShiftedLaplacianSolver::~ShiftedLaplacianSolver() {
    if (plan_ && plan_->plan) {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_->plan);
    }
}

void ShiftedLaplacianSolver::solve(const GridField& rhs, GridField& out) {
    if (!(rhs.grid() == grid_) || !(out.grid() == grid_)) throw std::invalid_argument("ShiftedLaplacianSolver: grid mismatch");
    auto& buf = plan_->buffer;
    const auto r = rhs.values();
    std::copy(r.begin(), r.end(), buf.begin());
    fftw_execute(plan_->plan);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= inv_diag_[k];
    fftw_execute(plan_->plan);
    auto o = out.values();
    std::copy(buf.begin(), buf.end(), o.begin());
}

}  // namespace vsd
