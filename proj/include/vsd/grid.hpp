#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace vsd {

/// Uniform grid on [0,1]^2 with N cells per axis; unknowns live on the
/// (N-1)^2 interior nodes (i h, j h), 1 <= i,j <= N-1, stored row-major with x
/// fastest. Homogeneous Dirichlet values are implied on the boundary.
class Grid2D {
public:
    explicit Grid2D(int n_cells);

    int n_cells() const noexcept { return n_; }
    int nodes_per_axis() const noexcept { return n_ - 1; }
    double h() const noexcept { return h_; }
    std::size_t interior_count() const noexcept {
        return static_cast<std::size_t>(n_ - 1) * static_cast<std::size_t>(n_ - 1);
    }

    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(n_ - 1) + static_cast<std::size_t>(i - 1);
    }
    double x(int i) const noexcept { return i * h_; }
    double y(int j) const noexcept { return j * h_; }
    double x_of(std::size_t k) const noexcept { return static_cast<double>(k % (n_ - 1) + 1) * h_; }
    double y_of(std::size_t k) const noexcept { return static_cast<double>(k / (n_ - 1) + 1) * h_; }

    /// Discrete Dirichlet eigenvalue of -Delta_h for sin(n pi x) sin(m pi y).
    double eigenvalue(int n, int m) const noexcept;

    friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept { return a.n_ == b.n_; }

private:
    int n_;
    double h_;
};

Grid2D build_grid(int n_cells);

class GridField {
public:
    explicit GridField(const Grid2D& grid) : grid_(grid), values_(grid.interior_count(), 0.0) {}
    GridField(const Grid2D& grid, std::vector<double> values);

    template <class F>
    static GridField sample(const Grid2D& grid, F&& f) {
        GridField out(grid);
        for (std::size_t k = 0; k < out.size(); ++k) out.values_[k] = f(grid.x_of(k), grid.y_of(k));
        return out;
    }

    const Grid2D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    GridField& operator+=(const GridField& o);
    GridField& operator-=(const GridField& o);
    GridField& operator*=(double s) noexcept;
    /// this += a * x
    GridField& axpy(double a, const GridField& x);
    void fill(double v) noexcept;

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(double s, GridField a) { return a *= s; }

private:
    Grid2D grid_;
    std::vector<double> values_;
};

struct Box {
    double x0, x1, y0, y1;
};

/// Interior nodes inside a closed box. Never empty.
class RegionMask {
public:
    const Grid2D& grid() const noexcept { return grid_; }
    bool contains(std::size_t k) const noexcept { return indicator_[k] != 0; }
    /// Interior-node indices inside the region, increasing.
    std::span<const std::size_t> nodes() const noexcept { return nodes_; }
    std::size_t count() const noexcept { return nodes_.size(); }
    const Box& box() const noexcept { return box_; }

private:
    friend RegionMask region_mask(const Grid2D& grid, const Box& box);
    RegionMask(const Grid2D& grid, Box box) : grid_(grid), box_(box) {}

    Grid2D grid_;
    Box box_;
    std::vector<char> indicator_;
    std::vector<std::size_t> nodes_;
};

RegionMask region_mask(const Grid2D& grid, const Box& box);

/// 5-point -Delta_h with zero Dirichlet data.
GridField apply_laplacian(const GridField& u);
void apply_laplacian(const GridField& u, GridField& out);

/// Discrete L2(Omega) inner product h^2 sum u v.
double inner(const GridField& u, const GridField& v);
double norm2(const GridField& u);

struct CgStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solve ((shift + conv_diag) I - Delta_h) w = rhs by Jacobi-preconditioned CG.
/// Throws SolverError when the relative residual is not below `tol` after
/// 10 (N-1)^2 iterations.
GridField solve_spd(double shift, double conv_diag, const GridField& rhs, double tol = 1e-10,
                    const GridField* initial_guess = nullptr, CgStats* stats = nullptr);

/// Direct solver for (c I - Delta_h) w = rhs via the 2D type-I discrete sine
/// transform, which diagonalizes -Delta_h exactly. Reusable for a fixed c.
class ShiftedLaplacianSolver {
public:
    ShiftedLaplacianSolver(const Grid2D& grid, double shift);
    ~ShiftedLaplacianSolver();
    ShiftedLaplacianSolver(const ShiftedLaplacianSolver&) = delete;
    ShiftedLaplacianSolver& operator=(const ShiftedLaplacianSolver&) = delete;

    void solve(const GridField& rhs, GridField& out);
    double shift() const noexcept { return shift_; }

private:
    struct Plan;
    Grid2D grid_;
    double shift_;
    std::vector<double> inv_diag_;
    std::unique_ptr<Plan> plan_;
};

}  // namespace vsd
