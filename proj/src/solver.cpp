#include "hmlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

namespace {

constexpr std::size_t kChunk = 8192;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t blocks = (a.size() + kChunk - 1) / kChunk;
    std::vector<double> part(blocks, 0.0);
    parallel_chunks(a.size(), kChunk, [&](std::size_t s, std::size_t e) {
        double acc = 0;
        for (std::size_t i = s; i < e; ++i) acc += a[i] * b[i];
        part[s / kChunk] = acc;
    });
    return std::accumulate(part.begin(), part.end(), 0.0);
}

}  // namespace

System::System(const Grid& grid, const OperatorField& op, WallMode walls) : grid_(&grid), walls_(walls) {
    const int n = grid.dim();
    const auto& dims = grid.dims();
    const BoundarySet& gamma = grid.boundary();
    ellipticity_ = op.validate(gamma, grid.box());
    stride_ = {1, std::size_t(dims[0]), std::size_t(dims[0]) * dims[1]};
    const std::size_t total = grid.size();
    const double floor = grid.h() / 4;
    const double scale = std::pow(grid.h(), n - 2);

    std::array<std::vector<double>, 3> cell;
    for (int ax = 0; ax < n; ++ax) cell[ax].assign(total, 0);
    parallel_chunks(total, 1024, [&](std::size_t s, std::size_t e) {
        for (std::size_t idx = s; idx < e; ++idx) {
            Mat3 a = op.matrix(gamma, grid.center(idx), floor);
            for (int ax = 0; ax < n; ++ax) cell[ax][idx] = a[ax][ax];
        }
    });

    fixed_.assign(total, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        fixed_[idx] = grid.absorbing(idx) || (walls == WallMode::Dirichlet && grid.wall(idx));
        if (!fixed_[idx]) ++unknowns_;
    }

    for (int ax = 0; ax < 3; ++ax) face_[ax].assign(ax < n ? total : 0, 0);
    parallel_chunks(total, 4096, [&](std::size_t s, std::size_t e) {
        for (std::size_t idx = s; idx < e; ++idx) {
            auto c = grid.coords(idx);
            for (int ax = 0; ax < n; ++ax) {
                if (c[ax] + 1 >= dims[ax]) continue;
                double a = cell[ax][idx], b = cell[ax][idx + stride_[ax]];
                face_[ax][idx] = 2 * a * b / (a + b) * scale;
            }
        }
    });
    diag_.assign(total, 0);
    parallel_chunks(total, 4096, [&](std::size_t s, std::size_t e) {
        for (std::size_t idx = s; idx < e; ++idx) {
            double sum = 0;
            for_each_neighbor(idx, [&](std::size_t, double k) { sum += k; });
            diag_[idx] = sum;
        }
    });
}

std::vector<std::pair<std::size_t, double>> System::row(std::size_t idx) const {
    std::vector<std::pair<std::size_t, double>> out{{idx, diag_[idx]}};
    for_each_neighbor(idx, [&](std::size_t nb, double k) { out.emplace_back(nb, -k); });
    return out;
}

void System::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const auto& dims = grid_->dims();
    const int n = grid_->dim();
    y.assign(x.size(), 0.0);
    const std::size_t rows = std::size_t(dims[1]) * dims[2];
    const std::size_t nx = dims[0];
    parallel_chunks(rows, 16, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            const std::size_t j = r % dims[1], k = r / dims[1];
            const std::size_t base = r * nx;
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t idx = base + i;
                if (fixed_[idx]) continue;
                double v = diag_[idx] * x[idx];
                if (i + 1 < nx) v -= face_[0][idx] * x[idx + 1];
                if (i > 0) v -= face_[0][idx - 1] * x[idx - 1];
                if (n > 1) {
                    if (j + 1 < std::size_t(dims[1])) v -= face_[1][idx] * x[idx + stride_[1]];
                    if (j > 0) v -= face_[1][idx - stride_[1]] * x[idx - stride_[1]];
                }
                if (n > 2) {
                    if (k + 1 < std::size_t(dims[2])) v -= face_[2][idx] * x[idx + stride_[2]];
                    if (k > 0) v -= face_[2][idx - stride_[2]] * x[idx - stride_[2]];
                }
                y[idx] = v;
            }
        }
    });
}

void System::residual(const std::vector<double>& b, const std::vector<double>& x, std::vector<long double>& r) const {
    r.assign(x.size(), 0.0L);
    parallel_chunks(x.size(), 4096, [&](std::size_t s, std::size_t e) {
        for (std::size_t idx = s; idx < e; ++idx) {
            if (fixed_[idx]) continue;
            long double v = (long double)b[idx] - (long double)diag_[idx] * x[idx];
            for_each_neighbor(idx, [&](std::size_t nb, double k) {
                if (!fixed_[nb]) v += (long double)k * x[nb];
            });
            r[idx] = v;
        }
    });
}

std::vector<double> System::boundary_rhs(const std::vector<double>& fixed_values) const {
    std::vector<double> b(grid_->size(), 0.0);
    parallel_chunks(b.size(), 4096, [&](std::size_t s, std::size_t e) {
        for (std::size_t idx = s; idx < e; ++idx) {
            if (fixed_[idx]) continue;
            double v = 0;
            for_each_neighbor(idx, [&](std::size_t nb, double k) {
                if (fixed_[nb]) v += k * fixed_values[nb];
            });
            b[idx] = v;
        }
    });
    return b;
}


struct System::Hierarchy {
    struct Level {
        std::array<int, 3> dims{1, 1, 1};
        std::array<std::size_t, 3> stride{1, 1, 1};
        std::array<std::vector<double>, 3> face;
        std::vector<double> diag;
        std::vector<std::uint8_t> active;
        std::size_t size() const { return diag.size(); }
    };
    int n = 3;
    std::vector<Level> levels;
    std::vector<long> dense_index;
    std::vector<std::size_t> dense_cells;
    Eigen::LLT<Eigen::MatrixXd> dense;

    void apply(const Level& L, const std::vector<double>& x, std::vector<double>& y) const;
    void smooth(const Level& L, const std::vector<double>& b, std::vector<double>& x, int color) const;
    void cycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x,
               std::vector<std::vector<double>>& work) const;
};

namespace {

constexpr double kCoarseScale = 1.7;

template <class F>
void for_rows(const std::array<int, 3>& dims, F&& f) {
    const std::size_t rows = std::size_t(dims[1]) * dims[2];
    parallel_chunks(rows, 16, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) f(r, int(r % dims[1]), int(r / dims[1]));
    });
}

}  // namespace

void System::Hierarchy::apply(const Level& L, const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(L.size(), 0.0);
    const std::size_t nx = L.dims[0];
    for_rows(L.dims, [&](std::size_t r, int j, int k) {
        const std::size_t base = r * nx;
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t idx = base + i;
            if (!L.active[idx]) continue;
            double v = L.diag[idx] * x[idx];
            if (i + 1 < nx) v -= L.face[0][idx] * x[idx + 1];
            if (i > 0) v -= L.face[0][idx - 1] * x[idx - 1];
            if (n > 1) {
                if (j + 1 < L.dims[1]) v -= L.face[1][idx] * x[idx + L.stride[1]];
                if (j > 0) v -= L.face[1][idx - L.stride[1]] * x[idx - L.stride[1]];
            }
            if (n > 2) {
                if (k + 1 < L.dims[2]) v -= L.face[2][idx] * x[idx + L.stride[2]];
                if (k > 0) v -= L.face[2][idx - L.stride[2]] * x[idx - L.stride[2]];
            }
            y[idx] = v;
        }
    });
}

void System::Hierarchy::smooth(const Level& L, const std::vector<double>& b, std::vector<double>& x, int color) const {
    const std::size_t nx = L.dims[0];
    for_rows(L.dims, [&](std::size_t r, int j, int k) {
        const std::size_t base = r * nx;
        for (std::size_t i = std::size_t((color + j + k) & 1); i < nx; i += 2) {
            const std::size_t idx = base + i;
            if (!L.active[idx]) continue;
            double v = b[idx];
            if (i + 1 < nx) v += L.face[0][idx] * x[idx + 1];
            if (i > 0) v += L.face[0][idx - 1] * x[idx - 1];
            if (n > 1) {
                if (j + 1 < L.dims[1]) v += L.face[1][idx] * x[idx + L.stride[1]];
                if (j > 0) v += L.face[1][idx - L.stride[1]] * x[idx - L.stride[1]];
            }
            if (n > 2) {
                if (k + 1 < L.dims[2]) v += L.face[2][idx] * x[idx + L.stride[2]];
                if (k > 0) v += L.face[2][idx - L.stride[2]] * x[idx - L.stride[2]];
            }
            x[idx] = v / L.diag[idx];
        }
    });
}

void System::Hierarchy::cycle(std::size_t l, const std::vector<double>& b, std::vector<double>& x,
                              std::vector<std::vector<double>>& work) const {
    const Level& L = levels[l];
    x.assign(L.size(), 0.0);
    if (l + 1 == levels.size()) {
        Eigen::VectorXd rhs(dense_cells.size());
        for (std::size_t i = 0; i < dense_cells.size(); ++i) rhs[i] = b[dense_cells[i]];
        Eigen::VectorXd sol = dense.solve(rhs);
        for (std::size_t i = 0; i < dense_cells.size(); ++i) x[dense_cells[i]] = sol[i];
        return;
    }
    smooth(L, b, x, 0);
    smooth(L, b, x, 1);
    std::vector<double>& r = work[3 * l];
    apply(L, x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = L.active[i] ? b[i] - r[i] : 0.0;
    const Level& C = levels[l + 1];
    std::vector<double>& bc = work[3 * l + 1];
    std::vector<double>& xc = work[3 * l + 2];
    bc.assign(C.size(), 0.0);
    // Restrict over coarse rows: each gathers its 2x2 block of fine rows.
    const std::size_t fx = L.dims[0];
    for_rows(C.dims, [&](std::size_t rc, int jc, int kc) {
        for (int dk = 0; dk < (n > 2 ? 2 : 1); ++dk)
            for (int dj = 0; dj < (n > 1 ? 2 : 1); ++dj) {
                int j = 2 * jc + dj, k = 2 * kc + dk;
                if (j >= L.dims[1] || k >= L.dims[2]) continue;
                const std::size_t base = L.stride[1] * j + L.stride[2] * k;
                for (std::size_t i = 0; i < fx; ++i)
                    if (L.active[base + i]) bc[rc * C.dims[0] + i / 2] += r[base + i];
            }
    });
    cycle(l + 1, bc, xc, work);
    for_rows(L.dims, [&](std::size_t r0, int j, int k) {
        const std::size_t base = r0 * fx;
        const std::size_t cbase = C.stride[1] * (j / 2) + C.stride[2] * (k / 2);
        for (std::size_t i = 0; i < fx; ++i)
            if (L.active[base + i]) x[base + i] += kCoarseScale * xc[cbase + i / 2];
    });
    smooth(L, b, x, 1);
    smooth(L, b, x, 0);
}

System::~System() = default;
System::System(System&&) noexcept = default;

const System::Hierarchy& System::hierarchy() const {
    std::call_once(*hierarchy_once_, [&] {
        auto h = std::make_unique<Hierarchy>();
        const int n = grid_->dim();
        h->n = n;
        Hierarchy::Level top;
        top.dims = grid_->dims();
        top.stride = stride_;
        top.diag = diag_;
        top.active.resize(fixed_.size());
        for (std::size_t i = 0; i < fixed_.size(); ++i) top.active[i] = !fixed_[i];
        for (int ax = 0; ax < n; ++ax) {
            top.face[ax] = face_[ax];
            for (std::size_t i = 0; i < fixed_.size(); ++i)
                if (top.face[ax][i] != 0 && (fixed_[i] || fixed_[i + stride_[ax]])) top.face[ax][i] = 0;
        }
        h->levels.push_back(std::move(top));
        while (true) {
            const auto& F = h->levels.back();
            std::size_t active = std::count(F.active.begin(), F.active.end(), std::uint8_t(1));
            bool can_coarsen = false;
            for (int ax = 0; ax < n; ++ax) can_coarsen |= F.dims[ax] > 2;
            if (active <= 512 || !can_coarsen) break;
            Hierarchy::Level C;
            for (int ax = 0; ax < 3; ++ax) C.dims[ax] = ax < n ? (F.dims[ax] + 1) / 2 : 1;
            C.stride = {1, std::size_t(C.dims[0]), std::size_t(C.dims[0]) * C.dims[1]};
            std::size_t total = std::size_t(C.dims[0]) * C.dims[1] * C.dims[2];
            C.diag.assign(total, 0.0);
            C.active.assign(total, 0);
            for (int ax = 0; ax < n; ++ax) C.face[ax].assign(total, 0.0);
            for (std::size_t idx = 0; idx < F.size(); ++idx) {
                if (!F.active[idx]) continue;
                std::array<std::size_t, 3> c{idx % F.dims[0], (idx / F.dims[0]) % F.dims[1], idx / F.stride[2]};
                std::size_t p = c[0] / 2 + C.stride[1] * (c[1] / 2) + C.stride[2] * (c[2] / 2);
                C.active[p] = 1;
                C.diag[p] += F.diag[idx];
                for (int ax = 0; ax < n; ++ax) {
                    double k = F.face[ax][idx];
                    if (k == 0) continue;
                    if (c[ax] % 2 == 0) C.diag[p] -= 2 * k;
                    else C.face[ax][p] += k;
                }
            }
            h->levels.push_back(std::move(C));
        }
        const auto& last = h->levels.back();
        h->dense_index.assign(last.size(), -1);
        for (std::size_t i = 0; i < last.size(); ++i)
            if (last.active[i]) {
                h->dense_index[i] = long(h->dense_cells.size());
                h->dense_cells.push_back(i);
            }
        const std::size_t m = h->dense_cells.size();
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(long(m), long(m));
        for (std::size_t row = 0; row < m; ++row) {
            std::size_t idx = h->dense_cells[row];
            a(long(row), long(row)) = last.diag[idx];
            std::array<std::size_t, 3> c{idx % last.dims[0], (idx / last.dims[0]) % last.dims[1], idx / last.stride[2]};
            for (int ax = 0; ax < n; ++ax) {
                if (c[ax] + 1 >= std::size_t(last.dims[ax])) continue;
                std::size_t nb = idx + last.stride[ax];
                double k = last.face[ax][idx];
                if (k == 0 || h->dense_index[nb] < 0) continue;
                a(long(row), h->dense_index[nb]) = -k;
                a(h->dense_index[nb], long(row)) = -k;
            }
        }
        h->dense.compute(a);
        hierarchy_ = std::move(h);
    });
    return *hierarchy_;
}

SolveStats conjugate_gradient(const System& system, const std::vector<double>& b, std::vector<double>& x,
                              const SolverOptions& options) {
    const std::size_t total = b.size();
    if (x.size() != total) x.assign(total, 0.0);
    SolveStats stats;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }
    std::vector<double> inv(total, 0.0);
    for (std::size_t i = 0; i < total; ++i)
        if (!system.fixed(i)) inv[i] = 1.0 / system.diagonal(i);
    const bool multigrid = options.preconditioner == Preconditioner::Multigrid;
    const System::Hierarchy* mg = multigrid ? &system.hierarchy() : nullptr;
    std::vector<std::vector<double>> work(multigrid ? 3 * mg->levels.size() : 0);
    auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
        if (multigrid) {
            mg->cycle(0, r, z, work);
            return;
        }
        for (std::size_t i = 0; i < total; ++i) z[i] = inv[i] * r[i];
    };

    std::vector<double> r(total), z(total), p(total), q(total);
    for (int restart = 0; restart < 4; ++restart) {
        system.apply(x, q);
        for (std::size_t i = 0; i < total; ++i) r[i] = system.fixed(i) ? 0.0 : b[i] - q[i];
        double res = std::sqrt(dot(r, r)) / bnorm;
        if (res <= options.tolerance) {
            stats.residual = res;
            return stats;
        }
        precondition(r, z);
        p = z;
        double rz = dot(r, z);
        double best = res;
        int best_it = stats.iterations;
        while (true) {
            if (stats.iterations >= options.max_iterations)
                throw SolverError("conjugate gradient hit the iteration limit at relative residual " +
                                  std::to_string(res));
            system.apply(p, q);
            double pq = dot(p, q);
            if (!(pq > 0)) break;
            double alpha = rz / pq;
            parallel_chunks(total, kChunk, [&](std::size_t s, std::size_t e) {
                for (std::size_t i = s; i < e; ++i) {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * q[i];
                }
            });
            ++stats.iterations;
            res = std::sqrt(dot(r, r)) / bnorm;
            if (res < best) {
                best = res;
                best_it = stats.iterations;
            }
            if (res <= options.tolerance) break;
            if (stats.iterations - best_it > options.stagnation_window) {
                double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
                for (std::size_t i = 0; i < total; ++i)
                    if (!system.fixed(i)) {
                        dmin = std::min(dmin, system.diagonal(i));
                        dmax = std::max(dmax, system.diagonal(i));
                    }
                std::ostringstream msg;
                msg << "conjugate gradient stagnated after " << stats.iterations << " iterations at relative residual "
                    << res << " (best " << best << "); diagonal range [" << dmin << ", " << dmax << "], "
                    << system.unknowns() << " unknowns";
                throw SolverError(msg.str());
            }
            precondition(r, z);
            double rz_new = dot(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            parallel_chunks(total, kChunk, [&](std::size_t s, std::size_t e) {
                for (std::size_t i = s; i < e; ++i) p[i] = z[i] + beta * p[i];
            });
        }
        // Recurrence residual converged; confirm with the true residual.
        system.apply(x, q);
        for (std::size_t i = 0; i < total; ++i) r[i] = system.fixed(i) ? 0.0 : b[i] - q[i];
        stats.residual = std::sqrt(dot(r, r)) / bnorm;
        if (stats.residual <= options.tolerance * 10) return stats;
    }
    throw SolverError("conjugate gradient residual drifted to " + std::to_string(stats.residual));
}

SolveStats refined_solve(const System& system, const std::vector<double>& b, std::vector<double>& x,
                         const SolverOptions& options) {
    SolveStats stats = conjugate_gradient(system, b, x, options);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0) return stats;
    std::vector<long double> r;
    std::vector<double> rd(b.size()), e;
    double last = std::numeric_limits<double>::infinity();
    for (int step = 0; step < options.refinement_steps; ++step) {
        system.residual(b, x, r);
        long double sq = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            rd[i] = double(r[i]);
            sq += r[i] * r[i];
        }
        double rel = double(std::sqrt(sq)) / bnorm;
        stats.residual = rel;
        if (rel <= 1e-16 || rel >= 0.5 * last) break;
        last = rel;
        e.assign(b.size(), 0.0);
        SolveStats inner = conjugate_gradient(system, rd, e, options);
        stats.iterations += inner.iterations;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += e[i];
    }
    return stats;
}

double SolutionField::max_principle_violation(const System& system) const {
    double worst = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (system.fixed(i)) continue;
        worst = std::max({worst, u[i] - data_max, data_min - u[i]});
    }
    return worst;
}

SolutionField solve_dirichlet(const System& system, const DirichletData& data, const SolverOptions& options) {
    const Grid& grid = system.grid();
    if (data.absorbing.size() != grid.absorbing_cells().size())
        throw ArgumentError("Dirichlet data must give one value per absorbing cell");
    std::vector<double> values(grid.size(), 0.0);
    SolutionField sol;
    sol.descriptor = data.descriptor;
    sol.data_min = std::numeric_limits<double>::infinity();
    sol.data_max = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < data.absorbing.size(); ++s) {
        double v = data.absorbing[s];
        if (!std::isfinite(v)) throw ArgumentError("Dirichlet data must be finite");
        values[grid.absorbing_cells()[s]] = v;
        sol.data_min = std::min(sol.data_min, v);
        sol.data_max = std::max(sol.data_max, v);
    }
    if (system.walls() == WallMode::Dirichlet) {
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            if (grid.absorbing(idx) || !grid.wall(idx)) continue;
            double v = data.wall ? data.wall(grid.center(idx)) : 0.0;
            values[idx] = v;
            sol.data_min = std::min(sol.data_min, v);
            sol.data_max = std::max(sol.data_max, v);
        }
    }
    std::vector<double> b = system.boundary_rhs(values);
    std::vector<double> x(grid.size(), 0.0);
    SolveStats st = conjugate_gradient(system, b, x, options);
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
        if (system.fixed(idx)) x[idx] = values[idx];
    sol.u = std::move(x);
    sol.residual = st.residual;
    sol.iterations = st.iterations;
    return sol;
}

GreenField green_function(const System& system, const Point& pole, const SolverOptions& options) {
    const Grid& grid = system.grid();
    long cell = grid.locate(pole);
    if (cell < 0) throw ArgumentError("pole lies outside the grid box");
    if (system.fixed(std::size_t(cell))) throw ArgumentError("pole lies in an absorbing cell");
    std::vector<double> b(grid.size(), 0.0);
    b[std::size_t(cell)] = 1.0;
    GreenField gf;
    gf.pole = pole;
    gf.pole_cell = std::size_t(cell);
    gf.g.assign(grid.size(), 0.0);
    SolveStats st = refined_solve(system, b, gf.g, options);
    gf.residual = st.residual;
    gf.iterations = st.iterations;
    return gf;
}

double HarmonicMeasureRow::total() const {
    long double s = 0;
    for (double v : p) s += v;
    return double(s);
}

double HarmonicMeasureRow::min() const { return p.empty() ? 0.0 : *std::min_element(p.begin(), p.end()); }

double HarmonicMeasureRow::mass(const std::vector<char>& in_set) const {
    long double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (in_set[i]) s += p[i];
    return double(s);
}

HarmonicMeasureRow harmonic_measure_row(const System& system, const GreenField& green) {
    const Grid& grid = system.grid();
    HarmonicMeasureRow row;
    row.pole = green.pole;
    row.p.assign(grid.absorbing_cells().size(), 0.0);
    for (std::size_t s = 0; s < row.p.size(); ++s) {
        long double acc = 0;
        system.for_each_neighbor(grid.absorbing_cells()[s], [&](std::size_t nb, double k) {
            if (!system.fixed(nb)) acc += (long double)k * green.g[nb];
        });
        row.p[s] = double(acc);
    }
    return row;
}

HarmonicMeasureRow harmonic_measure_row(const System& system, const Point& pole, const SolverOptions& options) {
    return harmonic_measure_row(system, green_function(system, pole, options));
}

double harmonic_measure(const System& system, const Point& pole, const std::vector<char>& in_set,
                        const SolverOptions& options) {
    const Grid& grid = system.grid();
    long cell = grid.locate(pole);
    if (cell < 0) throw ArgumentError("pole lies outside the grid box");
    if (system.fixed(std::size_t(cell))) throw ArgumentError("pole lies in an absorbing cell");
    DirichletData data;
    data.absorbing.resize(grid.absorbing_cells().size());
    for (std::size_t s = 0; s < data.absorbing.size(); ++s) data.absorbing[s] = in_set[s] ? 1.0 : 0.0;
    return solve_dirichlet(system, data, options).at(std::size_t(cell));
}

SampleCoupling::SampleCoupling(const Grid& grid) : grid_(&grid) {
    const BoundarySet& gamma = grid.boundary();
    const std::size_t slots = grid.absorbing_cells().size();
    cell_shares_.assign(slots, {});
    cell_sigma_.assign(slots, 0.0);
    coupled_.assign(gamma.size(), 0);
    const int n = grid.dim();
    const auto& dims = grid.dims();
    const int reach = int(std::ceil(grid.r_abs() / grid.h())) + 1;
    for (std::size_t s = 0; s < gamma.size(); ++s) {
        const Point& y = gamma.samples()[s];
        long home = grid.locate(y);
        if (home < 0) continue;
        auto c = grid.coords(std::size_t(home));
        std::vector<std::pair<double, std::size_t>> cand;
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        for (int ax = 0; ax < n; ++ax) {
            lo[ax] = std::max(0, c[ax] - reach);
            hi[ax] = std::min(dims[ax] - 1, c[ax] + reach);
        }
        for (int k = lo[2]; k <= hi[2]; ++k)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int i = lo[0]; i <= hi[0]; ++i) {
                    std::size_t idx = grid.index(i, j, k);
                    if (grid.absorbing(idx)) cand.emplace_back(dist(y, grid.center(idx)), idx);
                }
        if (cand.empty()) continue;
        double best = std::min_element(cand.begin(), cand.end())->first;
        std::vector<std::size_t> ties;
        for (auto& [dd, idx] : cand)
            if (dd <= best + 1e-12 * grid.h()) ties.push_back(idx);
        double w = gamma.sigma_weights()[s] / double(ties.size());
        for (std::size_t idx : ties) {
            long slot = grid.absorbing_slot(idx);
            cell_shares_[slot].push_back({s, w});
            cell_sigma_[slot] += w;
        }
        coupled_[s] = 1;
    }
    fallback_.assign(slots, 0);
    for (std::size_t slot = 0; slot < slots; ++slot)
        if (cell_sigma_[slot] == 0) fallback_[slot] = gamma.nearest_sample(grid.center(grid.absorbing_cells()[slot]));
}

std::vector<double> SampleCoupling::sample_measure(const HarmonicMeasureRow& row) const {
    std::vector<double> omega(grid_->boundary().size(), 0.0);
    for (std::size_t slot = 0; slot < row.p.size(); ++slot) {
        if (cell_sigma_[slot] == 0) {
            omega[fallback_[slot]] += row.p[slot];
            continue;
        }
        for (const auto& sh : cell_shares_[slot]) omega[sh.sample] += row.p[slot] * sh.weight / cell_sigma_[slot];
    }
    return omega;
}

std::vector<double> SampleCoupling::cell_data(const std::vector<double>& sample_values) const {
    std::vector<double> out(cell_shares_.size(), 0.0);
    for (std::size_t slot = 0; slot < out.size(); ++slot) {
        if (cell_sigma_[slot] == 0) {
            out[slot] = sample_values[fallback_[slot]];
            continue;
        }
        double acc = 0;
        for (const auto& sh : cell_shares_[slot]) acc += sh.weight * sample_values[sh.sample];
        out[slot] = acc / cell_sigma_[slot];
    }
    return out;
}

}  // namespace hmlab
