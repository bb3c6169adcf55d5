#pragma once

#include <string>
#include <vector>

#include "hmlab/grid.hpp"

namespace hmlab {

// Finite-difference gradient at a cell: central where both neighbours are
// non-absorbing, one-sided toward the interior otherwise.
Point grid_gradient(const Grid& grid, const std::vector<double>& u, std::size_t idx);

// A solved field with cached |grad u|^2. Cells counted by the functionals are
// the non-absorbing ones with delta >= h.
class FieldView {
public:
    FieldView(const Grid& grid, const std::vector<double>& u);

    const Grid& grid() const { return *grid_; }
    double value(std::size_t idx) const { return (*u_)[idx]; }
    double grad2(std::size_t idx) const { return grad2_[idx]; }
    bool counted(std::size_t idx) const { return counted_[idx] != 0; }
    // Weight delta^(d-n+1) at a counted cell.
    double weight(std::size_t idx) const { return weight_[idx]; }

    // Calls f(idx, center) for every counted cell with centre inside the
    // closed box.
    template <class F>
    void for_cells_in_box(const AxisBox& box, F&& f) const;

private:
    const Grid* grid_;
    const std::vector<double>* u_;
    std::vector<double> grad2_;
    std::vector<double> weight_;
    std::vector<char> counted_;
};

template <class F>
void FieldView::for_cells_in_box(const AxisBox& box, F&& f) const {
    const Grid& g = *grid_;
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int ax = 0; ax < g.dim(); ++ax) {
        double a = (box.lo[ax] - g.origin()[ax]) / g.h() - 0.5;
        double b = (box.hi[ax] - g.origin()[ax]) / g.h() - 0.5;
        lo[ax] = std::max(0, int(std::ceil(a)));
        hi[ax] = std::min(g.dims()[ax] - 1, int(std::floor(b)));
        if (lo[ax] > hi[ax]) return;
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i) {
                std::size_t idx = g.index(i, j, k);
                if (counted_[idx]) f(idx, g.center(idx));
            }
}

struct ConeSpec {
    Point q{0, 0, 0};
    double aperture = 1.0;
    double truncation = 0;  // 0: untruncated (limited by the grid box)
};

// |X - q| < (1 + aperture) delta(X), and |X - q| < truncation when set.
bool cone_contains(const ConeSpec& cone, const Point& x, double delta);

// ( sum over counted cone cells of |grad u|^2 delta^(1-d) w h^n )^(1/2).
double square_function(const FieldView& field, const ConeSpec& cone);
// Square functions for several apertures in one sweep (same vertex and truncation).
std::vector<double> square_functions(const FieldView& field, const Point& q, const std::vector<double>& apertures,
                                     double truncation);
// max |u| over counted cone cells.
double nontangential_max(const FieldView& field, const ConeSpec& cone);

struct BoundaryFunction {
    std::vector<double> values;  // per sample
    std::string descriptor;
};

// Surface balls B(y, 2^-k) at every `stride`-th sample y inside `region`,
// k in [k_lo, k_hi].
struct Census {
    std::vector<std::size_t> centers;
    std::vector<double> radii;
    std::size_t size() const { return centers.size() * radii.size(); }
};

Census make_census(const BoundarySet& gamma, const AxisBox& region, int k_lo, int k_hi, std::size_t stride = 1);

// sup over the census of (avg |f - f_Delta|^2)^(1/2), sigma-weighted.
double bmo_norm(const BoundarySet& gamma, const std::vector<double>& f, const Census& census);

// M_sigma f (p = 1) or M_p f = (M_sigma |f|^p)^(1/p) at q: sup over census
// balls containing q.
double maximal_function(const BoundarySet& gamma, const std::vector<double>& f, const Point& q, const Census& census,
                        double p = 1.0);
// Same at every sample at once.
std::vector<double> maximal_function_samples(const BoundarySet& gamma, const std::vector<double>& f,
                                             const Census& census, double p = 1.0);

struct CarlesonBall {
    Point q{0, 0, 0};
    double r = 0;
    double sigma = 0;
    double carleson = 0;  // int_{T(Delta)} |grad u|^2 delta^(d-n+2) dX
    double middle = 0;    // int_{T(Delta)} |grad u|^2 delta^(1-d) sigma(Delta^X) dm
    double lower = 0;     // int_{Delta/2} |S_{r/2} u|^2 dsigma
    double upper = 0;     // int_{(alpha+2) Delta} |S_{(alpha+1) r} u|^2 dsigma
};

double carleson_integral(const FieldView& field, const Point& q, double r);
// sup over the census of sigma(Delta)^-1 times the Carleson integral; balls
// leaving the grid box are skipped.
double carleson_norm(const FieldView& field, const Census& census);
CarlesonBall carleson_square_bracket(const FieldView& field, const Point& q, double r, double alpha);

// f = max{0, 1 + gl_delta log M_sigma chi_E}; throws ArgumentError when sigma(E) = 0.
BoundaryFunction log_maximal_data(const BoundarySet& gamma, const std::vector<char>& in_set, double gl_delta,
                                  const Census& census);
// Normalized average against a smooth compactly supported kernel of width eps.
BoundaryFunction mollify(const BoundarySet& gamma, const BoundaryFunction& f, double eps);

struct StripeResult {
    double lhs = 0;
    double rhs = 0;
    double ratio = 0;  // lhs / rhs, 0 when both vanish
};

// Stripe Poincare pair for the cone Gamma^alpha(q) at height 2^-j r, with the
// gradient side taken over stripes j - m1 .. j + m2 of aperture alpha_bar.
StripeResult poincare_stripe(const FieldView& field, const Point& q, double r, int j, double alpha, int m1, int m2,
                             double alpha_bar);

}  // namespace hmlab
