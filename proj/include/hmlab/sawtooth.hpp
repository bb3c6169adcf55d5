#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hmlab/dyadic.hpp"
#include "hmlab/metric.hpp"
#include "hmlab/whitney.hpp"

namespace hmlab {

struct WqParams {
    double eta = 0x1p-32;
    double K = 0x1p12;
    HarnackOptions harnack;
    int max_escalations = 2;
};

// W_Q^0: Whitney boxes with eta^(1/4) l(Q) <= l(I) <= K^(1/2) l(Q) and
// dist(I, Q) <= K^(1/2) l(Q).
std::vector<int> wq0_filter(const DyadicLattice& lattice, const WhitneyDecomposition& whitney, int cube, double eta, double K);

struct WqReport {
    double eta = 0;
    double K = 0;
    int escalations = 0;
    std::size_t max_wq = 0;       // N_0
    double min_size_ratio = 0;    // min l(I) / l(Q) over the augmented collections
    double max_dist_ratio = 0;    // max dist(I, Q) / l(Q)
};

// Per-cube Whitney regions: W_Q^0 augmented with the boxes met by Harnack
// chains from each X_I to the corkscrew X_Q of Delta(x_Q, r_Q / 2). Built for
// a fixed set of cubes; eta and K escalate when a corkscrew misses W_Q^0.
class WhitneyRegions {
public:
    WhitneyRegions(const DyadicLattice& lattice, const WhitneyDecomposition& whitney, const WqParams& params,
                   std::vector<int> cubes = {});

    const DyadicLattice& lattice() const { return *lattice_; }
    const WhitneyDecomposition& whitney() const { return *whitney_; }
    const BoundarySet& boundary() const { return lattice_->boundary(); }
    bool has(int cube) const;
    const std::vector<int>& wq0(int cube) const;
    const std::vector<int>& wq(int cube) const;
    Point xq(int cube) const;
    const std::vector<int>& cubes() const { return cubes_; }
    const WqReport& report() const { return report_; }
    double eta() const { return report_.eta; }
    double K() const { return report_.K; }

private:
    bool build(double eta, double K);

    const DyadicLattice* lattice_;
    const WhitneyDecomposition* whitney_;
    WqParams params_;
    std::vector<int> cubes_;
    std::vector<int> slot_;  // cube id -> index into the tables below, -1 when absent
    std::vector<std::vector<int>> wq0_;
    std::vector<std::vector<int>> wq_;
    std::vector<Point> xq_;
    WqReport report_;
};

struct SawtoothDomain {
    int root = -1;
    CubeFamily family;
    std::optional<int> truncation;
    int level = 1;                 // 1: *, 2: **, 3: ***
    std::vector<int> cubes;        // D_{F,Q}
    std::vector<int> boxes;        // W_{F,Q}, sorted
    double c3 = 0;                 // Omega contained in B(x_Q, c3 l(Q))
    double min_distance_ratio = 0; // dist(Omega, Gamma) / (2^-N l(Q)) when truncated

    bool empty() const { return boxes.empty(); }
    bool has_box(int id) const;
    bool contains(const WhitneyRegions& regions, const Point& x) const;
    bool contains_at(const WhitneyRegions& regions, const Point& x, int level_override) const;
};

SawtoothDomain build_sawtooth(const WhitneyRegions& regions, int root, const CubeFamily& family, int level,
                              std::optional<int> truncation = std::nullopt);

// Samples of the root cube outside every member of the family.
std::vector<std::size_t> family_complement(const DyadicLattice& lattice, const CubeFamily& family);

struct CutoffValue {
    double psi = 0;
    Point grad{0, 0, 0};
    int overlap = 0;   // boxes with phi_I(X) != 0
};

// psi_N = sum_{I in W_N} phi_I / sum_{I in W} phi_I with quintic smoothstep
// bumps equal to 1 on I* and vanishing outside I**.
class CutoffField {
public:
    CutoffField(const WhitneyRegions& regions, const SawtoothDomain& truncated);

    CutoffValue evaluate(const Point& x) const;
    const std::vector<int>& wn() const { return domain_.boxes; }
    const std::vector<int>& wn_sigma() const { return sigma_; }
    bool in_wn(int box) const { return domain_.has_box(box); }
    // Smallest-length admissible cube (ties by id), or the largest one.
    int associated_cube(int box, bool alternative = false) const;
    // Analytic bound on |grad psi| * delta for a given overlap count.
    double gradient_bound(int overlap) const;
    const SawtoothDomain& domain() const { return domain_; }

private:
    double bump(int box, const Point& x, Point* grad) const;

    const WhitneyRegions* regions_;
    SawtoothDomain domain_;
    std::vector<int> sigma_;
};

// Sum over W_N^Sigma of omega(Q_I); omega is a cube-indexed measure.
double sigma_boundary_mass(const CutoffField& cutoff, const std::function<double(int)>& omega, bool alternative = false);

enum class ConeVariant { Standard, Dyadic, Fattened, Local, KappaTruncated };

struct ConeOptions {
    double aperture = 1.0;   // standard and kappa-truncated variants
    int local_root = -1;     // local variant: cubes of D_root only
    double kappa = 0.0;      // kappa-truncated variant: kappa <= l(Q) <= 1/kappa
    bool fattened = false;   // kappa-truncated variant: use U_Q*** (beta cone)
    double truncation = 0;   // optional |X - q| < truncation for the standard variant
};

class Cone {
public:
    Cone(const WhitneyRegions& regions, const Point& q, ConeVariant variant, const ConeOptions& options = {});
    // Standard cone without any lattice.
    Cone(const BoundarySet& gamma, const Point& q, const ConeOptions& options);

    bool contains(const Point& x) const;
    const std::vector<int>& boxes() const { return boxes_; }

private:
    const BoundarySet* gamma_;
    const WhitneyRegions* regions_ = nullptr;
    Point q_;
    ConeVariant variant_;
    ConeOptions options_;
    int level_ = 1;
    std::vector<int> boxes_;
};

struct ConeInclusionReport {
    std::size_t tested = 0;
    std::size_t in_standard = 0;
    std::size_t standard_outside_dyadic = 0;
    std::size_t in_dyadic = 0;
    double alpha1 = 0;   // max |X - q| / delta(X) - 1 over the dyadic cone
    double beta = 0;     // same over the fattened cone
};

// Inclusion chain Gamma^alpha(q) in Gamma_d(q) in Gamma^alpha1(q) and the
// fattened cone in Gamma^beta(q), checked on the given points. Standard-cone
// points are only counted when delta(X) lies in [delta_lo, delta_hi].
ConeInclusionReport check_cone_inclusion(const WhitneyRegions& regions, const Point& q, double alpha,
                                         const std::vector<Point>& points, double delta_lo, double delta_hi);

}  // namespace hmlab
