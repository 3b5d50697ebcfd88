#pragma once
// Desk-scale version of the fixed-point construction for the nonlinear problem.
//
// The exact Green tensor of the half-space is not implemented. Its gradient is replaced
// by the scalar surrogate kernel
//     kappa(x, y, s) = 1 / ((|x - y| + sqrt(s))^n sqrt(s)),
// the pointwise upper bound of |grad G| with constant 1. All tensor indices collapse, and
// fields are carried as pointwise magnitudes (|f|, |grad f|). The bilinear map acts on these
// magnitudes, so the iteration is the sign-free majorant of the true one. Conclusions are
// about the contraction arithmetic and the norm bookkeeping, not about the true
// Navier-Stokes solution. n = 3 only.

#include <vector>

#include "hsflow/flux.hpp"
#include "hsflow/quad.hpp"

namespace hsflow {

/// Product grid over [-L, L]^2 x [xn_min, xn_max] x (0, 2): n_tan uniform nodes per tangential
/// axis, n_xn log-spaced normal nodes, n_t time nodes at the midpoints of n_t equal cells.
struct PicardGrid {
    int n_tan = 17;
    double half_width = 20.0;
    int n_xn = 12;
    double xn_min = 0.05, xn_max = 20.0;
    int n_t = 16;

    std::vector<double> tangential_nodes() const;
    std::vector<double> normal_nodes() const;
    /// Cell boundaries in x_n (n_xn + 1 values, the first is 0).
    std::vector<double> normal_cells() const;
    std::vector<double> time_nodes() const;
    std::size_t size() const;
    /// Flat index; i1, i2 tangential, j normal, k time.
    std::size_t index(int i1, int i2, int j, int k) const {
        return ((static_cast<std::size_t>(k) * n_xn + j) * n_tan + i1) * n_tan + i2;
    }
    void validate() const;
};

/// Pointwise magnitudes of a vector field and of its gradient on a PicardGrid.
struct SampledField {
    PicardGrid grid;
    std::vector<double> value;  // |f(x, t)|
    std::vector<double> grad;   // |grad f(x, t)| (Frobenius)

    static SampledField zeros(const PicardGrid& g);
};

/// The boundary-driven flow on the grid (values from flow_on_tangential_grid).
SampledField sample_flow_field(const FluxSpec& spec, const PicardGrid& grid, const QuadSpec& q);

/// sup (|f| + |grad f|) <x>^n.
double x_norm(const SampledField& f);
/// sup [ |f| <x>^{n-1} + |grad f| / (<x>^{-n} + LN(x_n, t) / (<x>^{n-1} (x_n+1)^{2a})) ].
double y_norm(const SampledField& f, double a);

/// The field with |f| = <x>^{1-n} and |grad f| equal to the Y gradient weight.
SampledField y_envelope_field(const PicardGrid& grid, double a);

/// Grid quadrature of the surrogate convolution. Fields are taken piecewise constant on
/// grid cells (tangential width 2L/(n_tan-1), normal cells between geometric midpoints,
/// time cells of width 2/n_t); the kernel is integrated over each cell, in closed form in
/// time and by Gauss-Legendre in space with a singularity subtraction on the own cell.
class SurrogateBilinear {
public:
    explicit SurrogateBilinear(const PicardGrid& grid);

    /// B(f, g): value  int_0^t int kappa(x, y, t-s) |f| |g| dy ds,
    ///          grad   int_0^t int kappa(x, y, t-s) (|grad f| |g| + |f| |grad g|) dy ds.
    SampledField apply(const SampledField& f, const SampledField& g) const;

    /// Cell weight: int over the cell at offsets (d1, d2) of normal cell ji and time offset dk
    /// of kappa, seen from the node of normal index jo.
    double weight(int d1, int d2, int jo, int ji, int dk) const;

    const PicardGrid& grid() const { return grid_; }

private:
    PicardGrid grid_;
    std::vector<double> w_;  // [dk][jo][ji][|d1|][|d2|]
};

/// C1 = ||B(E, E)||_X for the Y envelope field E. Any f, g on the grid then satisfy
/// ||B(f, g)||_X <= C1 ||f||_Y ||g||_Y, because B is positive and |f| <= ||f||_Y E.
double calibrate_C1(const SurrogateBilinear& B, double a);

struct PicardResult {
    double alpha = 0.0;
    std::vector<SampledField> iterates;  // v^(0) = 0, v^(1), ...
    std::vector<double> x_norms;         // ||v^(m)||_X
    std::vector<double> diff_norms;      // ||v^(m) - v^(m-1)||_X, entry m (entry 0 unused)
    std::vector<double> diff_ratios;     // diff_norms[m] / diff_norms[m-1], entry m >= 2
    bool diverged = false;               // some ratio > 1 or a norm became non-finite
};

/// v^(m+1) = B(|alpha| vhat + v^(m), |alpha| vhat + v^(m)) for m < m_max.
PicardResult picard_iterate(double alpha, const SampledField& vhat, const SurrogateBilinear& B, int m_max);

/// alpha_0 = 1 / (8 C1 A), A = ||vhat||_Y.
double picard_threshold(double C1, double A);

}  // namespace hsflow
