#include "fpt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

#include "fpt/clock.hpp"

namespace fpt {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule; positive abscissae,
// descending.  Even indices are the Gauss points.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const std::function<double(double)>& fn, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double hlgth = 0.5 * (hi - lo);

    double fv[15];
    // fv indexed by abscissa: 0..6 -> +kXgk[0..6], 7 -> center, 8..14 -> -kXgk[6..0]
    for (int j = 0; j < 7; ++j) {
        fv[j] = fn(center + hlgth * kXgk[j]);
        fv[14 - j] = fn(center - hlgth * kXgk[j]);
    }
    fv[7] = fn(center);

    double resk = kWgk[7] * fv[7];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        resk += kWgk[j] * (fv[j] + fv[14 - j]);
        resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    }
    double resg = kWg[3] * fv[7];
    for (int j = 0; j < 3; ++j) {
        const int k = 2 * j + 1;  // Gauss abscissae sit at odd Kronrod indices
        resg += kWg[j] * (fv[k] + fv[14 - k]);
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fv[7] - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));

    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);

    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * eps))
        abserr = std::max(eps * 50.0 * resabs, abserr);

    return {resk * hlgth, abserr};
}

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

QuadratureResult adapt(const std::function<double(double)>& fn, double lo, double hi,
                       double abs_tol, int max_segments) {
    std::priority_queue<Segment> heap;
    PanelResult first = gk15(fn, lo, hi);
    heap.push({lo, hi, first.value, first.error});
    double total_err = first.error;
    int n_panels = 1;

    const double eps = std::numeric_limits<double>::epsilon();
    while (total_err > abs_tol && n_panels < max_segments) {
        Segment worst = heap.top();
        const double width = worst.hi - worst.lo;
        if (width < 64.0 * eps * std::max({1.0, std::abs(worst.lo), std::abs(worst.hi)})) {
            // interval shrunk below representable resolution: the integrand
            // is genuinely singular there
            double value = 0.0;
            while (!heap.empty()) { value += heap.top().value; heap.pop(); }
            throw QuadratureError("quadrature stalled on a vanishing interval",
                                  worst.lo, worst.hi, value, total_err);
        }
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        PanelResult left = gk15(fn, worst.lo, mid);
        PanelResult right = gk15(fn, mid, worst.hi);
        total_err += left.error + right.error - worst.error;
        heap.push({worst.lo, mid, left.value, left.error});
        heap.push({mid, worst.hi, right.value, right.error});
        ++n_panels;
    }

    Segment worst = heap.top();
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(n_panels));
    while (!heap.empty()) {
        vals.push_back(heap.top().value);
        heap.pop();
    }
    const double value = pairwise_sum(vals);
    if (total_err > abs_tol)
        throw QuadratureError("quadrature did not reach tolerance " + std::to_string(abs_tol) +
                              " in " + std::to_string(n_panels) + " panels",
                              worst.lo, worst.hi, value, total_err);
    return {value, total_err, n_panels};
}

}  // namespace

QuadratureResult integrate_adaptive_full(const std::function<double(double)>& fn,
                                         double lo, double hi, double abs_tol,
                                         EndpointSingularity hint, int max_segments) {
    if (!(hi >= lo)) throw NumericsError("integrate_adaptive: hi < lo");
    if (hi == lo) return {0.0, 0.0, 0};
    switch (hint) {
        case EndpointSingularity::none:
            return adapt(fn, lo, hi, abs_tol, max_segments);
        case EndpointSingularity::sqrt_lower: {
            // u = lo + w^2 flattens an inverse-square-root blowup at lo
            auto g = [&fn, lo](double w) { return 2.0 * w * fn(lo + w * w); };
            return adapt(g, 0.0, std::sqrt(hi - lo), abs_tol, max_segments);
        }
        case EndpointSingularity::sqrt_upper: {
            auto g = [&fn, hi](double w) { return 2.0 * w * fn(hi - w * w); };
            return adapt(g, 0.0, std::sqrt(hi - lo), abs_tol, max_segments);
        }
    }
    throw NumericsError("integrate_adaptive: bad hint");
}

double integrate_adaptive(const std::function<double(double)>& fn, double lo, double hi,
                          double abs_tol, EndpointSingularity hint, int max_segments) {
    return integrate_adaptive_full(fn, lo, hi, abs_tol, hint, max_segments).value;
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw NumericsError("gauss_legendre: n < 1");

    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton from the Chebyshev-like initial guess
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

// ---------------------------------------------------------------------------
// finite-difference residuals
// ---------------------------------------------------------------------------

namespace {

struct Stencil {
    double K, Kt, Kx, Kxx;
};

Stencil sample(const std::function<double(double, double)>& kernel, double t, double x,
               double dt, double dx) {
    Stencil st;
    st.K = kernel(t, x);
    st.Kt = (kernel(t + dt, x) - kernel(t - dt, x)) / (2.0 * dt);
    const double km2 = kernel(t, x - 2.0 * dx), km1 = kernel(t, x - dx);
    const double kp1 = kernel(t, x + dx), kp2 = kernel(t, x + 2.0 * dx);
    st.Kx = (km2 - 8.0 * km1 + 8.0 * kp1 - kp2) / (12.0 * dx);
    st.Kxx = (-km2 + 16.0 * km1 - 30.0 * st.K + 16.0 * kp1 - kp2) / (12.0 * dx * dx);
    return st;
}

ResidualReport residual_scan(const std::function<double(double, double)>& kernel,
                             const VolatilityClock& clock,
                             const std::function<double(double)>& beta_prime,
                             double s, const ResidualGrid& grid, PdeForm form, bool forward) {
    ResidualReport rep;
    rep.form = form;
    rep.forward = forward;
    rep.nt = grid.nt;
    rep.nx = grid.nx;
    rep.dt = grid.dt;
    rep.dx = grid.dx;

    const bool has_drift = (form == PdeForm::bridge || form == PdeForm::bridge_potential);
    const bool has_potential = (form == PdeForm::schrodinger || form == PdeForm::bridge_potential);

    for (int i = 0; i < grid.nt; ++i) {
        const double t = grid.nt == 1 ? grid.t_lo
                                      : grid.t_lo + (grid.t_hi - grid.t_lo) * i / (grid.nt - 1.0);
        const double h2 = clock.h2(t);
        const double I = has_drift ? clock.variance_between(t, s) : 1.0;
        const double bp = has_potential ? beta_prime(t) : 0.0;
        for (int j = 0; j < grid.nx; ++j) {
            const double x = grid.nx == 1
                                 ? grid.x_lo
                                 : grid.x_lo + (grid.x_hi - grid.x_lo) * j / (grid.nx - 1.0);
            const Stencil st = sample(kernel, t, x, grid.dt, grid.dx);

            double diffusion = 0.5 * h2 * st.Kxx;
            double drift_term = 0.0, potential_term = 0.0, residual;
            if (!forward) {
                if (has_drift) drift_term = h2 * (1.0 / x - x / I) * st.Kx;
                if (has_potential) potential_term = -bp * x * st.K;
                residual = st.Kt + diffusion + drift_term + potential_term;
            } else {
                // Fokker-Planck: K_tau = 1/2 h^2 K_yy - d/dy[mu K] (- bp y K)
                if (has_drift)
                    drift_term = h2 * (1.0 / x - x / I) * st.Kx + h2 * (-1.0 / (x * x) - 1.0 / I) * st.K;
                if (has_potential) potential_term = bp * x * st.K;
                residual = st.Kt - diffusion + drift_term + potential_term;
            }
            const double scale = std::abs(st.Kt) + std::abs(diffusion) + std::abs(drift_term) +
                                 std::abs(potential_term) + 1e-300;
            const double rel = std::abs(residual) / scale;
            if (rel > rep.max_rel_residual) {
                rep.max_rel_residual = rel;
                rep.argmax_t = t;
                rep.argmax_x = x;
            }
        }
    }
    return rep;
}

}  // namespace

ResidualReport check_backward_residual(const std::function<double(double, double)>& kernel,
                                       const VolatilityClock& clock,
                                       const std::function<double(double)>& beta_prime,
                                       double s, const ResidualGrid& grid, PdeForm form) {
    return residual_scan(kernel, clock, beta_prime, s, grid, form, false);
}

ResidualReport check_forward_residual(const std::function<double(double, double)>& kernel,
                                      const VolatilityClock& clock,
                                      const std::function<double(double)>& beta_prime,
                                      double s, const ResidualGrid& grid, PdeForm form) {
    return residual_scan(kernel, clock, beta_prime, s, grid, form, true);
}

// ---------------------------------------------------------------------------
// Crank-Nicolson
// ---------------------------------------------------------------------------

namespace {

// tridiagonal solve, in place on rhs; sub/diag/super of length n
void thomas(std::vector<double>& sub, std::vector<double>& diag, std::vector<double>& super,
            std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * super[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

std::vector<double> evolve_reference_pde(const VolatilityClock& clock,
                                         const std::function<double(double)>& potential_slope,
                                         double t_from, double t_to, std::vector<double> profile,
                                         double x_max, int nt) {
    const std::size_t nx = profile.size();
    if (nx == 0 || nt < 1) throw NumericsError("evolve_reference_pde: empty grid");
    if (!(t_to > t_from)) throw NumericsError("evolve_reference_pde: needs t_to > t_from");
    const double dx = x_max / (static_cast<double>(nx) + 1.0);
    const double dt = (t_to - t_from) / nt;

    // u_t = L u,  L u = 1/2 h^2(t) u_xx - c(t) x u, Dirichlet zero at 0 and
    // x_max; CN averages L at both time levels.
    auto apply_L = [&](double t, const std::vector<double>& u, std::vector<double>& out) {
        const double r = 0.5 * clock.h2(t) / (dx * dx);
        for (std::size_t j = 0; j < nx; ++j) {
            const double x = dx * (static_cast<double>(j) + 1.0);
            const double um = j > 0 ? u[j - 1] : 0.0;
            const double up = j + 1 < nx ? u[j + 1] : 0.0;
            double val = r * (um - 2.0 * u[j] + up);
            if (potential_slope) val -= potential_slope(t) * x * u[j];
            out[j] = val;
        }
    };

    std::vector<double> rhs(nx), sub(nx), diag(nx), super(nx), Lu(nx);
    for (int n = 0; n < nt; ++n) {
        const double t0 = t_from + dt * n;
        const double t1 = t_from + dt * (n + 1);
        apply_L(t0, profile, Lu);
        for (std::size_t j = 0; j < nx; ++j) rhs[j] = profile[j] + 0.5 * dt * Lu[j];

        const double r = 0.5 * clock.h2(t1) / (dx * dx);
        for (std::size_t j = 0; j < nx; ++j) {
            const double x = dx * (static_cast<double>(j) + 1.0);
            const double c = potential_slope ? potential_slope(t1) * x : 0.0;
            sub[j] = -0.5 * dt * r;
            super[j] = -0.5 * dt * r;
            diag[j] = 1.0 - 0.5 * dt * (-2.0 * r - c);
        }
        thomas(sub, diag, super, rhs);
        profile.swap(rhs);
    }
    return profile;
}

}  // namespace fpt
