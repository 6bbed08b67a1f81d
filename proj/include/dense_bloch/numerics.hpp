#ifndef DENSE_BLOCH_NUMERICS_HPP
#define DENSE_BLOCH_NUMERICS_HPP

#include <functional>
#include <stdexcept>
#include <vector>

// Quadrature, principal-value integrals, special functions, root finding and
// adaptive ODE integration used by the physics modules. All routines are pure
// and reentrant.

namespace dense_bloch {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
    int node_count = 128;
    double absolute_tol = 1e-7;
    double relative_tol = 1e-7;

    void validate() const;
};

struct OdeControl {
    double initial_step = 1e-4;
    double max_step = 1.0;
    double error_tol = 1e-10; // used as absolute and relative scale
    long max_steps = 4000000;

    void validate() const;
};

// Gauss-Hermite nodes and weights for the weight function e^{-y^2}.
class GaussHermite {
  public:
    explicit GaussHermite(int n);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    // sum_i w_i f(x_i) ~ int e^{-y^2} f(y) dy
    double integrate(const std::function<double(double)>& f) const;

  private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

// int_{-inf}^{inf} e^{-y^2} f(y) dy. Evaluates at node_count and twice
// node_count nodes; throws ConvergenceError when doubling moves the result
// beyond the requested tolerances.
double gauss_weighted_integral(const std::function<double(double)>& f,
                               const QuadratureSpec& spec = {});

// Adaptive Simpson integration of a smooth integrand on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 50);

// Cauchy principal value P int_lo^hi f(w') / (pole - w') dw' with lo < pole < hi.
// Uses symmetric pole subtraction plus the analytic log remainder.
double principal_value_integral(const std::function<double(double)>& f, double pole,
                                double lo, double hi, const QuadratureSpec& spec = {});

// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0, 1e-10 relative.
double exponential_integral_e1(double x);

// int_0^u E1(t) dt = 1 - e^{-u} + u E1(u); the cell primitive of E1.
double exponential_integral_e1_primitive(double u);

// All real roots of a3 x^3 + a2 x^2 + a1 x + a0, ascending. Degenerate
// leading coefficients fall back to the quadratic / linear problem.
std::vector<double> solve_cubic_real(double a3, double a2, double a1, double a0);

// Brent root search on a bracketing interval [lo, hi] with f(lo) f(hi) <= 0.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol = 1e-12);

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    long steps_taken = 0;
};

// Embedded Dormand-Prince 5(4) pair with step rejection. Sample times are hit
// exactly by clamping the step, so dense output is deterministic. An optional
// observer runs after every accepted step.
OdeTrajectory integrate_ode(const OdeRhs& rhs, double t0, double t1,
                            const std::vector<double>& y0, const OdeControl& control,
                            const std::vector<double>& sample_times,
                            const std::function<void(double, const std::vector<double>&)>& on_step = {});

} // namespace dense_bloch

#endif
