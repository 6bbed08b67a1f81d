#include "dense_bloch/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace dense_bloch {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;
} // namespace

void QuadratureSpec::validate() const {
    if (node_count < 8)
        throw std::invalid_argument("QuadratureSpec: node_count must be >= 8");
    if (!(absolute_tol > 0.0) || !(relative_tol > 0.0))
        throw std::invalid_argument("QuadratureSpec: tolerances must be > 0");
}

void OdeControl::validate() const {
    if (!(initial_step > 0.0) || !(max_step > 0.0) || !(error_tol > 0.0) || max_steps <= 0)
        throw std::invalid_argument("OdeControl: all fields must be positive");
}

GaussHermite::GaussHermite(int n) {
    if (n < 1)
        throw std::invalid_argument("GaussHermite: need at least one node");

    // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
    // Hermite recurrence (zero diagonal, off-diagonal sqrt(k/2)); weights are
    // sqrt(pi) times the squared first eigenvector components. Implicit-shift
    // QL on the tridiagonal matrix, tracking only the first eigenvector row.
    std::vector<double> d(n, 0.0);
    std::vector<double> e(n, 0.0);
    std::vector<double> z(n, 0.0);
    for (int k = 1; k < n; ++k)
        e[k - 1] = std::sqrt(0.5 * k);
    z[0] = 1.0;

    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        for (;;) {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd)
                    break;
            }
            if (m == l)
                break;
            if (iter++ == 100)
                throw ConvergenceError("GaussHermite: QL iteration failed");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (r == 0.0 && i >= l)
                continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    std::vector<std::pair<double, double>> nw(n);
    const double sqrt_pi = 1.7724538509055160273;
    for (int i = 0; i < n; ++i)
        nw[i] = {d[i], sqrt_pi * z[i] * z[i]};
    std::sort(nw.begin(), nw.end());
    nodes_.resize(n);
    weights_.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes_[i] = nw[i].first;
        weights_[i] = nw[i].second;
    }
}

double GaussHermite::integrate(const std::function<double(double)>& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        sum += weights_[i] * f(nodes_[i]);
    return sum;
}

namespace {

// Node sets are immutable once built; cache them across calls.
const GaussHermite& cached_hermite(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussHermite>> cache;
    const std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<GaussHermite>(n);
    return *slot;
}

} // namespace

double gauss_weighted_integral(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    spec.validate();
    const GaussHermite& coarse = cached_hermite(spec.node_count);
    const GaussHermite& fine = cached_hermite(2 * spec.node_count);
    const double i1 = coarse.integrate(f);
    const double i2 = fine.integrate(f);
    const double err = std::abs(i2 - i1);
    if (err > std::max(spec.absolute_tol, spec.relative_tol * std::abs(i2)))
        throw ConvergenceError("gauss_weighted_integral: node doubling changed result by " +
                               std::to_string(err));
    return i2;
}

namespace {

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw ConvergenceError("adaptive_simpson: max depth reached");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_depth) {
    if (a == b)
        return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double principal_value_integral(const std::function<double(double)>& f, double pole, double lo,
                                double hi, const QuadratureSpec& spec) {
    spec.validate();
    if (!(lo < pole && pole < hi))
        throw std::invalid_argument("principal_value_integral: pole must lie inside (lo, hi)");
    const double fp = f(pole);
    const double scale = hi - lo;
    // Taylor patch across the removable singularity; matched to O(delta^4)
    // so the integrand stays smooth for the adaptive rule.
    const double delta = 1e-5 * scale;
    const double d1 = (f(pole + delta) - f(pole - delta)) / (2.0 * delta);
    const double d2 = (f(pole + delta) - 2.0 * fp + f(pole - delta)) / (delta * delta);
    const auto regular = [&](double w) {
        const double s = w - pole;
        if (std::abs(s) < delta)
            return -(d1 + 0.5 * s * d2);
        return (f(w) - fp) / (pole - w);
    };
    // Split at the pole so the subtracted integrand is smooth on each panel.
    const double left = adaptive_simpson(regular, lo, pole, spec.absolute_tol, spec.relative_tol);
    const double right = adaptive_simpson(regular, pole, hi, spec.absolute_tol, spec.relative_tol);
    const double remainder = fp * std::log((pole - lo) / (hi - pole));
    return left + right + remainder;
}

double exponential_integral_e1(double x) {
    if (!(x > 0.0))
        throw std::domain_error("exponential_integral_e1: requires x > 0");
    if (x <= 1.0) {
        // Ascending series.
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 80; ++k) {
            term *= -x / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::max(1.0, std::abs(sum)))
                break;
        }
        return sum - kEulerGamma - std::log(x);
    }
    // Modified Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            return h * std::exp(-x);
    }
    throw ConvergenceError("exponential_integral_e1: continued fraction failed");
}

double exponential_integral_e1_primitive(double u) {
    if (u < 0.0)
        throw std::domain_error("exponential_integral_e1_primitive: requires u >= 0");
    if (u == 0.0)
        return 0.0;
    if (u > 700.0)
        return 1.0; // both e^{-u} and u E1(u) are below double underflow
    return -std::expm1(-u) + u * exponential_integral_e1(u);
}

namespace {

void polish_root(double a3, double a2, double a1, double a0, double& x) {
    for (int it = 0; it < 3; ++it) {
        const double p = ((a3 * x + a2) * x + a1) * x + a0;
        const double dp = (3.0 * a3 * x + 2.0 * a2) * x + a1;
        if (dp == 0.0)
            return;
        const double step = p / dp;
        if (!std::isfinite(step))
            return;
        x -= step;
    }
}

} // namespace

std::vector<double> solve_cubic_real(double a3, double a2, double a1, double a0) {
    const double scale = std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
    if (scale == 0.0)
        throw std::invalid_argument("solve_cubic_real: zero polynomial");
    std::vector<double> roots;
    if (std::abs(a3) < 1e-14 * scale) {
        if (std::abs(a2) < 1e-14 * scale) {
            if (std::abs(a1) < 1e-14 * scale)
                return roots; // constant, no roots
            roots.push_back(-a0 / a1);
            return roots;
        }
        const double disc = a1 * a1 - 4.0 * a2 * a0;
        if (disc < 0.0)
            return roots;
        const double s = std::sqrt(disc);
        const double q = -0.5 * (a1 + std::copysign(s, a1));
        roots.push_back(q / a2);
        if (q != 0.0)
            roots.push_back(a0 / q);
        else
            roots.push_back(0.0);
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    const double b = a2 / a3;
    const double c = a1 / a3;
    const double d = a0 / a3;
    // Depressed cubic t^3 + p t + q, x = t - b/3.
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double shift = -b / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    if (disc > 1e-14 * std::max(1.0, q * q)) {
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + s);
        const double v = std::cbrt(-q / 2.0 - s);
        roots.push_back(u + v + shift);
    } else if (disc < -1e-14 * std::max(1.0, q * q)) {
        const double rho = std::sqrt(-p * p * p / 27.0);
        const double theta = std::acos(std::clamp(-q / (2.0 * rho), -1.0, 1.0));
        const double mag = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k)
            roots.push_back(mag * std::cos((theta + 2.0 * kPi * k) / 3.0) + shift);
    } else {
        // Borderline: treat as a double root plus a simple one.
        if (std::abs(q) < 1e-300) {
            roots.push_back(shift);
            if (p < 0.0) {
                roots.push_back(shift + std::sqrt(-p));
                roots.push_back(shift - std::sqrt(-p));
            }
        } else {
            const double u = std::cbrt(-q / 2.0);
            roots.push_back(2.0 * u + shift);
            roots.push_back(-u + shift);
            roots.push_back(-u + shift);
        }
    }
    for (double& x : roots)
        polish_root(a3, a2, a1, a0, x);
    std::sort(roots.begin(), roots.end());
    return roots;
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if (fa * fb > 0.0)
        throw std::invalid_argument("find_root_bracketed: no sign change on [lo, hi]");

    // Brent's method.
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0)
            return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, pq, qq;
            if (a == c) {
                pq = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                const double q = fa / fc;
                const double r = fb / fc;
                pq = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                qq = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (pq > 0.0)
                qq = -qq;
            pq = std::abs(pq);
            if (2.0 * pq < std::min(3.0 * xm * qq - std::abs(tol1 * qq), std::abs(e * qq))) {
                e = d;
                d = pq / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::abs(d) > tol1)
            b += d;
        else
            b += std::copysign(tol1, xm);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    throw ConvergenceError("find_root_bracketed: Brent iteration failed");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

} // namespace

OdeTrajectory integrate_ode(const OdeRhs& rhs, double t0, double t1, const std::vector<double>& y0,
                            const OdeControl& control, const std::vector<double>& sample_times,
                            const std::function<void(double, const std::vector<double>&)>& on_step) {
    control.validate();
    if (t1 < t0)
        throw std::invalid_argument("integrate_ode: requires t1 >= t0");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (sample_times[i] <= sample_times[i - 1])
            throw std::invalid_argument("integrate_ode: sample times must be strictly increasing");

    const std::size_t n = y0.size();
    std::vector<double> y = y0;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    OdeTrajectory out;
    double t = t0;
    std::size_t next_sample = 0;
    const auto record_if_sample = [&](double tc, const std::vector<double>& yc) {
        while (next_sample < sample_times.size() &&
               std::abs(sample_times[next_sample] - tc) <= 1e-12 * std::max(1.0, std::abs(tc))) {
            out.times.push_back(sample_times[next_sample]);
            out.states.push_back(yc);
            ++next_sample;
        }
    };
    while (next_sample < sample_times.size() && sample_times[next_sample] < t0)
        ++next_sample;
    record_if_sample(t0, y);

    rhs(t, y, k1); // FSAL seed
    double h = std::min(control.initial_step, control.max_step);

    while (t < t1) {
        if (out.steps_taken++ > control.max_steps)
            throw ConvergenceError("integrate_ode: max_steps exceeded");
        double target = t1;
        if (next_sample < sample_times.size())
            target = std::min(target, sample_times[next_sample]);
        h = std::min({h, control.max_step, target - t});
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            // At the target within roundoff; emit and move on.
            record_if_sample(target, y);
            t = target;
            if (t >= t1)
                break;
            h = std::min(control.initial_step, control.max_step);
            continue;
        }

        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                   e7 * k7[i]);
            const double scale =
                control.error_tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err = std::max(err, std::abs(ei) / scale);
        }

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            if (on_step)
                on_step(t, y);
            record_if_sample(t, y);
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-15 * std::max(1.0, std::abs(t)))
                throw ConvergenceError("integrate_ode: step size underflow");
        }
    }
    record_if_sample(t1, y);
    return out;
}

} // namespace dense_bloch
