// Test-side reference computations. Nothing here calls into the library's
// numerics: roots, derivatives and matrices are rebuilt from scratch.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Plain bisection on a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    if ((flo > 0) == (f(hi) > 0)) throw std::runtime_error("bisect: no sign change");
    for (int k = 0; k < iters; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// All sign-change roots of f on a fine scan of [a, b], avoiding the given poles.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double a, double b,
                                      const std::vector<double>& poles, int samples = 20000) {
    std::vector<double> roots;
    const double h = (b - a) / samples;
    double x0 = a;
    double f0 = f(x0);
    for (int k = 1; k <= samples; ++k) {
        const double x1 = a + k * h;
        const double f1 = f(x1);
        bool pole = false;
        for (double p : poles) pole = pole || (p >= x0 && p <= x1);
        if (!pole && (f0 > 0) != (f1 > 0)) roots.push_back(bisect(f, x0, x1));
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

// Roots of a x^2 + b x + c with real coefficients, ascending (real case).
inline std::pair<double, double> quadratic_roots(double a, double b, double c) {
    const double disc = b * b - 4 * a * c;
    if (disc < 0) throw std::runtime_error("complex roots");
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    return {r1, r2};
}

// Central finite-difference Jacobian of a holomorphic map (real-direction step).
inline Eigen::MatrixXcd fd_jacobian(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& f,
                                    const Eigen::VectorXcd& x, double h = 1e-6) {
    const Eigen::Index n = x.size();
    const Eigen::VectorXcd f0 = f(x);
    Eigen::MatrixXcd j(f0.size(), n);
    for (Eigen::Index b = 0; b < n; ++b) {
        const double step = h * (1.0 + std::abs(x[b]));
        Eigen::VectorXcd xp = x, xm = x;
        xp[b] += step;
        xm[b] -= step;
        j.col(b) = (f(xp) - f(xm)) / (2 * step);
    }
    return j;
}

inline double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

// Direct Gaudin entries.
inline cplx trig_x(cplx a, cplx b) { return std::sqrt(1.0 + a * a) * std::sqrt(1.0 + b * b) / (a - b); }
inline cplx trig_z(cplx a, cplx b) { return (1.0 + a * b) / (a - b); }
inline cplx rat_xz(cplx a, cplx b) { return 1.0 / (a - b); }

// Dense single-site matrices in the ascending basis |0>, |1>, ...
inline Eigen::MatrixXcd spin_plus(double s) {
    const int d = static_cast<int>(std::lround(2 * s)) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j + 1 < d; ++j) {
        const double mu = -s + j;
        m(j + 1, j) = std::sqrt(s * (s + 1) - mu * (mu + 1));
    }
    return m;
}

inline Eigen::MatrixXcd spin_z(double s) {
    const int d = static_cast<int>(std::lround(2 * s)) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < d; ++j) m(j, j) = -s + j;
    return m;
}

inline Eigen::MatrixXcd boson_create(int cutoff) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    for (int n = 0; n < cutoff; ++n) m(n + 1, n) = std::sqrt(n + 1.0);
    return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

// Operator acting on factor `site` of a tensor product with the given local dims.
inline Eigen::MatrixXcd embed(const Eigen::MatrixXcd& op, int site, const std::vector<int>& dims) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        out = kron(out, k == site ? op : Eigen::MatrixXcd::Identity(dims[k], dims[k]));
    }
    return out;
}

struct DickeDense {
    Eigen::MatrixXcd h;
    Eigen::MatrixXcd excitations;  // b^+ b + sum (S^0 + s)
};

// Full-space Dicke Hamiltonian by Kronecker products, boson first.
inline DickeDense dicke_dense(const std::vector<double>& eps, const std::vector<double>& spins, double G, double hw,
                              int cutoff) {
    std::vector<int> dims{cutoff + 1};
    for (double s : spins) dims.push_back(static_cast<int>(std::lround(2 * s)) + 1);
    const Eigen::MatrixXcd bp = embed(boson_create(cutoff), 0, dims);
    const Eigen::MatrixXcd bm = bp.adjoint();
    DickeDense d;
    d.h = hw * bp * bm;
    d.excitations = bp * bm;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const int site = static_cast<int>(k) + 1;
        const Eigen::MatrixXcd sp = embed(spin_plus(spins[k]), site, dims);
        const Eigen::MatrixXcd sz = embed(spin_z(spins[k]), site, dims);
        d.h += eps[k] * sz + G * (bp * sp.adjoint() + sp * bm);
        d.excitations += sz + spins[k] * Eigen::MatrixXcd::Identity(sz.rows(), sz.cols());
    }
    return d;
}

// Eigenvalues of a Hermitian matrix restricted to the eigenspace of a diagonal
// integer-valued operator with value M.
inline std::vector<double> sector_eigenvalues(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& number, int M) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < number.rows(); ++i) {
        if (std::abs(number(i, i).real() - M) < 1e-9) idx.push_back(i);
    }
    Eigen::MatrixXcd block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = h(idx[a], idx[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
}

// Level coordinates on a jittered grid in [-2, 2]; neighbours stay at least
// 2/m apart so the Gaudin entries remain O(10).
inline std::vector<double> jittered_levels(int m, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out;
    for (int i = 0; i < m; ++i) out.push_back(-2.0 + (4.0 / m) * (i + 0.25 + 0.5 * u(gen)));
    return out;
}

// Complex rapidities with distinct imaginary parts, well away from the real axis.
inline std::vector<cplx> random_rapidities(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> out;
    for (int a = 0; a < n; ++a) {
        const double im = (a % 2 ? -1.0 : 1.0) * (0.3 + 0.25 * a + 0.1 * u(gen));
        out.emplace_back(-2.0 + 4.0 * u(gen), im);
    }
    return out;
}

}  // namespace oracle
