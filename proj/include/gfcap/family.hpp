#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>

#include "gfcap/errors.hpp"

namespace gfcap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Point layout everywhere: z = (x_1..x_{n-1}, x_n, e_1..e_N), length n + N.
struct GeneratingFamily {
    int base_dim = 2;   // n
    int fiber_dim = 0;  // N
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;  // may be empty
    std::function<Mat(const Vec&)> hess;  // may be empty
    Mat infinity_form;                    // N x N symmetric, F = e^T Q e at infinity
    double support_radius = 1.0;
    // characteristic length used for finite-difference steps and tracing steps
    double scale = 1.0;
    std::string name = "custom";

    int dim() const { return base_dim + fiber_dim; }
    double value(const Vec& z) const { return eval(z); }
    Vec gradient(const Vec& z) const;
    Mat hessian(const Vec& z) const;
    double quadratic_at_infinity(const Vec& z) const;
};

// Central-difference fallbacks, also used by tests as the independent reference.
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& z, double h);
Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& z, double h);

// F_a = F - a x_n
struct ShearedFamily {
    std::shared_ptr<const GeneratingFamily> parent;
    double height = 0.0;

    double eval(const Vec& z) const;
    Vec grad(const Vec& z) const;
    Mat hess(const Vec& z) const;
    int base_dim() const { return parent->base_dim; }
    int fiber_dim() const { return parent->fiber_dim; }
};

// Shape of the cutoff tails outside the inner cube.
enum class Blend { Quintic, Septic };

struct ExampleFamilyParams {
    double K = 5.0;
    double eps = 0.25;
    double beta = 1.0;
    double tau = 4.0;
    int dim = 2;
    Blend blend = Blend::Quintic;

    void validate() const;
};

std::shared_ptr<const GeneratingFamily> build_example_family(const ExampleFamilyParams& p, int sign);

// F + Q(e'); q is k x k symmetric non-degenerate, k = 0 returns the family unchanged.
std::shared_ptr<const GeneratingFamily> stabilize(std::shared_ptr<const GeneratingFamily> f,
                                                  const Mat& q);

// beta^2 F(x/beta, x_n/beta, e)
std::shared_ptr<const GeneratingFamily> dilate(std::shared_ptr<const GeneratingFamily> f,
                                               double beta);

// One-dimensional C2 cutoff used by the example family; exposed for tests.
struct Cutoff1D {
    double v = 0, d1 = 0, d2 = 0;
};

// Profiles of the example family, on one axis.  Each returns value and first two
// derivatives.  `s` is the half-width of the inner cube.
struct ExampleProfiles {
    double K, eps, beta, s, margin;
    double slow_width;  // length of the slow tails of ell, c and d
    Blend blend;

    Cutoff1D ell(double t) const;
    Cutoff1D c(double t) const;
    Cutoff1D q1(double t) const;  // one-dimensional factor of q, see family.cpp
    Cutoff1D d1(double t) const;
    double support() const;
};

ExampleProfiles example_profiles(const ExampleFamilyParams& p);

} // namespace gfcap
