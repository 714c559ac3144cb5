#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "equiconv/parallel.hpp"
#include "equiconv/types.hpp"

// Second-order spectral functions on the half-line and a finite-difference
// oracle for -y'' + q y with y'(0) = h y(0).
namespace equiconv::singular {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Full-line zero-potential spectral function sin(r(x-s))/(pi(x-s)), r = sqrt(t).
double theta0(double x, double s, double t);

// Half-line, zero potential, y(0) = 0: (2/pi) int_0^r sin(nu x) sin(nu s) dnu.
double theta1_inf(double x, double s, double t);

// Half-line, zero potential, y'(0) = h y(0). h = +-infinity gives theta1_inf.
double theta1_h(double x, double s, double t, double h);

struct Corrections {
    double I1 = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
    double sum() const { return I1 + I2 + I3; }
};

// The printed limit corrections for Theta_1^h - Theta_0.
Corrections corrections(double x, double s, double h);

struct Potential {
    std::string label = "zero";
    std::function<double(double)> q = [](double) { return 0.0; };
    double support_radius = 0.0;

    static Potential zero();
    static Potential box(double height, double radius);
    // height (1 - (x/radius)^2)^2 on [0, radius].
    static Potential bump(double height, double radius);
};

struct OracleOptions {
    double b_max = 40.0;
    int N = 4000;
};

// Finite-difference spectral projector sum_{lambda_j <= t} phi_j(x) phi_j(s).
class SpectralOracle {
public:
    // Eigenpairs with lambda <= t_max. Raises ResolutionTooCoarse when
    // N < 20 sqrt(max(t_max,1)) b_max/pi, InvalidInput on bad geometry.
    SpectralOracle(const Potential& q, double h, double t_max, const OracleOptions& opt = {});

    double theta(double x, double s, double t) const;
    const RVec& eigenvalues() const { return lambda_; }

private:
    double phi(std::size_t j, double x) const;

    double h_;
    double dx_;
    double t_max_;
    std::size_t offset_;  // index of the first grid node carried by the vectors
    RVec lambda_;
    std::vector<RVec> vectors_;  // grid values of L^2-normalized eigenfunctions
};

double oracle_spectral_function(const Potential& q, double h, double x, double s, double t,
                                const OracleOptions& opt = {});

// Raises OracleMismatch if the bound state 2|h| e^{h(x+s)} (h < 0) disagrees
// with the oracle by more than 5% on [0, b]^2. Returns the relative discrepancy.
double validate_bound_state(double h, double b = 1.0, const OracleOptions& opt = {});

struct ResidualCurves {
    double h = 0.0;
    RVec t;
    RVec oracle_gap;            // sup |Theta^h - Theta_1^h| (oracle plays Theta^h)
    RVec correction_residual;   // sup |Theta_1^h - Theta_0 - (I1 + I2 + I3)|, NaN for h = infinity
    RVec oscillation_residual;  // sup |Theta_1^h - Theta_0 - sin(r(x+s))/(pi(x+s))|, informational
};

struct ResidualOptions {
    OracleOptions oracle;
    int grid = 20;  // (grid+1)^2 points on [0, b]^2
    Exec exec = Exec::Parallel;
};

ResidualCurves levitan_marchenko_residuals(const Potential& q, double h, const RVec& t_list, double b = 1.0,
                                           const ResidualOptions& opt = {});

// sup over [0,b]^2 of |oracle - closed form| divided by sup |closed form|, q = 0.
double oracle_agreement(double h, double t, double b = 1.0, const OracleOptions& opt = {}, int grid = 20);

} // namespace equiconv::singular
