#include "equiconv/regularity.hpp"

#include <cmath>

#include "equiconv/linalg.hpp"

namespace equiconv::regularity {

cplx unit_root(int n, double t) {
    // Integer multiples of a quarter turn are returned exactly.
    const double turns = t / n - std::floor(t / n);
    if (turns == 0.0) return 1.0;
    if (turns == 0.25) return kI;
    if (turns == 0.5) return -1.0;
    if (turns == 0.75) return -kI;
    return std::polar(1.0, 2.0 * kPi * turns);
}

CVec unit_roots(int n) {
    CVec e(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j)] = unit_root(n, j);
    return e;
}

std::vector<CVec> theta_matrix(const model::NormalizedBoundaryConditions& bc, bool swap) {
    const int n = bc.n();
    const int q = n / 2;
    const CVec eps = unit_roots(n);
    std::vector<CVec> m(static_cast<std::size_t>(n), CVec(static_cast<std::size_t>(n)));
    for (int nu = 0; nu < n; ++nu) {
        const auto& row = bc.rows[static_cast<std::size_t>(nu)];
        const cplx first = swap ? row.b : row.a;
        const cplx second = swap ? row.a : row.b;
        for (int k = 0; k < n; ++k) {
            const cplx e = std::pow(eps[static_cast<std::size_t>(k)], row.sigma);
            m[static_cast<std::size_t>(nu)][static_cast<std::size_t>(k)] = (k < q ? first : second) * e;
        }
    }
    return m;
}

cplx birkhoff_theta(const model::NormalizedBoundaryConditions& bc, bool swap) {
    return linalg::det(theta_matrix(bc, swap));
}

double theta_scale(const model::NormalizedBoundaryConditions& bc, bool swap) {
    double s = 1.0;
    for (const auto& row : theta_matrix(bc, swap)) {
        double r = 0.0;
        for (const auto& c : row) r += std::norm(c);
        s *= std::sqrt(r);
    }
    return s;
}

bool is_nonzero(cplx theta, double scale, double rel_tol) {
    return std::abs(theta) > rel_tol * scale;
}

RegularityReport classify(const model::OperatorSpec& op) {
    RegularityReport rep;
    const auto& bc = op.bc;
    rep.n_even = bc.n() % 2 == 0;
    rep.chi = bc.chi();
    rep.theta_01 = birkhoff_theta(bc, false);
    rep.scale_01 = theta_scale(bc, false);
    bool ok = is_nonzero(rep.theta_01, rep.scale_01);
    if (!rep.n_even) {
        rep.theta_10 = birkhoff_theta(bc, true);
        rep.scale_10 = theta_scale(bc, true);
        ok = ok && is_nonzero(*rep.theta_10, rep.scale_10);
    }
    rep.verdict = ok ? Verdict::Regular : Verdict::Irregular;
    return rep;
}

model::OperatorSpec square_operator(const model::OperatorSpec& op) {
    const int n = op.n();
    const auto N = static_cast<std::size_t>(2 * n);
    std::vector<model::RawForm> forms;
    for (const auto& row : op.bc.rows) {
        for (int shift : {0, n}) {
            model::RawForm f{CVec(N, cplx{0.0}), CVec(N, cplx{0.0})};
            f.at0[static_cast<std::size_t>(row.sigma + shift)] = row.a;
            f.at1[static_cast<std::size_t>(row.sigma + shift)] = row.b;
            for (const auto& t : row.lower) {
                f.at0[static_cast<std::size_t>(t.order + shift)] += t.at0;
                f.at1[static_cast<std::size_t>(t.order + shift)] += t.at1;
            }
            forms.push_back(std::move(f));
        }
    }
    model::OperatorSpec sq;
    sq.expr.n = 2 * n;
    sq.bc = model::normalize_bc(forms);
    sq.label = op.label.empty() ? "square" : op.label + "^2";
    return sq;
}

std::string to_string(Verdict v) { return v == Verdict::Regular ? "Regular" : "Irregular"; }

} // namespace equiconv::regularity
