#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "floqhhg/amplitudes.hpp"
#include "floqhhg/errors.hpp"

namespace floqhhg {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

// One vertical cut of the continued self-energy, hanging below a branch
// point b of the sigma term with Floquet index l.
struct CutEdge {
    int l;
    double sign; // sigma_left - sigma_right = sign * 2 pi i (eps + l w)
};

struct Terms {
    std::vector<int> l;
    std::vector<double> weight; // J_l^2
};

Terms contributing(const BesselRow& row)
{
    Terms t;
    for (int l = row.min_order(); l <= row.max_order(); ++l) {
        const double w = row(l) * row(l);
        if (w < kNegligibleWeight)
            continue;
        t.l.push_back(l);
        t.weight.push_back(w);
    }
    return t;
}

// Sheet of each sigma_l just left (side = -1) or right (side = +1) of b.
std::vector<char> side_configuration(double b, int side, const Terms& terms, double w, double L)
{
    const double tol = 1e-9 * std::max(1.0, L);
    std::vector<char> second(terms.l.size());
    for (std::size_t i = 0; i < terms.l.size(); ++i) {
        double x = b + terms.l[i] * w;
        if (std::abs(x) < tol)
            x = 0.0;
        else if (std::abs(x - L) < tol)
            x = L;
        second[i] = side < 0 ? (x > 0.0 && x <= L) : (x >= 0.0 && x < L);
    }
    return second;
}

cplx self_energy(cplx eps, const std::vector<char>& second, const Terms& terms, const SpectralSetup& s)
{
    cplx sum = 0.0;
    for (std::size_t i = 0; i < terms.l.size(); ++i) {
        const cplx x = eps + static_cast<double>(terms.l[i]) * s.params.omega;
        sum += terms.weight[i] * sigma_plus(x, s.continuum, second[i] ? Sheet::second : Sheet::first);
    }
    return s.params.delta0 + s.params.lambda * s.params.lambda * sum;
}

} // namespace

BranchEvaluator::BranchEvaluator(const SpectralSetup& setup, const BranchQuadSpec& quad)
    : setup_(setup), quad_(quad)
{
    if (setup.continuum.lamb_shift == LambShift::imaginary_only)
        throw DomainError("s_branch: the branch term requires lamb_shift = full");

    const SpectralSetup& s = setup_;
    const double w = s.params.omega;
    const double L = s.continuum.cutoff;
    const double lam2 = s.params.lambda * s.params.lambda;
    const Terms terms = contributing(s.row);

    std::map<double, std::vector<CutEdge>> edges;
    for (std::size_t i = 0; i < terms.l.size(); ++i) {
        const int l = terms.l[i];
        edges[-l * w].push_back({l, +1.0});
        edges[L - l * w].push_back({l, -1.0});
    }

    for (const auto& [b, es] : edges) {
        const auto left = side_configuration(b, -1, terms, w, L);
        const bool log_edge = std::any_of(es.begin(), es.end(), [](const CutEdge& e) { return e.sign < 0.0; });
        // dA / ((eps - A_L)(eps - A_R)) dy/du at eps = b - i y(u)
        auto kernel = [=, this, &s](double u) -> Node {
            const double v = 1.0 - u;
            double y = 0.0;
            double jac = 0.0;
            if (!log_edge) {
                y = quad_.scale * u / v;
                jac = quad_.scale / (v * v);
            } else if (u > 0.0) {
                // at the upper band edge sigma diverges like log y; y = s e^{1 - 1/u} / (1 - u)
                // turns the 1 / log^2 y decay of the integrand into a smooth u^2
                y = quad_.scale * std::exp(1.0 - 1.0 / u) / v;
                jac = y * (1.0 / (u * u) + 1.0 / v);
            }
            const cplx eps(b, -y);
            if (jac == 0.0)
                return {eps, 0.0};
            cplx dA = 0.0;
            for (const auto& e : es) {
                const double Jl = s.row(e.l);
                dA += Jl * Jl * e.sign * 2.0 * pi * I * (eps + static_cast<double>(e.l) * w);
            }
            dA *= lam2;
            const cplx AL = self_energy(eps, left, terms, s);
            const cplx AR = AL - dA;
            return {eps, jac * dA / ((eps - AL) * (eps - AR))};
        };
        points_.push_back({b, std::move(kernel), {}});
    }
}

BranchTerm BranchEvaluator::operator()(double omega_k, double t) const
{
    const SpectralSetup& s = setup_;
    BranchTerm out;
    const double C = std::sqrt(coupling_sq(omega_k, s.continuum));
    if (s.params.lambda == 0.0 || C == 0.0)
        return out;

    const double w = s.params.omega;
    const int M = s.row.half_width;

    // Q(eps) = e^{-i eps t} sum_m J_m e^{-i m theta} e^{-i m w t} / (omega_k - m w - eps)
    std::vector<cplx> qcoef(2 * static_cast<std::size_t>(M) + 1);
    for (int m = -M; m <= M; ++m)
        qcoef[m + M] = s.row(m) * std::polar(1.0, -static_cast<double>(m) * (s.params.theta + w * t));
    auto Q = [&](cplx eps) {
        cplx sum = 0.0;
        for (int m = -M; m <= M; ++m)
            if (qcoef[m + M] != 0.0)
                sum += qcoef[m + M] / (omega_k - m * w - eps);
        return std::exp(-I * eps * t) * sum;
    };

    using boost::math::quadrature::gauss_kronrod;
    // adaptive GK stops subdividing once |K - G| < sqrt(eps) L1
    const double refine_floor = boost::math::tools::root_epsilon<double>();
    double l1_total = 0.0;
    for (auto& pt : points_) {
        auto integrand = [&](double u) -> cplx {
            auto it = pt.cache.find(u);
            if (it == pt.cache.end())
                it = pt.cache.emplace(u, pt.kernel(u)).first;
            const Node& n = it->second;
            return n.value == 0.0 ? cplx(0.0) : Q(n.eps) * n.value;
        };
        double err = 0.0;
        double l1 = 0.0;
        out.value += gauss_kronrod<double, 15>::integrate(integrand, 0.0, 1.0, quad_.max_depth, quad_.tolerance, &err, &l1);
        out.error += err;
        l1_total += l1;
    }
    out.converged = out.error <= std::max(quad_.tolerance, refine_floor) * l1_total || out.error <= 1e-15;

    const double pref = s.params.lambda * C / (2.0 * pi);
    out.value *= pref;
    out.error *= pref;
    return out;
}

BranchTerm s_branch(double omega_k, double t, const SpectralSetup& s, const BranchQuadSpec& quad)
{
    return BranchEvaluator(s, quad)(omega_k, t);
}

} // namespace floqhhg
