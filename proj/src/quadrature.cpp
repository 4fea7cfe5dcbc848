#include "dd/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "dd/error.hpp"

namespace dd {
namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    DD_REQUIRE(n >= 1 && n <= 64, "Gauss order must be in [1, 64]");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

std::vector<CellPoint> cell_rule(int order, int ns) {
    DD_REQUIRE(ns >= 1, "need at least one subcell");
    const GaussRule& g = gauss_legendre(order);
    std::vector<CellPoint> pts;
    pts.reserve(static_cast<std::size_t>(ns * ns) * g.size() * g.size());
    for (int bj = 0; bj < ns; ++bj)
        for (int bi = 0; bi < ns; ++bi)
            for (std::size_t qj = 0; qj < g.size(); ++qj)
                for (std::size_t qi = 0; qi < g.size(); ++qi)
                    pts.push_back({(bi + 0.5 * (1.0 + g.nodes[qi])) / ns, (bj + 0.5 * (1.0 + g.nodes[qj])) / ns,
                                   0.25 * g.weights[qi] * g.weights[qj] / (ns * ns)});
    return pts;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels,
                           int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width;
        double panel = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) panel += rule.weights[q] * f(mid + 0.5 * width * rule.nodes[q]);
        total += 0.5 * width * panel;
    }
    return total;
}

}  // namespace dd
