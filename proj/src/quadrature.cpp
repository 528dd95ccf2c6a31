#include "rdi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rdi {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
            }
            // p1 = P_n(x), p2 = P_{n-1}(x)
            pp = n * (x * p1 - p2) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

QuadratureRule::QuadratureRule(std::vector<QuadratureAxis> axes)
    : axes_(std::move(axes)) {
    std::vector<std::vector<double>> axis_nodes, axis_weights;
    for (const QuadratureAxis& ax : axes_) {
        std::vector<double> xs, ws;
        if (ax.kind == QuadratureAxis::Kind::GaussLegendre) {
            gauss_legendre(ax.order, xs, ws);
            double mid = 0.5 * (ax.a + ax.b);
            double half = 0.5 * (ax.b - ax.a);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                xs[i] = mid + half * xs[i];
                ws[i] *= half;
            }
        } else {
            const double two_pi = 2.0 * std::numbers::pi;
            double h = two_pi / ax.order;
            for (int i = 0; i < ax.order; ++i) {
                xs.push_back(i * h);
                ws.push_back(h);
            }
        }
        axis_nodes.push_back(std::move(xs));
        axis_weights.push_back(std::move(ws));
    }
    // Tensor product.
    std::size_t total = 1;
    for (const auto& xs : axis_nodes) total *= xs.size();
    nodes_.reserve(total);
    weights_.reserve(total);
    std::vector<std::size_t> idx(axes_.size(), 0);
    for (std::size_t count = 0; count < total; ++count) {
        std::vector<double> pt(axes_.size());
        double w = 1.0;
        for (std::size_t d = 0; d < axes_.size(); ++d) {
            pt[d] = axis_nodes[d][idx[d]];
            w *= axis_weights[d][idx[d]];
        }
        nodes_.push_back(std::move(pt));
        weights_.push_back(w);
        for (std::size_t d = axes_.size(); d-- > 0;) {
            if (++idx[d] < axis_nodes[d].size()) break;
            idx[d] = 0;
        }
    }
}

double QuadratureRule::integrate(
    const std::function<double(const std::vector<double>&)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
    return s;
}

} // namespace rdi
