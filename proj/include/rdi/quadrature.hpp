#pragma once

#include <functional>
#include <vector>

namespace rdi {

// One quadrature axis: either Gauss-Legendre on [a, b] or the periodic
// trapezoid rule on [0, 2*pi).
struct QuadratureAxis {
    enum class Kind { GaussLegendre, TrapezoidPeriodic };
    Kind kind = Kind::GaussLegendre;
    int order = 16;
    double a = -1.0;
    double b = 1.0;

    static QuadratureAxis gauss(double a, double b, int order) {
        return {Kind::GaussLegendre, order, a, b};
    }
    static QuadratureAxis periodic(int points) {
        return {Kind::TrapezoidPeriodic, points, 0.0, 0.0};
    }
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor-product rule over a box; nodes and weights are precomputed eagerly
// (dimensions here are at most 3).
class QuadratureRule {
public:
    explicit QuadratureRule(std::vector<QuadratureAxis> axes);

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t node_count() const { return weights_.size(); }
    const std::vector<double>& node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    double integrate(const std::function<double(const std::vector<double>&)>& f) const;

private:
    std::vector<QuadratureAxis> axes_;
    std::vector<std::vector<double>> nodes_;
    std::vector<double> weights_;
};

} // namespace rdi
