#include "rdi/report.hpp"

#include <cmath>

namespace rdi {

CheckReport CheckReport::make(std::string name, std::string ref, double value,
                              double oracle, double tol) {
    CheckReport r;
    r.name = std::move(name);
    r.paper_ref = std::move(ref);
    r.value = {value};
    r.oracle = {oracle};
    r.abs_err = std::abs(value - oracle);
    r.tol = tol;
    r.pass = r.abs_err <= tol;
    return r;
}

CheckReport CheckReport::residual(std::string name, std::string ref,
                                  double abs_err, double tol) {
    CheckReport r;
    r.name = std::move(name);
    r.paper_ref = std::move(ref);
    r.value = {abs_err};
    r.oracle = {0.0};
    r.abs_err = std::abs(abs_err);
    r.tol = tol;
    r.pass = r.abs_err <= tol;
    return r;
}

} // namespace rdi
