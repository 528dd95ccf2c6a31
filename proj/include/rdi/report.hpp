#pragma once

#include <string>
#include <vector>

namespace rdi {

// Result of one named verification. pass <=> abs_err <= tol.
struct CheckReport {
    std::string name;
    std::string paper_ref;
    std::vector<double> value;
    std::vector<double> oracle;
    double abs_err = 0.0;
    double tol = 0.0;
    bool pass = false;
    double ms = 0.0;

    static CheckReport make(std::string name, std::string ref, double value,
                            double oracle, double tol);
    static CheckReport residual(std::string name, std::string ref,
                                double abs_err, double tol);
};

} // namespace rdi
