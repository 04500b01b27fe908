// least_squares.hpp — thin adapter over Eigen's Levenberg-Marquardt (MINPACK trust region)

#pragma once

#include <Eigen/Dense>

#include <functional>

namespace rabiqpt::detail {

struct LsqProblem {
    int residuals = 0;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> residual;
    std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)> jacobian;
};

struct LsqResult {
    Eigen::VectorXd x;
    double cost = 0.0;  // ½ |r|²
    int iterations = 0;
    bool converged = false;
};

LsqResult levenberg_marquardt(const LsqProblem& problem, const Eigen::VectorXd& x0, int max_evaluations,
                              double tolerance = 1e-12);

}  // namespace rabiqpt::detail
