// least_squares.cpp — Eigen LM functor wrapper

#include "least_squares.hpp"

#include <unsupported/Eigen/LevenbergMarquardt>

namespace rabiqpt::detail {

namespace {

struct Functor : Eigen::DenseFunctor<double> {
    const LsqProblem* problem;

    Functor(const LsqProblem& p, int inputs) : Eigen::DenseFunctor<double>(inputs, p.residuals), problem(&p) {}

    int operator()(const InputType& x, ValueType& fvec) const {
        problem->residual(x, fvec);
        return 0;
    }
    int df(const InputType& x, JacobianType& fjac) const {
        problem->jacobian(x, fjac);
        return 0;
    }
};

}  // namespace

LsqResult levenberg_marquardt(const LsqProblem& problem, const Eigen::VectorXd& x0, int max_evaluations,
                              double tolerance) {
    Functor functor(problem, static_cast<int>(x0.size()));
    Eigen::LevenbergMarquardt<Functor> lm(functor);
    lm.setMaxfev(max_evaluations);
    lm.setFtol(tolerance);
    lm.setXtol(tolerance);
    lm.setGtol(0.0);

    LsqResult out;
    out.x = x0;
    const auto status = lm.minimize(out.x);
    Eigen::VectorXd r(problem.residuals);
    problem.residual(out.x, r);
    out.cost = 0.5 * r.squaredNorm();
    out.iterations = static_cast<int>(lm.iterations());
    out.converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                    status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;
    return out;
}

}  // namespace rabiqpt::detail
