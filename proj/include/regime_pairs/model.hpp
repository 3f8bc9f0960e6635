#ifndef REGIME_PAIRS_MODEL_HPP
#define REGIME_PAIRS_MODEL_HPP

/**
 * @file model.hpp
 * @brief Parameter sets for the Markov-modulated pairs-trading market.
 *
 * The hidden chain Y lives on {0, ..., K-1} with generator Q. In state i the
 * spread S = log S1 - log S2 mean-reverts towards theta_i and the first stock
 * drifts at mu_i:
 *
 *   dS1/S1 = mu(Y) dt + sigma dW1
 *   dS     = kappa (theta(Y) - S) dt + eta dW,   <W1, W>_t = rho t
 *
 * States are 0-based throughout the library and its file formats.
 */

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpairs {

/// Hidden regime chain: generator, per-state spread means and stock drifts.
class RegimeModel {
public:
    RegimeModel(Eigen::MatrixXd generator, Eigen::VectorXd theta,
                Eigen::VectorXd mu, Eigen::VectorXd initial_dist)
        : q_(std::move(generator)), theta_(std::move(theta)),
          mu_(std::move(mu)), pi0_(std::move(initial_dist)) {
        validate();
    }

    /// Two-state chain with q12 = rate 0->1 and q21 = rate 1->0.
    static RegimeModel two_state(double q12, double q21, double theta1,
                                 double theta2, double mu1, double mu2,
                                 double p0 = -1.0) {
        Eigen::MatrixXd q(2, 2);
        q << -q12, q12, q21, -q21;
        Eigen::VectorXd theta(2), mu(2), pi(2);
        theta << theta1, theta2;
        mu << mu1, mu2;
        if (p0 < 0.0) {
            const double total = q12 + q21;
            p0 = total > 0.0 ? q21 / total : 0.5;
        }
        pi << p0, 1.0 - p0;
        return RegimeModel(q, theta, mu, pi);
    }

    /// Degenerate single-regime model (plain OU spread).
    static RegimeModel single_state(double theta, double mu) {
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(1, 1);
        Eigen::VectorXd t(1), m(1), pi(1);
        t << theta;
        m << mu;
        pi << 1.0;
        return RegimeModel(q, t, m, pi);
    }

    int states() const noexcept { return static_cast<int>(theta_.size()); }
    const Eigen::MatrixXd& generator() const noexcept { return q_; }
    double rate(int i, int j) const { return q_(i, j); }
    const Eigen::VectorXd& theta() const noexcept { return theta_; }
    const Eigen::VectorXd& mu() const noexcept { return mu_; }
    double theta(int i) const { return theta_(i); }
    double mu(int i) const { return mu_(i); }
    const Eigen::VectorXd& initial_dist() const noexcept { return pi0_; }

    /// theta^T p
    double theta_mean(std::span<const double> p) const {
        double acc = 0.0;
        for (int i = 0; i < states(); ++i) acc += theta_(i) * p[i];
        return acc;
    }

    /// mu^T p
    double mu_mean(std::span<const double> p) const {
        double acc = 0.0;
        for (int i = 0; i < states(); ++i) acc += mu_(i) * p[i];
        return acc;
    }

    RegimeModel with_initial_dist(Eigen::VectorXd pi) const {
        return RegimeModel(q_, theta_, mu_, std::move(pi));
    }

private:
    void validate() const {
        std::ostringstream err;
        const auto k = theta_.size();
        if (k < 1) err << "K must be >= 1; ";
        if (q_.rows() != k || q_.cols() != k)
            err << "Q must be " << k << "x" << k << "; ";
        if (mu_.size() != k) err << "mu must have length " << k << "; ";
        if (pi0_.size() != k) err << "initial_dist must have length " << k << "; ";
        if (err.str().empty()) {
            const double scale = 1.0 + q_.cwiseAbs().maxCoeff();
            for (Eigen::Index i = 0; i < k; ++i) {
                double row = 0.0;
                for (Eigen::Index j = 0; j < k; ++j) {
                    const double v = q_(i, j);
                    if (!std::isfinite(v)) err << "Q(" << i << "," << j << ") not finite; ";
                    if (i != j && v < 0.0)
                        err << "Q(" << i << "," << j << ") = " << v << " is negative; ";
                    row += v;
                }
                if (std::abs(row) > 1e-12 * scale)
                    err << "row " << i << " of Q sums to " << row << "; ";
                if (!std::isfinite(theta_(i)) || !std::isfinite(mu_(i)))
                    err << "theta/mu entry " << i << " not finite; ";
            }
            double total = 0.0;
            for (Eigen::Index i = 0; i < k; ++i) {
                if (!(pi0_(i) >= 0.0)) err << "initial_dist(" << i << ") < 0; ";
                total += pi0_(i);
            }
            if (std::abs(total - 1.0) > 1e-12)
                err << "initial_dist sums to " << total << "; ";
        }
        if (!err.str().empty())
            throw std::invalid_argument("invalid RegimeModel: " + err.str());
    }

    Eigen::MatrixXd q_;
    Eigen::VectorXd theta_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd pi0_;
};

struct MarketFields {
    double kappa = 1.0;    ///< mean-reversion speed, 1/year
    double eta = 0.2;      ///< spread volatility
    double sigma = 0.2;    ///< stock-1 volatility
    double rho = 0.0;      ///< corr(W1, W)
    double r = 0.0;        ///< risk-free rate
    double epsilon = 0.0;  ///< risk-penalty weight
};

/// Validated diffusion and market constants.
class MarketParams {
public:
    explicit MarketParams(const MarketFields& f) : f_(f) {
        std::ostringstream err;
        if (!(f.kappa > 0.0) || !std::isfinite(f.kappa)) err << "kappa must be > 0; ";
        if (!(f.eta > 0.0) || !std::isfinite(f.eta)) err << "eta must be > 0; ";
        if (!(f.sigma > 0.0) || !std::isfinite(f.sigma)) err << "sigma must be > 0; ";
        if (!(f.rho > -1.0 && f.rho < 1.0)) err << "rho must lie in (-1, 1); ";
        if (!std::isfinite(f.r)) err << "r must be finite; ";
        if (!(f.epsilon >= 0.0) || !std::isfinite(f.epsilon)) err << "epsilon must be >= 0; ";
        if (!err.str().empty())
            throw std::invalid_argument("invalid MarketParams: " + err.str());
    }

    double kappa() const noexcept { return f_.kappa; }
    double eta() const noexcept { return f_.eta; }
    double sigma() const noexcept { return f_.sigma; }
    double rho() const noexcept { return f_.rho; }
    double r() const noexcept { return f_.r; }
    double epsilon() const noexcept { return f_.epsilon; }
    const MarketFields& fields() const noexcept { return f_; }

    double rho_bar() const { return std::sqrt(1.0 - f_.rho * f_.rho); }

    /// Constant part of the spread-trade excess drift, -eta^2/2 + rho sigma eta.
    double drift_offset() const noexcept {
        return -0.5 * f_.eta * f_.eta + f_.rho * f_.sigma * f_.eta;
    }

    /// eta^2 (1 + epsilon): curvature of the pointwise objective in h.
    double penalized_variance() const noexcept {
        return f_.eta * f_.eta * (1.0 + f_.epsilon);
    }

private:
    MarketFields f_;
};

/// Stationary law of the chain: solves pi Q = 0 with sum(pi) = 1.
inline Eigen::VectorXd stationary_distribution(const RegimeModel& model) {
    const int k = model.states();
    if (k == 1) return Eigen::VectorXd::Ones(1);
    if (k == 2) {
        const double q12 = model.rate(0, 1), q21 = model.rate(1, 0);
        Eigen::VectorXd pi(2);
        if (q12 + q21 <= 0.0)
            throw std::domain_error("stationary distribution not unique (Q = 0)");
        pi << q21 / (q12 + q21), q12 / (q12 + q21);
        return pi;
    }
    Eigen::MatrixXd a(k + 1, k);
    a.topRows(k) = model.generator().transpose();
    a.row(k).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
    b(k) = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < k)
        throw std::domain_error("stationary distribution not unique (reducible chain)");
    return qr.solve(b);
}

}  // namespace rpairs

#endif  // REGIME_PAIRS_MODEL_HPP
