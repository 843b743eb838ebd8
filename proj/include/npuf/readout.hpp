#pragma once

#include <vector>

#include <Eigen/Dense>

#include "npuf/photonics.hpp"

namespace npuf {

struct RidgeConfig {
    double lambda = 1e-6;
    int taps = 11;
    int washout = 20;

    void validate() const;
};

struct FeatureMatrix {
    Eigen::MatrixXd values;  // column k*channels + c holds channel c delayed by k; last column is x_in
    int taps = 0;
    int channels = 0;
    int first_symbol = 0;    // symbol index of row 0
};

struct Standardizer {
    Eigen::VectorXd mean, scale;

    static Standardizer fit(const Eigen::MatrixXd& f);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& f) const;
};

struct Response {
    Eigen::VectorXd weights;  // one per feature column
    double intercept = 0.0;
    double nmse = 0.0;
    Standardizer transform;
};

FeatureMatrix build_features(const Eigen::MatrixXd& states, const std::vector<double>& x_in, const RidgeConfig& cfg);
inline FeatureMatrix build_features(const StateMatrix& states, const std::vector<double>& x_in, const RidgeConfig& cfg) {
    return build_features(states.samples, x_in, cfg);
}

// argmin |F w - y|^2 + lambda |w|^2 through Cholesky on the normal equations.
Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double lambda);

double nmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

// Standardize, centre the target, fit; weights exclude the intercept.
Response train_readout(const FeatureMatrix& features, const std::vector<double>& y_out, double lambda);

}  // namespace npuf
