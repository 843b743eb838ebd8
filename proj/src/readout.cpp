#include "npuf/readout.hpp"

#include <cmath>
#include <limits>

#include "npuf/errors.hpp"

namespace npuf {

void RidgeConfig::validate() const {
    if (!(lambda >= 0)) throw ConfigError("lambda must be non-negative");
    if (taps < 1) throw ConfigError("taps must be at least 1");
    if (washout < taps - 1) throw ConfigError("washout must cover the tap history");
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& f) {
    Standardizer s;
    s.mean = f.colwise().mean().transpose();
    s.scale.resize(f.cols());
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        const double sd = std::sqrt((f.col(c).array() - s.mean[c]).square().mean());
        s.scale[c] = sd > 0 ? sd : 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& f) const {
    return (f.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

FeatureMatrix build_features(const Eigen::MatrixXd& states, const std::vector<double>& x_in, const RidgeConfig& cfg) {
    cfg.validate();
    const Eigen::Index T = states.rows(), C = states.cols();
    if (static_cast<std::size_t>(T) != x_in.size()) throw InputError("state and input lengths differ");
    if (T <= cfg.washout) throw InputError("series shorter than washout");
    FeatureMatrix fm;
    fm.taps = cfg.taps;
    fm.channels = static_cast<int>(C);
    fm.first_symbol = cfg.washout;
    const Eigen::Index rows = T - cfg.washout;
    fm.values.resize(rows, C * cfg.taps + 1);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + cfg.washout;
        for (int k = 0; k < cfg.taps; ++k) fm.values.row(r).segment(k * C, C) = states.row(t - k);
        fm.values(r, C * cfg.taps) = x_in[static_cast<std::size_t>(t)];
    }
    return fm;
}

Eigen::VectorXd ridge_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, double lambda) {
    if (features.rows() != targets.size()) throw InputError("feature rows and targets differ in length");
    if (!(lambda >= 0)) throw ConfigError("lambda must be non-negative");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(features.cols(), features.cols());
    a.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
    a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
    a.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        // LLT can succeed on a numerically singular matrix; reject tiny pivots relative to the largest.
        const Eigen::VectorXd d = Eigen::MatrixXd(llt.matrixL()).diagonal();
        const double eps = std::numeric_limits<double>::epsilon();
        ok = d.minCoeff() > std::sqrt(eps * static_cast<double>(a.rows())) * d.maxCoeff();
    }
    if (!ok) throw NumericalError("normal equations are singular; use lambda > 0");
    return llt.solve(features.transpose() * targets);
}

double nmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() != target.size() || pred.size() == 0) throw InputError("nmse needs equal, non-empty lengths");
    const double var = (target.array() - target.mean()).square().mean();
    if (!(var > 0)) throw NumericalError("nmse undefined for a zero-variance target");
    return (pred - target).squaredNorm() / static_cast<double>(pred.size()) / var;
}

Response train_readout(const FeatureMatrix& features, const std::vector<double>& y_out, double lambda) {
    const Eigen::Index rows = features.values.rows();
    if (static_cast<std::size_t>(features.first_symbol + rows) != y_out.size())
        throw InputError("targets do not align with feature rows");
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_out.data() + features.first_symbol, rows);
    Response r;
    r.transform = Standardizer::fit(features.values);
    const Eigen::MatrixXd z = r.transform.apply(features.values);
    r.intercept = y.mean();
    r.weights = ridge_fit(z, y.array() - r.intercept, lambda);
    r.nmse = nmse((z * r.weights).array() + r.intercept, y);
    return r;
}

}  // namespace npuf
