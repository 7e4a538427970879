#include "rydrelay/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rydrelay/io.hpp"

namespace rydrelay {

namespace {

constexpr double kConditionLimit = 1e9;

struct Elimination {
    Eigen::MatrixXd couplings_v; // N_R × N, column i = V_i
    Eigen::MatrixXcd bilinear;   // Q_ij = V_jᵀ M⁻¹ V_i
};

// Solves M X = V column by column (one linear solve per main atom) and forms
// the bilinear matrix Q = Vᵀ X. Guards against near-singular M.
Elimination eliminate(const AtomArray& array, const PhysicalParams& params, Regime regime) {
    const int n = array.num_main();
    const int n_relay = array.num_relay();

    Elimination result;
    result.couplings_v.resize(n_relay, n);
    if (n_relay == 0) {
        result.bilinear = Eigen::MatrixXcd::Zero(n, n);
        return result;
    }
    for (int i = 0; i < n; ++i)
        result.couplings_v.col(i) = coupling_vector(array, params, i);

    const Eigen::MatrixXcd m = relay_matrix(array, params, regime);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double sv_max = svd.singularValues()(0);
    const double sv_min = svd.singularValues()(n_relay - 1);
    if (!(sv_min > 1e-9 * sv_max)) {
        const double cond = sv_min > 0.0 ? sv_max / sv_min
                                         : std::numeric_limits<double>::infinity();
        std::ostringstream ss;
        ss << "relay matrix is numerically singular (condition number " << cond
           << " exceeds " << kConditionLimit << ")";
        throw EliminationError(ss.str(), cond);
    }

    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const Eigen::MatrixXcd x = lu.solve(result.couplings_v.cast<std::complex<double>>());
    result.bilinear = result.couplings_v.transpose().cast<std::complex<double>>() * x;
    return result;
}

Eigen::MatrixXd couplings_from_bilinear(const Eigen::MatrixXcd& q) {
    const int n = static_cast<int>(q.rows());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            // M is complex symmetric, so Q is symmetric up to roundoff;
            // averaging makes J exactly symmetric.
            const double value = -0.5 * (q(a, b).real() + q(b, a).real());
            j(a, b) = value;
            j(b, a) = value;
        }
    }
    return j;
}

} // namespace

Eigen::MatrixXd effective_couplings(const AtomArray& array, const PhysicalParams& params,
                                    Regime regime) {
    return couplings_from_bilinear(eliminate(array, params, regime).bilinear);
}

Eigen::MatrixXd effective_couplings_diagonal_relay(const AtomArray& array,
                                                   const PhysicalParams& params) {
    const double delta = forster_detuning(params);
    if (delta == 0.0)
        throw Error("diagonal-relay couplings are undefined on resonance (Δ = 0)");
    const int n = array.num_main();
    const int n_relay = array.num_relay();
    Eigen::MatrixXd v(n_relay, n);
    for (int i = 0; i < n; ++i)
        v.col(i) = coupling_vector(array, params, i);
    // Same sign convention as the full elimination, which reduces to
    // -(1/Δ) Σ_μ V_iμ V_jμ for a diagonal relay matrix.
    Eigen::MatrixXd j = -(v.transpose() * v) / delta;
    j.diagonal().setZero();
    return j;
}

Eigen::VectorXd effective_detunings(const AtomArray& array, const PhysicalParams& params,
                                    double omega_up_dressed, Regime regime) {
    const Elimination e = eliminate(array, params, regime);
    return (omega_up_dressed - e.bilinear.diagonal().real().array()).matrix();
}

Eigen::VectorXd effective_decay(const AtomArray& array, const PhysicalParams& params,
                                Regime regime) {
    const Elimination e = eliminate(array, params, regime);
    return (params.main_decay_mhz(regime) + e.bilinear.diagonal().imag().array()).matrix();
}

AdiabaticityReport adiabaticity_report(const AtomArray& array, const PhysicalParams& params,
                                       Regime regime, double threshold) {
    AdiabaticityReport report;
    if (array.num_relay() == 0)
        return report; // no relay dynamics to eliminate: lambda_lowest = 0, invalid

    const Eigen::MatrixXcd m = relay_matrix(array, params, regime);
    const Eigen::MatrixXcd b = std::complex<double>(0.0, -1.0) * m;
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eigen(b, false);
    report.lambda_lowest = eigen.eigenvalues().cwiseAbs().minCoeff();

    try {
        const Elimination e = eliminate(array, params, regime);
        const Eigen::MatrixXd j = couplings_from_bilinear(e.bilinear);
        const Eigen::VectorXd delta = -e.bilinear.diagonal().real();
        const Eigen::VectorXd gamma =
            (params.main_decay_mhz(regime) + e.bilinear.diagonal().imag().array()).matrix();

        report.max_abs_delta_eff = (delta.array() - delta.mean()).abs().maxCoeff();
        report.max_abs_coupling = j.cwiseAbs().maxCoeff();
        report.max_gamma_eff = gamma.maxCoeff();
        const double scale = std::max({report.max_abs_delta_eff, report.max_abs_coupling,
                                       report.max_gamma_eff});
        report.ratio = scale > 0.0 ? report.lambda_lowest / scale
                                   : std::numeric_limits<double>::infinity();
        report.valid = report.ratio > threshold;
    } catch (const EliminationError&) {
        report.max_abs_delta_eff = std::numeric_limits<double>::quiet_NaN();
        report.max_abs_coupling = std::numeric_limits<double>::quiet_NaN();
        report.max_gamma_eff = std::numeric_limits<double>::quiet_NaN();
        report.ratio = 0.0;
        report.valid = false;
    }
    return report;
}

EffectiveModel build_effective_model(const AtomArray& array, const PhysicalParams& params,
                                     Regime regime, double omega_up_dressed,
                                     double threshold) {
    EffectiveModel model;
    const Elimination e = eliminate(array, params, regime);
    model.coupling = couplings_from_bilinear(e.bilinear);
    model.delta_eff = (omega_up_dressed - e.bilinear.diagonal().real().array()).matrix();
    model.gamma_eff =
        (params.main_decay_mhz(regime) + e.bilinear.diagonal().imag().array()).matrix();
    model.adiabaticity = adiabaticity_report(array, params, regime, threshold);
    return model;
}

nlohmann::json to_json(const EffectiveModel& model) {
    const int n = static_cast<int>(model.coupling.rows());
    nlohmann::json coupling = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < n; ++j)
            row.push_back(model.coupling(i, j));
        coupling.push_back(row);
    }
    const AdiabaticityReport& a = model.adiabaticity;
    return nlohmann::json{
        {"coupling", coupling},
        {"delta_eff", std::vector<double>(model.delta_eff.begin(), model.delta_eff.end())},
        {"gamma_eff", std::vector<double>(model.gamma_eff.begin(), model.gamma_eff.end())},
        {"adiabaticity",
         {{"lambda_lowest", a.lambda_lowest},
          {"max_abs_delta_eff", a.max_abs_delta_eff},
          {"max_abs_coupling", a.max_abs_coupling},
          {"max_gamma_eff", a.max_gamma_eff},
          {"ratio", a.ratio},
          {"valid", a.valid}}}};
}

std::string coupling_matrix_csv(const Eigen::MatrixXd& coupling) {
    std::string out = "i,j,coupling_mhz\n";
    for (int i = 0; i < coupling.rows(); ++i) {
        for (int j = 0; j < coupling.cols(); ++j) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += format_double(coupling(i, j));
            out += '\n';
        }
    }
    return out;
}

} // namespace rydrelay
