#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qcmap/demo.hpp"
#include "qcmap/hodge.hpp"
#include "qcmap/operators.hpp"
#include "qcmap/solution.hpp"

namespace qc {

inline constexpr double kMaxResidual = std::numeric_limits<double>::max();

// Default thresholds. Any change bumps the version string that reports carry.
struct Thresholds {
    static constexpr const char* version = "thresholds-v1";
    double beltrami_residual = 2e-2;  // recomputed central derivatives, L2 relative
    double isothermal = 5e-2;         // sup |mu_Phi - mu|
    double psi_residual = 5e-2;       // build_psi inhomogeneous residual
    double formula_factor = 5.0;      // formula_defect <= factor * beltrami_residual
    double normalization = 1e-12;     // quotient invariance under normalize
    double oracle_error = 5e-2;       // manufactured sup error after normalize
    double isometry_defect = 5e-2;
    double green_ratio = 0.6;         // residual ratio between two levels
    double holder_slack = 1.05;
    double kernel_bound = 1e-12;      // additive slack on bound_ratio <= 1
    double coercivity = 1e-10;
};

enum class Compare { le, lt, ge, gt };

struct VerifyEntry {
    std::string id;
    double measured = 0.0;
    double threshold = 0.0;
    Compare cmp = Compare::le;
    bool pass = false;
    int n = 0;
    double L = 0.0;
};

class VerifyReport {
public:
    const VerifyEntry& add(const std::string& id, double measured, double threshold, Compare cmp = Compare::le,
                           const GridSpec& grid = {});
    const std::vector<VerifyEntry>& entries() const { return entries_; }
    const VerifyEntry* find(const std::string& id) const;
    bool all_pass() const;
    void append(const VerifyReport& other);
    // "check <id> measured=<v> threshold=<t> pass=<0|1>" lines plus a summary line
    std::string to_text() const;

private:
    std::vector<VerifyEntry> entries_;
};

// |Phi_zb - mu Phi_z| / |Phi_z| from derivatives recomputed on the Phi samples
double beltrami_residual(const QCMapSolution& sol, const ComplexField& mu, DerivMode mode = DerivMode::central);

struct JacobianCheck {
    double min_J = 0.0;
    double formula_defect = 0.0;
};
// stored derivative fields: |Phi_z|^2 - |Phi_zb|^2 against |Phi_z|^2 (1 - |mu|^2)
JacobianCheck jacobian_check(const QCMapSolution& sol, const ComplexField& mu);

// sup |Phi_zb / Phi_z - mu|, recomputed central derivatives; throws DegenerateDerivative
double isothermal_check(const QCMapSolution& sol, const ComplexField& mu);

struct HolderLemma {
    double lhs = 0.0; // holder_seminorm(H mu)
    double rhs = 0.0; // C_alpha * holder_seminorm(mu)
    bool pass = false;
};
HolderLemma holder_lemma_check(const ComplexField& mu, double alpha, const OperatorConfig& cfg = {},
                               long num_pairs = 20000, std::uint64_t seed = 20240611);

using MuSampler = std::function<ComplexField(const GridSpec&)>;

struct CrossSolverLevel {
    int n = 0;
    double disagreement = 0.0;
};

// sup |Phi_neumann - Phi_variational| after normalize, per level; entries
// "cross_solver.n<N>" each thresholded by the previous level
VerifyReport cross_solver_check(const MuSampler& mu, double L, const std::vector<int>& levels, double tol,
                                std::vector<CrossSolverLevel>* levels_out = nullptr);

struct SuiteOptions {
    DemoMu demo;
    bool use_demo = true;
    ComplexField mu_field; // when use_demo is false
    int n = 128;
    double L = 2.0;
    double tol = 1e-10;
    bool full = false;
    Thresholds thr;
};

// checks of one solution: beltrami, jacobian, isothermal, normalization, oracle
void append_solution_checks(VerifyReport& rep, const std::string& prefix, const QCMapSolution& sol,
                            const ComplexField& mu, const Thresholds& thr, const DemoMu* demo = nullptr);

// core: both pipelines and their checks; full adds kernel, Green identity, Holder
// lemma, coercivity, isometry and cross-solver checks. Solver errors propagate.
VerifyReport run_suite(const SuiteOptions& opt);

} // namespace qc
