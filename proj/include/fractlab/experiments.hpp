#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fractlab/geometry.hpp"
#include "fractlab/regular.hpp"
#include "fractlab/scenery.hpp"
#include "fractlab/stats.hpp"

namespace fractlab {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Generators, CLI-facing description
// ---------------------------------------------------------------------------

struct GeneratorSpec {
    std::string kind;  // "uniform" | "pattern" | "katz-tao" | "random"
    int dim = 2;
    int scale = 0;
    PatternSpec pattern;  // kind == "pattern"
    double s = 0.0;       // kind == "random"
    double C = 4.0;       // kind == "random"
    uint64_t seed = 1;
};

GridSet build_generator(const GeneratorSpec& g);

// ---------------------------------------------------------------------------
// Standard battery: the fixed set of generator instances every calibration
// and inequality sweep runs over.
// ---------------------------------------------------------------------------

struct BatteryInstance {
    std::string name;
    std::optional<GridSet> set;  // absent for measure-only entries
    DyadicMeasure measure;       // uniform on `set` unless measure-only
    double s_nominal = 0.0;      // design dimension of the support (0 = n/a)
    double C_nominal = 0.0;      // generator band constant when one was used
};

// d = 1 or 2 for one slice, 0 for the full battery.
std::vector<BatteryInstance> standard_battery(int d = 0);

// ---------------------------------------------------------------------------
// Calibrated constants. The asymptotic bounds leave their constants
// unspecified; `calibrate` measures worst cases over the standard battery at
// desk scale and freezes them (x1.25 headroom on upper bounds, x0.8 on the
// richness constant, which sits on the other side of the inequality).
// ---------------------------------------------------------------------------

struct CalibrationConstants {
    double c_local_global_d1 = 0.0;  // |H_N'(mu) - int H_q| * N'/q <= c_d
    double c_local_global_d2 = 0.0;
    double c_direction = 0.0;     // |E_q(v) - E_q(v')| <= c/q per 2^-q step
    double c_pinch_scale = 0.0;   // c1: the q/N' term in the pinned bound
    double c_pinch_proj = 0.0;    // c2: the 1/q term
    double C_prime = 0.0;         // richness resolution delta = sqrt(eps)/C'
    std::vector<std::pair<double, double>> C_beta;  // (beta, C(beta))
    uint64_t seed = 1;
    std::string version;
    std::string provenance;
    std::string source_hash;  // hash of the file these were loaded from

    double c_local_global(int dim) const {
        return dim == 1 ? c_local_global_d1 : c_local_global_d2;
    }
    double cone_constant(double beta) const;  // exact-beta lookup
};

CalibrationConstants calibrate(uint64_t seed = 1);
void save_constants(const std::string& path, const CalibrationConstants& c);
CalibrationConstants load_constants(const std::string& path);

// FNV-1a over the file bytes, as 16 hex digits.
std::string file_hash_hex(const std::string& path);

// ---------------------------------------------------------------------------
// Measurement sweeps shared by calibrate, the inequality experiment, and the
// acceptance suite.
// ---------------------------------------------------------------------------

struct GapSample {
    std::string instance;
    int dim = 0, q = 0, N_prime = 0;
    double gap = 0.0;     // H_N'(mu) - int H_q d<mu>_[0,N')
    double scaled = 0.0;  // |gap| * N'/q
};

// (q, N') grids are per-dimension; pairs with N' + q > depth are skipped.
std::vector<GapSample> local_global_sweep(
    const std::vector<BatteryInstance>& battery,
    const std::vector<std::pair<int, int>>& qn_d1,
    const std::vector<std::pair<int, int>>& qn_d2);

struct SweepSample {
    std::string instance;
    int q = 0;
    double max_step = 0.0;  // max |E_q(v) - E_q(v')| over 2^-q steps
    double min_value = 0.0, max_value = 0.0;
    std::vector<double> profile;  // E_q at each step, for CSV export
};

std::vector<SweepSample> direction_sweep(const std::vector<BatteryInstance>& battery,
                                         const std::vector<int>& qs);

struct PinchedSample {
    std::string instance;
    int q = 0, N_prime = 0;
    double theta = 0.0;     // target direction v
    uint64_t cell = 0;      // depth-q cell D
    double max_chord = 0.0; // worst |sigma(x,y) - v| over the support in D
    double lhs = 0.0;       // H_N'(phi_x mu_D)
    double rhs = 0.0;       // int H_q(Pi_v eta) d<mu_D>_[0,N')
};

std::vector<PinchedSample> pinched_configurations(
    const std::vector<BatteryInstance>& battery);

struct RichnessSample {
    std::string instance;
    int q = 0, N_prime = 0;
    double s = 0.0;
    double C_star = 0.0;      // sampled regularity constant of the support
    double eps = 0.0;         // smallest eps compatible with the hypotheses
    double delta_star = 0.0;  // infimum of workable richness resolutions
};

std::vector<RichnessSample> richness_sweep(const std::vector<BatteryInstance>& battery);

struct ConeSample {
    std::string name;
    double beta = 0.0;
    int k = 0;           // separation scale: points are >= 2^-k apart
    uint64_t size = 0;   // |A|
    bool cone_free = true;  // every point's (beta, v) cone verified empty
    double ratio = 0.0;     // |A| / 2^k
};

// Line- and comb-shaped cone-avoiding sets; the constructive battery behind
// the C(beta) table.
std::vector<ConeSample> cone_battery(const std::vector<double>& betas);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::string version = kToolVersion;
    std::string constants_hash = "none";
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json measured = nlohmann::json::object();
    std::vector<Verdict> verdicts;
    double runtime_seconds = 0.0;

    bool all_pass() const;
};

nlohmann::json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);
void save_report(const std::string& path, const ExperimentReport& r);
ExperimentReport load_report(const std::string& path);

// OLS slope of log2(count) against N; needs >= 3 scales.
ols_fit_t box_dim_estimate(const std::vector<std::pair<int, uint64_t>>& counts);

// ---------------------------------------------------------------------------
// Headline experiments
// ---------------------------------------------------------------------------

ExperimentReport experiment_theorem11(const GeneratorSpec& g, double t,
                                      PinPolicy policy = {});
ExperimentReport experiment_katz_tao(const std::vector<int>& scales);
ExperimentReport experiment_inequalities(const CalibrationConstants& constants);

}  // namespace fractlab
