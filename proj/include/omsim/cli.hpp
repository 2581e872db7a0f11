// cli.hpp - Command-line front end: run configuration, CSV emission,
// figure-style sweeps and delay scans, comparison reports, validation.
//
// All CLI rates are dimensionless ratios (g/kappa, gamma/kappa, Delta/g,
// omega/kappa); kappa = 1 internally. Detunings are specified in units
// of g, or of kappa when g = 0. CSV files carry a '#'-prefixed header
// block from which the run is fully reproducible.

#pragma once

#include "omsim/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace omsim {

struct GridSpec {
    double min{-1};
    double max{1};
    int points{201};
    bool log_scale{false};

    std::vector<double> values() const;
    std::string to_string() const;        // "min:max:points[:log]"
    static GridSpec parse(const std::string& text);
};

struct RunConfig {
    std::string command{"sweep"};  // sweep | thermal | tau | compare | validate
    SystemParams params;           // delta field unused; grids/flags below set it
    bool dims_set{false};          // --dims given (otherwise derived from n_th)
    GridSpec grid;                 // detuning grid, units of g (kappa if g = 0)
    double delta_over_g{0};        // tau command detuning
    std::string pair{"aa"};        // tau channel pair: aa ss RR as sa
    double tau_max{-1};            // < 0: default 5/gamma
    bool with_analytic{false};
    std::string out;               // empty: stdout

    void finalize();  // apply default dims, validate parameters
};

// Header block round-trip: a file's '#' lines reproduce its RunConfig.
std::string config_header(const RunConfig& config);
RunConfig config_from_header(std::istream& in);
RunConfig config_from_header_text(const std::string& text);

// CSV renderers (header + body). Deterministic: identical configs give
// byte-identical output.
std::string render_sweep_csv(const RunConfig& config);
std::string render_tau_csv(const RunConfig& config);
std::string render_compare_report(const RunConfig& config);
std::string render_validate_report(const RunConfig& config, bool* all_passed);

// Full command dispatch. Exit codes: 0 success, 1 total failure,
// 2 validation failure.
int run_command(const RunConfig& config, std::ostream& out_stream, std::ostream& err_stream);
int cli_main(const std::vector<std::string>& args, std::ostream& out_stream,
             std::ostream& err_stream);

}  // namespace omsim
