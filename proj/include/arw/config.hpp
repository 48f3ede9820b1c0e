#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arw/domain.hpp"
#include "arw/initial_states.hpp"
#include "arw/toppling.hpp"

namespace arw {

/// Parse or validation failure with source position.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, int column, const std::string& message)
        : std::runtime_error("config:" + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Everything a run needs; given the same build, a RunConfig determines
/// every output byte except the manifest timestamp.
struct RunConfig {
    std::string kind = "drive";  // drive|scan|gillespie|couple|selftest|estimate
    std::uint64_t seed = 1;
    std::string out_dir = "runs/out";

    std::vector<std::int32_t> sides{256};
    std::optional<Boundary> boundary;  // unset: resolved per experiment kind

    double lambda = 1.0;
    std::string kernel_spec = "nn";

    InitialStateSpec init;  // family for scan/gillespie/couple

    std::vector<double> u_grid;
    int drive_replicas = 20;

    std::vector<double> zeta_grid;
    int scan_replicas = 10;

    double couple_zeta1 = 0.2;
    double couple_zeta2 = 0.5;
    int couple_seeds = 100;
    std::int64_t couple_round_cap = 100'000;

    double gillespie_zeta = 0.3;
    double gillespie_horizon = std::numeric_limits<double>::infinity();
    bool gillespie_record_events = false;

    std::string estimate_input;

    Scheduler scheduler = Scheduler::Fifo;
    std::uint64_t cap = 0;
    int threads = 0;
};

/// Sectioned key=value text -> RunConfig.  Unknown sections or keys are
/// errors carrying a nearest-name suggestion; range violations name the key.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Grid syntax shared by config files and CLI flags: "lo:hi:step" or a
/// comma-separated list.
std::vector<double> parse_grid(const std::string& text);

std::string nearest_match(const std::string& word, const std::vector<std::string>& options);

}  // namespace arw
