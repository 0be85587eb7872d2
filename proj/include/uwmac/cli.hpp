#pragma once

#include "uwmac/bruteforce.hpp"
#include "uwmac/core.hpp"
#include "uwmac/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uwmac::cli
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_failed = 1,
        exit_input_error = 2,
    };

    /// Parses a scenario document. Throws ValidationError with field-path diagnostics.
    Scenario parse_scenario(std::string_view json_text, std::string default_id = "scenario");

    Scenario load_scenario(const std::filesystem::path &path);

    /// Parses "name=v1,v2,..." into a grid axis.
    GridParameter parse_grid_spec(std::string_view spec);

    inline constexpr std::string_view csv_header =
        "scenario_id,seed,measured_slots,successes,collisions,idle,empirical,oracle,branch,z,deviation,"
        "tolerance,pass,tdma_cross_collisions,status";

    /// Shortest round-trip decimal form.
    std::string format_double(double v);

    /// RFC 4180 quoting when the field needs it.
    std::string csv_escape(std::string_view field);

    struct Verdict
    {
        std::optional<double> tolerance;
        std::optional<bool> pass;
        std::string status;
    };

    /// Pass/fail for a report against its own oracle; `tolerance` overrides the default.
    Verdict judge(const SimReport &report, std::optional<double> tolerance);

    std::string csv_row(std::string_view scenario_id, std::uint64_t seed, const SimReport &report,
                        const Verdict &verdict);

    std::string csv_error_row(std::string_view scenario_id, std::uint64_t seed, std::string_view error);

    void write_text_report(std::ostream &os, const Scenario &scenario, const SimReport &report,
                           const Verdict &verdict);

    struct RunOptions
    {
        std::filesystem::path scenario;
        std::optional<Slot> slots;
        std::optional<Slot> warmup;
        std::optional<std::uint64_t> seed;
        std::optional<std::filesystem::path> out;
        std::optional<double> tolerance;
    };

    struct SweepOptions : RunOptions
    {
        std::vector<std::string> grid;
    };

    struct VerifyOptions
    {
        std::filesystem::path scenario;
        std::size_t horizon = 8;
        std::optional<Slot> warmup;
        /// Test hook: flips the first policy decision before certifying.
        bool corrupt_policy = false;
    };

    int cmd_run(const RunOptions &opts, std::ostream &out, std::ostream &err);

    /// Writes the CSV to opts.out when set, otherwise to `out`.
    int cmd_sweep(const SweepOptions &opts, std::ostream &out, std::ostream &err);

    int cmd_verify(const VerifyOptions &opts, std::ostream &out, std::ostream &err);
}
