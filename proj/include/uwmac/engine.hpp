#pragma once

#include "uwmac/core.hpp"
#include "uwmac/oracle.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace uwmac
{
    struct SimReport
    {
        std::uint64_t measured_slots = 0;
        std::uint64_t successes = 0;
        std::uint64_t collisions = 0;
        std::uint64_t idle = 0;
        std::map<NodeId, std::uint64_t> per_node_successes;
        /// Transmissions per node whose arrival fell inside the measured window.
        std::map<NodeId, std::uint64_t> per_node_attempts;
        double empirical_throughput = 0.0;
        std::optional<OracleResult> oracle;
        std::optional<double> deviation;
        /// Measured AP slots with two or more TDMA arrivals.
        std::uint64_t tdma_cross_collisions = 0;
        /// Measured AP slots where a model-aware arrival met a TDMA arrival.
        std::uint64_t model_aware_tdma_collisions = 0;
        /// First measured AP slot; slots before it are excluded from every count.
        Slot warmup = 0;

        friend bool operator==(const SimReport &, const SimReport &) = default;
    };

    /// Fraction of measured AP slots carrying at least one TDMA arrival.
    double measured_tdma_ratio(const Scenario &scenario);

    /// Closed-form optimum for the scenario's measured window, or nothing when the
    /// scenario has no model-aware sender.
    std::optional<OracleResult> scenario_oracle(const Scenario &scenario);

    /// Runs the slotted simulation. Throws ValidationError listing every violation.
    SimReport run(const Scenario &scenario);

    struct Comparison
    {
        bool pass = false;
        double deviation = 0.0;
    };

    Comparison compare_to_oracle(const SimReport &report, const OracleResult &oracle, double tolerance);

    /// 4 sqrt(T (1 - T) / n) + 1e-9.
    double default_tolerance(double optimal, std::uint64_t measured_slots);

    struct GridParameter
    {
        std::string name;
        std::vector<double> values;
    };

    /// Names accepted by apply_parameter: q, q.<id>, p, delay.<id>, horizon, warmup, seed.
    void apply_parameter(Scenario &scenario, const std::string &name, double value);

    struct SweepPoint
    {
        std::vector<std::pair<std::string, double>> params;
        std::uint64_t seed = 0;
        std::optional<Scenario> scenario;
        std::optional<SimReport> report;
        std::string error;
    };

    std::uint64_t derive_point_seed(std::uint64_t base_seed, std::size_t index);

    /// One point per element of the Cartesian product of the grid, first parameter
    /// slowest. An empty grid yields no points. Points run concurrently; results come
    /// back in grid order. Per-point failures land in SweepPoint::error.
    std::vector<SweepPoint> sweep(const Scenario &base, const std::vector<GridParameter> &grid);
}
