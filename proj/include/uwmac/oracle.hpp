#pragma once

#include <span>

namespace uwmac
{
    enum class Branch
    {
        Transmit,
        Silent,
    };

    const char *to_string(Branch b) noexcept;

    /// Closed-form optimum for a coexistence scenario.
    struct OracleResult
    {
        double optimal_throughput = 1.0;
        Branch chosen_branch = Branch::Transmit;
        double z_value = 1.0;

        friend bool operator==(const OracleResult &, const OracleResult &) = default;
    };

    /// Probability that exactly one ALOHA node transmits.
    double success_prob_exactly_one(std::span<const double> q);

    /// Probability that no ALOHA node transmits.
    double all_silent_prob(std::span<const double> q);

    /// f(b): per-slot success probability when the model-aware sender transmits with
    /// probability b against independent ALOHA senders.
    double expected_slot_throughput(double b, std::span<const double> q);

    /// F(b): f(b) averaged with the TDMA-occupied fraction p, in which the model-aware
    /// sender stays silent.
    double expected_mixed_throughput(double b, double p, std::span<const double> q);

    OracleResult optimal_tdma_only();
    OracleResult optimal_aloha(std::span<const double> q);
    OracleResult optimal_mixed(double p, std::span<const double> q);
}
