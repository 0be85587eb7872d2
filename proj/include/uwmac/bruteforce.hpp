#pragma once

#include "uwmac/core.hpp"
#include "uwmac/oracle.hpp"

#include <optional>
#include <vector>

namespace uwmac
{
    inline constexpr std::size_t max_sequence_length = 20;
    inline constexpr std::size_t max_enumeration_horizon = 16;

    /// Thrown when an enumeration request exceeds its size limit.
    class RefusalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Model-aware decisions over the measured window: element k is the action at send
    /// slot warmup - D_ma + k, which feeds measured AP slot warmup + k.
    using ActionSequence = std::vector<Action>;

    /// Exact E[successes / H] over the H = seq.size() measured AP slots, with every
    /// ALOHA node's Bernoulli outcome summed out. Needs exactly one model-aware decision
    /// stream in the scenario.
    double exact_expected_throughput(const ActionSequence &seq, const Scenario &scenario);

    struct EnumerationResult
    {
        ActionSequence best;
        double value = 0.0;
    };

    /// Exhaustive search over all 2^H sequences. Ties (within 1e-12) go to the
    /// lexicographically largest sequence, Transmit ranking above Wait.
    EnumerationResult enumerate_optimal(const Scenario &scenario, std::size_t horizon);

    /// The sequence the model-aware policy plays over the first `horizon` measured slots.
    ActionSequence policy_sequence(const Scenario &scenario, std::size_t horizon);

    struct Certificate
    {
        EnumerationResult enumerated;
        ActionSequence policy;
        double policy_value = 0.0;
        std::optional<OracleResult> oracle;
        bool match = false;
    };

    /// Compares the enumerated optimum against the policy's sequence and the oracle over
    /// the same window. `policy_override` replaces the policy's sequence (negative controls).
    Certificate certify(const Scenario &scenario, std::size_t horizon, double tolerance = 1e-12,
                        const std::optional<ActionSequence> &policy_override = std::nullopt);
}
