#pragma once

#include "uwmac/core.hpp"

#include <concepts>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace uwmac
{
    Action tdma_decide(const TdmaSchedule &schedule, Slot t);

    /// Uniform double in [0, 1) from the top 53 bits of a 64-bit generator.
    template <std::uniform_random_bit_generator Rng>
    double uniform01(Rng &rng)
    {
        static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                      "uniform01 expects a full-range 64-bit generator");
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    /// Transmit with probability q. Consumes exactly one draw per call.
    template <std::uniform_random_bit_generator Rng>
    Action aloha_decide(const AlohaParams &params, Rng &rng)
    {
        return uniform01(rng) < params.q ? Action::Transmit : Action::Wait;
    }

    /// Independent stream for one node, derived from the scenario seed and the node id.
    std::mt19937_64 node_stream(std::uint64_t seed, NodeId node);

    struct TdmaSender
    {
        TdmaSchedule schedule;
        Delay delay;
    };

    /// Model-aware send slots in [first_send, last_send] whose arrival would land on a
    /// TDMA arrival at the AP.
    std::set<Slot> compute_forbidden_send_slots(std::span<const TdmaSender> tdma_nodes, Delay ma_delay,
                                                Slot first_send, Slot last_send);

    /// prod(1 - q_i) - sum_i q_i prod_{j != i}(1 - q_j). The derivative of the expected
    /// slot throughput with respect to the model-aware transmit probability.
    double z_value(std::span<const double> q);

    struct ModelAwarePolicy
    {
        std::set<Slot> forbidden_send_slots;
        Action default_action = Action::Transmit;
        double z_value = 1.0;

        Action decide(Slot t) const
        {
            return forbidden_send_slots.contains(t) ? Action::Wait : default_action;
        }
    };

    /// Number of send slots the engine simulates: warmup + horizon + max delay.
    Slot send_slot_count(const Scenario &scenario);

    /// Policy for `ma_node` covering every simulated send slot of the scenario.
    ModelAwarePolicy build_model_aware_policy(const Scenario &scenario, NodeId ma_node);

    class GatewayRoster
    {
    public:
        GatewayRoster() = default;
        explicit GatewayRoster(std::vector<NodeId> members, std::size_t cursor = 0);

        const std::vector<NodeId> &members() const noexcept { return members_; }
        std::size_t cursor() const noexcept { return cursor_; }

    private:
        std::vector<NodeId> members_;
        std::size_t cursor_ = 0;
    };

    struct GatewaySelection
    {
        std::optional<NodeId> transmitter;
        GatewayRoster roster;
    };

    /// On Transmit picks members[cursor] and advances the cursor cyclically; on Wait
    /// nobody transmits. Throws ContractViolation for an empty roster.
    GatewaySelection gateway_select(GatewayRoster roster, Action decision);
}
