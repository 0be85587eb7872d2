#include "uwmac/policies.hpp"

#include <algorithm>

namespace uwmac
{
    Action tdma_decide(const TdmaSchedule &schedule, Slot t)
    {
        if (t < 0 || schedule.frame_length <= 0)
            return Action::Wait;
        const Slot offset = t % schedule.frame_length;
        const bool mine = std::find(schedule.assigned.begin(), schedule.assigned.end(), offset) != schedule.assigned.end();
        return mine ? Action::Transmit : Action::Wait;
    }

    std::mt19937_64 node_stream(std::uint64_t seed, NodeId node)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                          node.value};
        return std::mt19937_64(seq);
    }

    std::set<Slot> compute_forbidden_send_slots(std::span<const TdmaSender> tdma_nodes, Delay ma_delay,
                                                Slot first_send, Slot last_send)
    {
        if (last_send < first_send)
            throw ContractViolation("last_send must be >= first_send");

        std::set<Slot> forbidden;
        for (const auto &tdma : tdma_nodes)
        {
            const auto &s = tdma.schedule;
            if (s.frame_length <= 0 || s.assigned.empty())
                continue;
            // model-aware send slot s collides when s + D_ma = t + D_tdma for a scheduled t >= 0
            const Slot shift = tdma.delay.slots - ma_delay.slots;
            const Slot lo_t = std::max<Slot>(0, first_send - shift);
            const Slot hi_t = last_send - shift;
            if (hi_t < lo_t)
                continue;
            const Slot frame_start = lo_t - lo_t % s.frame_length;
            for (Slot base = frame_start; base <= hi_t; base += s.frame_length)
                for (Slot off : s.assigned)
                {
                    const Slot t = base + off;
                    if (t < lo_t || t > hi_t)
                        continue;
                    const Slot send = t + shift;
                    if (send >= 0)
                        forbidden.insert(send);
                }
        }
        return forbidden;
    }

    double z_value(std::span<const double> q)
    {
        double all_silent = 1.0;
        for (double qi : q)
            all_silent *= 1.0 - qi;

        double exactly_one = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
        {
            double term = q[i];
            for (std::size_t j = 0; j < q.size(); ++j)
                if (j != i)
                    term *= 1.0 - q[j];
            exactly_one += term;
        }
        return all_silent - exactly_one;
    }

    Slot send_slot_count(const Scenario &scenario)
    {
        return scenario.effective_warmup() + scenario.horizon + scenario.max_delay();
    }

    ModelAwarePolicy build_model_aware_policy(const Scenario &scenario, NodeId ma_node)
    {
        const NodeSpec &me = scenario.node(ma_node);
        if (!me.is_model_aware())
            throw ContractViolation("node " + std::to_string(ma_node.value) + " is not model-aware");

        std::vector<TdmaSender> tdma;
        for (const auto &n : scenario.nodes)
            if (const auto *t = std::get_if<TdmaRole>(&n.role))
                tdma.push_back({t->schedule, n.delay});

        ModelAwarePolicy policy;
        policy.forbidden_send_slots =
            compute_forbidden_send_slots(tdma, me.delay, 0, std::max<Slot>(0, send_slot_count(scenario) - 1));
        const auto q = scenario.aloha_probabilities();
        policy.z_value = z_value(q);
        policy.default_action = policy.z_value >= 0.0 ? Action::Transmit : Action::Wait;
        return policy;
    }

    GatewayRoster::GatewayRoster(std::vector<NodeId> members, std::size_t cursor)
        : members_(std::move(members)), cursor_(cursor)
    {
        if (!members_.empty() && cursor_ >= members_.size())
            throw ContractViolation("roster cursor out of range");
    }

    GatewaySelection gateway_select(GatewayRoster roster, Action decision)
    {
        if (roster.members().empty())
            throw ContractViolation("gateway roster is empty");
        if (decision == Action::Wait)
            return {std::nullopt, std::move(roster)};

        const NodeId chosen = roster.members()[roster.cursor()];
        const std::size_t next = (roster.cursor() + 1) % roster.members().size();
        return {chosen, GatewayRoster(roster.members(), next)};
    }
}
