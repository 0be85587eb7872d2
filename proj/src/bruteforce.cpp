#include "uwmac/bruteforce.hpp"

#include "uwmac/engine.hpp"
#include "uwmac/policies.hpp"

#include <cmath>

namespace uwmac
{
    namespace
    {
        // Per-slot success probabilities for the model-aware sender waiting (index 0) or
        // transmitting (index 1), with other traffic fixed by the scenario.
        struct SlotTable
        {
            std::vector<double> wait;
            std::vector<double> transmit;
        };

        // Enumerates every ALOHA outcome vector; returns P(none) and P(exactly one).
        std::pair<double, double> aloha_counts(const std::vector<double> &q)
        {
            if (q.size() > 20)
                throw RefusalError("too many ALOHA nodes for exact enumeration");
            double none = 0.0;
            double one = 0.0;
            const std::uint64_t outcomes = std::uint64_t{1} << q.size();
            for (std::uint64_t mask = 0; mask < outcomes; ++mask)
            {
                double prob = 1.0;
                int senders = 0;
                for (std::size_t i = 0; i < q.size(); ++i)
                {
                    const bool sends = (mask >> i) & 1u;
                    prob *= sends ? q[i] : 1.0 - q[i];
                    senders += sends;
                }
                if (senders == 0)
                    none += prob;
                else if (senders == 1)
                    one += prob;
            }
            return {none, one};
        }

        SlotTable slot_table(const Scenario &scenario, std::size_t horizon)
        {
            scenario.validate();
            if (!scenario.decision_node())
                throw ContractViolation("scenario has no model-aware sender");

            const auto [none, one] = aloha_counts(scenario.aloha_probabilities());
            const Slot first = scenario.effective_warmup();

            SlotTable table;
            for (std::size_t k = 0; k < horizon; ++k)
            {
                const Slot ap = first + static_cast<Slot>(k);
                int tdma = 0;
                for (const auto &n : scenario.nodes)
                    if (const auto *t = std::get_if<TdmaRole>(&n.role))
                    {
                        const Slot send = ap - n.delay.slots;
                        tdma += send >= 0 && tdma_decide(t->schedule, send) == Action::Transmit;
                    }
                auto success = [&](int fixed_senders)
                {
                    if (fixed_senders >= 2)
                        return 0.0;
                    return fixed_senders == 1 ? none : one;
                };
                table.wait.push_back(success(tdma));
                table.transmit.push_back(success(tdma + 1));
            }
            return table;
        }

        double sequence_value(const SlotTable &table, const ActionSequence &seq)
        {
            double sum = 0.0;
            for (std::size_t k = 0; k < seq.size(); ++k)
                sum += seq[k] == Action::Transmit ? table.transmit[k] : table.wait[k];
            return sum / static_cast<double>(seq.size());
        }
    }

    double exact_expected_throughput(const ActionSequence &seq, const Scenario &scenario)
    {
        if (seq.size() > max_sequence_length)
            throw RefusalError("sequence length " + std::to_string(seq.size()) + " exceeds " +
                               std::to_string(max_sequence_length));
        if (seq.empty())
            throw ContractViolation("sequence must be nonempty");
        return sequence_value(slot_table(scenario, seq.size()), seq);
    }

    EnumerationResult enumerate_optimal(const Scenario &scenario, std::size_t horizon)
    {
        if (horizon > max_enumeration_horizon)
            throw RefusalError("horizon " + std::to_string(horizon) + " exceeds " +
                               std::to_string(max_enumeration_horizon));
        if (horizon == 0)
            throw ContractViolation("horizon must be positive");

        const SlotTable table = slot_table(scenario, horizon);
        const std::uint64_t count = std::uint64_t{1} << horizon;

        EnumerationResult best;
        bool have = false;
        ActionSequence seq(horizon);
        // descending masks with slot 0 as the most significant bit visit sequences in
        // lexicographically decreasing order, so the first maximizer wins ties
        for (std::uint64_t mask = count; mask-- > 0;)
        {
            for (std::size_t k = 0; k < horizon; ++k)
                seq[k] = (mask >> (horizon - 1 - k)) & 1u ? Action::Transmit : Action::Wait;
            const double value = sequence_value(table, seq);
            if (!have || value > best.value + 1e-12)
            {
                best.best = seq;
                best.value = value;
                have = true;
            }
        }
        return best;
    }

    ActionSequence policy_sequence(const Scenario &scenario, std::size_t horizon)
    {
        scenario.validate();
        const auto node = scenario.decision_node();
        if (!node)
            throw ContractViolation("scenario has no model-aware sender");

        // the policy must cover the sends feeding the window even if horizon exceeds the
        // scenario's own horizon
        Scenario widened = scenario;
        widened.horizon = std::max<Slot>(widened.horizon, static_cast<Slot>(horizon));
        const auto policy = build_model_aware_policy(widened, *node);
        const Slot first_send = scenario.effective_warmup() - scenario.node(*node).delay.slots;

        ActionSequence seq;
        for (std::size_t k = 0; k < horizon; ++k)
            seq.push_back(policy.decide(first_send + static_cast<Slot>(k)));
        return seq;
    }

    Certificate certify(const Scenario &scenario, std::size_t horizon, double tolerance,
                        const std::optional<ActionSequence> &policy_override)
    {
        Certificate cert;
        cert.enumerated = enumerate_optimal(scenario, horizon);
        cert.policy = policy_override ? *policy_override : policy_sequence(scenario, horizon);
        cert.policy_value = exact_expected_throughput(cert.policy, scenario);

        Scenario window = scenario;
        window.horizon = static_cast<Slot>(horizon);
        bool cross = false;
        {
            const Slot first = window.effective_warmup();
            for (Slot a = first; a < first + window.horizon && !cross; ++a)
            {
                int tdma = 0;
                for (const auto &n : window.nodes)
                    if (const auto *t = std::get_if<TdmaRole>(&n.role))
                        tdma += a - n.delay.slots >= 0 && tdma_decide(t->schedule, a - n.delay.slots) == Action::Transmit;
                cross = tdma >= 2;
            }
        }
        if (!cross)
            cert.oracle = scenario_oracle(window);

        cert.match = std::abs(cert.enumerated.value - cert.policy_value) <= tolerance &&
                     (!cert.oracle || std::abs(cert.enumerated.value - cert.oracle->optimal_throughput) <= tolerance);
        return cert;
    }
}
