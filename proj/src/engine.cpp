#include "uwmac/engine.hpp"

#include "uwmac/policies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace uwmac
{
    namespace
    {
        enum class Kind
        {
            Tdma,
            Aloha,
            ModelAware,
        };

        Kind kind_of(const NodeSpec &n)
        {
            if (n.is_tdma())
                return Kind::Tdma;
            if (n.is_aloha())
                return Kind::Aloha;
            return Kind::ModelAware;
        }

        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        bool tdma_arrives(const Scenario &scenario, Slot ap_slot)
        {
            for (const auto &n : scenario.nodes)
                if (const auto *t = std::get_if<TdmaRole>(&n.role))
                {
                    const Slot send = ap_slot - n.delay.slots;
                    if (send >= 0 && tdma_decide(t->schedule, send) == Action::Transmit)
                        return true;
                }
            return false;
        }

        NodeSpec &mutable_node(Scenario &scenario, std::uint32_t id)
        {
            for (auto &n : scenario.nodes)
                if (n.id.value == id)
                    return n;
            throw ValidationError({"unknown node id " + std::to_string(id)});
        }

        std::uint32_t parse_node_suffix(const std::string &name, std::size_t prefix)
        {
            const std::string digits = name.substr(prefix);
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
                throw ValidationError({"parameter " + name + ": expected a node id suffix"});
            return static_cast<std::uint32_t>(std::stoul(digits));
        }

        Slot as_slot_count(const std::string &name, double value)
        {
            if (value != std::floor(value))
                throw ValidationError({"parameter " + name + ": expected an integer"});
            return static_cast<Slot>(value);
        }
    }

    double measured_tdma_ratio(const Scenario &scenario)
    {
        const Slot first = scenario.effective_warmup();
        std::uint64_t busy = 0;
        for (Slot a = first; a < first + scenario.horizon; ++a)
            if (tdma_arrives(scenario, a))
                ++busy;
        return scenario.horizon > 0 ? static_cast<double>(busy) / static_cast<double>(scenario.horizon) : 0.0;
    }

    std::optional<OracleResult> scenario_oracle(const Scenario &scenario)
    {
        if (scenario.model_aware_count() == 0)
            return std::nullopt;
        const auto q = scenario.aloha_probabilities();
        if (scenario.tdma_count() == 0)
            return optimal_aloha(q);
        if (q.empty())
            return optimal_tdma_only();
        return optimal_mixed(measured_tdma_ratio(scenario), q);
    }

    SimReport run(const Scenario &scenario)
    {
        scenario.validate();

        std::vector<const NodeSpec *> nodes;
        for (const auto &n : scenario.nodes)
            nodes.push_back(&n);
        std::sort(nodes.begin(), nodes.end(), [](auto *a, auto *b) { return a->id < b->id; });

        std::vector<Kind> kinds;
        std::vector<std::mt19937_64> streams;
        for (const auto *n : nodes)
        {
            kinds.push_back(kind_of(*n));
            streams.push_back(node_stream(scenario.seed, n->id));
        }

        const auto decision_node = scenario.decision_node();
        std::optional<ModelAwarePolicy> policy;
        GatewayRoster roster;
        if (decision_node)
        {
            policy = build_model_aware_policy(scenario, *decision_node);
            auto members = scenario.gateway_members();
            if (members.empty())
                members.push_back(*decision_node);
            roster = GatewayRoster(std::move(members));
        }

        SimReport report;
        report.warmup = scenario.effective_warmup();
        for (const auto *n : nodes)
        {
            report.per_node_successes[n->id] = 0;
            report.per_node_attempts[n->id] = 0;
        }

        const Slot first_measured = report.warmup;
        const Slot end_measured = first_measured + scenario.horizon;
        const Slot send_slots = send_slot_count(scenario);
        const Slot min_delay = scenario.min_delay();

        ArrivalLedger ledger;
        Slot next_ap = 0;

        auto settle = [&](Slot through)
        {
            for (; next_ap <= through && next_ap < end_measured; ++next_ap)
            {
                if (next_ap < first_measured)
                    continue;
                auto arrivals = ledger.arrivals(next_ap);
                std::size_t tdma = 0;
                std::size_t model_aware = 0;
                for (auto id : arrivals)
                {
                    ++report.per_node_attempts[id];
                    const Kind k = kinds[id.value];
                    tdma += k == Kind::Tdma;
                    model_aware += k == Kind::ModelAware;
                }
                if (tdma >= 2)
                    ++report.tdma_cross_collisions;
                if (tdma >= 1 && model_aware >= 1)
                    ++report.model_aware_tdma_collisions;

                const auto outcome = resolve_arrivals(std::move(arrivals));
                switch (outcome.kind())
                {
                case SlotOutcome::Kind::Idle:
                    ++report.idle;
                    break;
                case SlotOutcome::Kind::Success:
                    ++report.successes;
                    ++report.per_node_successes[outcome.nodes().front()];
                    break;
                case SlotOutcome::Kind::Collision:
                    ++report.collisions;
                    break;
                }
            }
            ledger.release_before(next_ap);
        };

        for (Slot s = 0; s < send_slots; ++s)
        {
            for (std::size_t i = 0; i < nodes.size(); ++i)
            {
                const NodeSpec &n = *nodes[i];
                Action a = Action::Wait;
                if (const auto *t = std::get_if<TdmaRole>(&n.role))
                    a = tdma_decide(t->schedule, s);
                else if (const auto *al = std::get_if<AlohaRole>(&n.role))
                    a = aloha_decide(al->params, streams[i]);
                if (a == Action::Transmit)
                    ledger.register_transmission(n.id, s, n.delay);
            }

            if (policy)
            {
                auto selection = gateway_select(std::move(roster), policy->decide(s));
                roster = std::move(selection.roster);
                if (selection.transmitter)
                    ledger.register_transmission(*selection.transmitter, s,
                                                 scenario.node(*selection.transmitter).delay);
            }

            // later sends arrive no earlier than s + 1 + min_delay
            settle(s + min_delay);
        }
        settle(end_measured);

        report.measured_slots = static_cast<std::uint64_t>(scenario.horizon);
        report.empirical_throughput =
            static_cast<double>(report.successes) / static_cast<double>(report.measured_slots);

        if (report.tdma_cross_collisions == 0)
            report.oracle = scenario_oracle(scenario);
        if (report.oracle)
            report.deviation = std::abs(report.empirical_throughput - report.oracle->optimal_throughput);
        return report;
    }

    Comparison compare_to_oracle(const SimReport &report, const OracleResult &oracle, double tolerance)
    {
        if (!(tolerance > 0.0))
            throw ContractViolation("tolerance must be positive");
        const double deviation = std::abs(report.empirical_throughput - oracle.optimal_throughput);
        return {deviation <= tolerance, deviation};
    }

    double default_tolerance(double optimal, std::uint64_t measured_slots)
    {
        const double n = static_cast<double>(std::max<std::uint64_t>(measured_slots, 1));
        const double var = std::max(0.0, optimal * (1.0 - optimal));
        return 4.0 * std::sqrt(var / n) + 1e-9;
    }

    void apply_parameter(Scenario &scenario, const std::string &name, double value)
    {
        if (name == "q")
        {
            bool any = false;
            for (auto &n : scenario.nodes)
                if (auto *a = std::get_if<AlohaRole>(&n.role))
                {
                    a->params.q = value;
                    any = true;
                }
            if (!any)
                throw ValidationError({"parameter q: scenario has no ALOHA node"});
        }
        else if (name.starts_with("q."))
        {
            auto &n = mutable_node(scenario, parse_node_suffix(name, 2));
            auto *a = std::get_if<AlohaRole>(&n.role);
            if (!a)
                throw ValidationError({"parameter " + name + ": node is not ALOHA"});
            a->params.q = value;
        }
        else if (name == "p")
        {
            TdmaRole *only = nullptr;
            for (auto &n : scenario.nodes)
                if (auto *t = std::get_if<TdmaRole>(&n.role))
                {
                    if (only)
                        throw ValidationError({"parameter p: needs exactly one TDMA node"});
                    only = t;
                }
            if (!only)
                throw ValidationError({"parameter p: needs exactly one TDMA node"});
            if (!(value >= 0.0 && value <= 1.0))
                throw ValidationError({"parameter p: must lie in [0, 1]"});
            const double slots = value * static_cast<double>(only->schedule.frame_length);
            const double rounded = std::round(slots);
            if (std::abs(slots - rounded) > 1e-9)
                throw ValidationError({"parameter p: p * frame_length must be an integer"});
            only->schedule.assigned.clear();
            for (Slot k = 0; k < static_cast<Slot>(rounded); ++k)
                only->schedule.assigned.push_back(k);
        }
        else if (name.starts_with("delay."))
        {
            mutable_node(scenario, parse_node_suffix(name, 6)).delay = Delay{as_slot_count(name, value)};
        }
        else if (name == "horizon")
        {
            scenario.horizon = as_slot_count(name, value);
        }
        else if (name == "warmup")
        {
            scenario.warmup = as_slot_count(name, value);
        }
        else if (name == "seed")
        {
            if (value < 0 || value != std::floor(value))
                throw ValidationError({"parameter seed: expected a nonnegative integer"});
            scenario.seed = static_cast<std::uint64_t>(value);
        }
        else
        {
            throw ValidationError({"unknown sweep parameter '" + name + "'"});
        }
    }

    std::uint64_t derive_point_seed(std::uint64_t base_seed, std::size_t index)
    {
        return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(index)));
    }

    std::vector<SweepPoint> sweep(const Scenario &base, const std::vector<GridParameter> &grid)
    {
        if (grid.empty())
            return {};

        std::size_t total = 1;
        for (const auto &g : grid)
            total *= g.values.size();

        std::vector<SweepPoint> points(total);
        for (std::size_t index = 0; index < total; ++index)
        {
            auto &pt = points[index];
            std::size_t rest = index;
            std::vector<std::size_t> pick(grid.size());
            for (std::size_t k = grid.size(); k-- > 0;)
            {
                pick[k] = rest % grid[k].values.size();
                rest /= grid[k].values.size();
            }
            for (std::size_t k = 0; k < grid.size(); ++k)
                pt.params.emplace_back(grid[k].name, grid[k].values[pick[k]]);
        }

        auto evaluate = [&](std::size_t index)
        {
            auto &pt = points[index];
            try
            {
                Scenario s = base;
                s.seed = derive_point_seed(base.seed, index);
                for (const auto &[name, value] : pt.params)
                    apply_parameter(s, name, value);
                pt.seed = s.seed;
                pt.scenario = s;
                pt.report = run(s);
            }
            catch (const std::exception &e)
            {
                pt.error = e.what();
            }
        };

        const std::size_t workers =
            std::max<std::size_t>(1, std::min<std::size_t>(total, std::thread::hardware_concurrency()));
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]
                              {
                                  for (std::size_t i = next++; i < total; i = next++)
                                      evaluate(i);
                              });
        pool.clear();
        return points;
    }
}
