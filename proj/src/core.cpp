#include "uwmac/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace uwmac
{
    namespace
    {
        std::string join_violations(const std::vector<std::string> &violations)
        {
            std::ostringstream os;
            os << "invalid input";
            for (const auto &v : violations)
                os << "\n  " << v;
            return os.str();
        }
    }

    ValidationError::ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join_violations(violations)), violations_(std::move(violations))
    {
    }

    const char *to_string(Action a) noexcept
    {
        return a == Action::Transmit ? "Transmit" : "Wait";
    }

    double TdmaSchedule::ratio() const noexcept
    {
        if (frame_length <= 0)
            return 0.0;
        return static_cast<double>(assigned.size()) / static_cast<double>(frame_length);
    }

    Slot Scenario::max_delay() const noexcept
    {
        Slot m = 0;
        for (const auto &n : nodes)
            m = std::max(m, n.delay.slots);
        return m;
    }

    Slot Scenario::min_delay() const noexcept
    {
        if (nodes.empty())
            return 0;
        Slot m = nodes.front().delay.slots;
        for (const auto &n : nodes)
            m = std::min(m, n.delay.slots);
        return m;
    }

    std::size_t Scenario::tdma_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const NodeSpec &n) { return n.is_tdma(); }));
    }

    std::size_t Scenario::aloha_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const NodeSpec &n) { return n.is_aloha(); }));
    }

    std::size_t Scenario::model_aware_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const NodeSpec &n) { return n.is_model_aware(); }));
    }

    const NodeSpec &Scenario::node(NodeId id) const
    {
        auto it = std::find_if(nodes.begin(), nodes.end(), [id](const NodeSpec &n) { return n.id == id; });
        if (it == nodes.end())
            throw ContractViolation("unknown node id " + std::to_string(id.value));
        return *it;
    }

    std::vector<double> Scenario::aloha_probabilities() const
    {
        std::vector<const NodeSpec *> sorted;
        for (const auto &n : nodes)
            if (n.is_aloha())
                sorted.push_back(&n);
        std::sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) { return a->id < b->id; });

        std::vector<double> q;
        q.reserve(sorted.size());
        for (const auto *n : sorted)
            q.push_back(std::get<AlohaRole>(n->role).params.q);
        return q;
    }

    std::vector<NodeId> Scenario::gateway_members() const
    {
        std::vector<NodeId> members;
        for (const auto &n : nodes)
            if (const auto *ma = std::get_if<ModelAwareRole>(&n.role); ma && ma->gateway_member)
                members.push_back(n.id);
        std::sort(members.begin(), members.end());
        return members;
    }

    std::optional<NodeId> Scenario::decision_node() const
    {
        auto members = gateway_members();
        if (!members.empty())
            return members.front();
        for (const auto &n : nodes)
            if (n.is_model_aware())
                return n.id;
        return std::nullopt;
    }

    std::vector<std::string> Scenario::violations() const
    {
        std::vector<std::string> out;

        if (nodes.empty())
            out.emplace_back("nodes: at least one node is required");
        if (horizon <= 0)
            out.emplace_back("horizon: must be positive");

        std::set<std::uint32_t> ids;
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const auto &n = nodes[i];
            const std::string path = "nodes[" + std::to_string(i) + "]";
            if (!ids.insert(n.id.value).second)
                out.push_back(path + ".id: duplicate id " + std::to_string(n.id.value));
            if (n.delay.slots < 0)
                out.push_back(path + ".delay_slots: must be nonnegative");

            if (const auto *t = std::get_if<TdmaRole>(&n.role))
            {
                const auto &s = t->schedule;
                if (s.frame_length <= 0)
                    out.push_back(path + ".role.tdma.frame_length: must be positive");
                std::set<Slot> seen;
                for (std::size_t k = 0; k < s.assigned.size(); ++k)
                {
                    const Slot off = s.assigned[k];
                    const std::string apath = path + ".role.tdma.assigned[" + std::to_string(k) + "]";
                    if (off < 0 || (s.frame_length > 0 && off >= s.frame_length))
                        out.push_back(apath + ": offset must lie in [0, frame_length)");
                    if (!seen.insert(off).second)
                        out.push_back(apath + ": duplicate offset");
                }
            }
            else if (const auto *a = std::get_if<AlohaRole>(&n.role))
            {
                const double q = a->params.q;
                if (!(q >= 0.0 && q <= 1.0))
                    out.push_back(path + ".role.aloha.q: must lie in [0, 1]");
            }
        }

        if (!nodes.empty())
        {
            std::size_t k = 0;
            for (auto id : ids)
            {
                if (id != k)
                {
                    out.emplace_back("nodes: ids must be dense 0..K-1");
                    break;
                }
                ++k;
            }
        }

        if (warmup && *warmup < max_delay())
            out.push_back("warmup: must be >= max node delay (" + std::to_string(max_delay()) + ")");

        const auto members = gateway_members();
        std::size_t standalone = 0;
        for (const auto &n : nodes)
            if (const auto *ma = std::get_if<ModelAwareRole>(&n.role); ma && !ma->gateway_member)
                ++standalone;
        if (standalone + (members.empty() ? 0 : 1) > 1)
            out.emplace_back("nodes: at most one model-aware decision stream is supported "
                             "(either gateway members or a single standalone model-aware node)");

        if (members.size() > 1)
        {
            const Delay d = node(members.front()).delay;
            for (auto m : members)
                if (node(m).delay != d)
                {
                    out.emplace_back("nodes: gateway members must share one delay (strict mode)");
                    break;
                }
        }

        return out;
    }

    void Scenario::validate() const
    {
        auto v = violations();
        if (!v.empty())
            throw ValidationError(std::move(v));
    }

    SlotOutcome SlotOutcome::collision(std::vector<NodeId> nodes)
    {
        if (nodes.size() < 2)
            throw ContractViolation("a collision needs at least two arrivals");
        std::sort(nodes.begin(), nodes.end());
        return SlotOutcome{Kind::Collision, std::move(nodes)};
    }

    void ArrivalLedger::register_transmission(NodeId node, Slot send_slot, Delay delay)
    {
        if (send_slot < 0)
            throw ContractViolation("send slot must be nonnegative");
        if (delay.slots < 0)
            throw ContractViolation("delay must be nonnegative");

        auto [it, inserted] = node_delays_.emplace(node, delay);
        if (!inserted && it->second != delay)
            throw ContractViolation("node " + std::to_string(node.value) + " registered with a different delay");

        const Slot arrival = send_slot + delay.slots;
        if (arrival < floor_)
            throw ContractViolation("arrival slot " + std::to_string(arrival) + " already released");

        auto &slot = slots_[arrival];
        if (std::find(slot.begin(), slot.end(), node) != slot.end())
            throw ContractViolation("duplicate transmission for node " + std::to_string(node.value) +
                                    " at send slot " + std::to_string(send_slot));
        slot.insert(std::upper_bound(slot.begin(), slot.end(), node), node);
    }

    std::vector<NodeId> ArrivalLedger::arrivals(Slot ap_slot) const
    {
        auto it = slots_.find(ap_slot);
        return it == slots_.end() ? std::vector<NodeId>{} : it->second;
    }

    void ArrivalLedger::release_before(Slot ap_slot)
    {
        slots_.erase(slots_.begin(), slots_.lower_bound(ap_slot));
        floor_ = std::max(floor_, ap_slot);
    }

    ArrivalLedger register_transmission(ArrivalLedger ledger, NodeId node, Slot send_slot, Delay delay)
    {
        ledger.register_transmission(node, send_slot, delay);
        return ledger;
    }

    SlotOutcome resolve_arrivals(std::vector<NodeId> arrivals)
    {
        switch (arrivals.size())
        {
        case 0:
            return SlotOutcome::idle();
        case 1:
            return SlotOutcome::success(arrivals.front());
        default:
            return SlotOutcome::collision(std::move(arrivals));
        }
    }

    SlotOutcome resolve_slot(const ArrivalLedger &ledger, Slot ap_slot)
    {
        return resolve_arrivals(ledger.arrivals(ap_slot));
    }

    Delay delay_from_distance(double distance_m, double sound_speed_mps, double slot_duration_s)
    {
        std::vector<std::string> bad;
        if (!(distance_m > 0.0))
            bad.emplace_back("distance_m: must be positive");
        if (!(sound_speed_mps > 0.0))
            bad.emplace_back("sound_speed_mps: must be positive");
        if (!(slot_duration_s > 0.0))
            bad.emplace_back("slot_duration_s: must be positive");
        if (!bad.empty())
            throw ValidationError(std::move(bad));

        const double slots = distance_m / (sound_speed_mps * slot_duration_s);
        // absorb rounding noise on exact quotients before taking the ceiling
        const double snapped = slots * (1.0 - 1e-12);
        return Delay{static_cast<Slot>(std::ceil(snapped))};
    }
}
