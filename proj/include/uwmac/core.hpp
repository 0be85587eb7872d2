#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace uwmac
{
    /// Slot index. Send slots and AP slots share one time axis.
    using Slot = std::int64_t;

    /// Thrown when a caller breaks an operation's precondition.
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    /// Thrown for invalid user input; carries every violation found.
    class ValidationError : public std::runtime_error
    {
    public:
        explicit ValidationError(std::vector<std::string> violations);

        const std::vector<std::string> &violations() const noexcept { return violations_; }

    private:
        std::vector<std::string> violations_;
    };

    struct NodeId
    {
        std::uint32_t value = 0;

        friend auto operator<=>(NodeId, NodeId) = default;
    };

    /// Propagation delay to the AP in whole slots.
    struct Delay
    {
        Slot slots = 0;

        friend auto operator<=>(Delay, Delay) = default;
    };

    enum class Action
    {
        Wait,
        Transmit,
    };

    const char *to_string(Action a) noexcept;

    /// Deterministic periodic frame: transmit when (t mod frame_length) is assigned.
    struct TdmaSchedule
    {
        Slot frame_length = 1;
        std::vector<Slot> assigned;

        /// Fraction of frame slots used.
        double ratio() const noexcept;
    };

    struct AlohaParams
    {
        double q = 0.0;
    };

    struct TdmaRole
    {
        TdmaSchedule schedule;
    };

    struct AlohaRole
    {
        AlohaParams params;
    };

    struct ModelAwareRole
    {
        bool gateway_member = false;
    };

    using Role = std::variant<TdmaRole, AlohaRole, ModelAwareRole>;

    struct NodeSpec
    {
        NodeId id;
        Delay delay;
        Role role;

        bool is_tdma() const noexcept { return std::holds_alternative<TdmaRole>(role); }
        bool is_aloha() const noexcept { return std::holds_alternative<AlohaRole>(role); }
        bool is_model_aware() const noexcept { return std::holds_alternative<ModelAwareRole>(role); }
    };

    struct Scenario
    {
        std::string id = "scenario";
        std::vector<NodeSpec> nodes;
        Slot horizon = 1;
        /// Defaults to the maximum node delay when unset.
        std::optional<Slot> warmup;
        std::uint64_t seed = 0;

        Slot max_delay() const noexcept;
        Slot min_delay() const noexcept;
        Slot effective_warmup() const noexcept { return warmup.value_or(max_delay()); }

        std::size_t tdma_count() const noexcept;
        std::size_t aloha_count() const noexcept;
        std::size_t model_aware_count() const noexcept;

        const NodeSpec &node(NodeId id) const;

        /// ALOHA probabilities in node-id order.
        std::vector<double> aloha_probabilities() const;

        /// Model-aware ids forming the round-robin roster, ascending.
        std::vector<NodeId> gateway_members() const;

        /// The node whose policy drives model-aware decisions: the lowest-id roster
        /// member, or the single standalone model-aware node.
        std::optional<NodeId> decision_node() const;

        /// Every violation of the scenario invariants; empty when valid.
        std::vector<std::string> violations() const;

        /// Throws ValidationError when violations() is nonempty.
        void validate() const;
    };

    class SlotOutcome
    {
    public:
        enum class Kind
        {
            Idle,
            Success,
            Collision,
        };

        static SlotOutcome idle() { return SlotOutcome{Kind::Idle, {}}; }
        static SlotOutcome success(NodeId node) { return SlotOutcome{Kind::Success, {node}}; }
        static SlotOutcome collision(std::vector<NodeId> nodes);

        Kind kind() const noexcept { return kind_; }
        bool is_idle() const noexcept { return kind_ == Kind::Idle; }
        bool is_success() const noexcept { return kind_ == Kind::Success; }
        bool is_collision() const noexcept { return kind_ == Kind::Collision; }

        /// Arrivals in ascending id order; one entry for Success, two or more for Collision.
        const std::vector<NodeId> &nodes() const noexcept { return nodes_; }

        friend bool operator==(const SlotOutcome &, const SlotOutcome &) = default;

    private:
        SlotOutcome(Kind kind, std::vector<NodeId> nodes) : kind_(kind), nodes_(std::move(nodes)) {}

        Kind kind_;
        std::vector<NodeId> nodes_;
    };

    /// Arrivals at the AP keyed by AP slot.
    class ArrivalLedger
    {
    public:
        /// Records that `node` sent at `send_slot`; the packet lands at send_slot + delay.
        /// Throws ContractViolation on a negative send slot, a repeated (node, send_slot),
        /// a delay differing from the node's earlier registrations, or an arrival into a
        /// slot already released.
        void register_transmission(NodeId node, Slot send_slot, Delay delay);

        /// Arrivals at `ap_slot`, ascending by id.
        std::vector<NodeId> arrivals(Slot ap_slot) const;

        /// Drops every AP slot < `ap_slot`; later registrations into them are rejected.
        void release_before(Slot ap_slot);

        std::size_t pending_slots() const noexcept { return slots_.size(); }

    private:
        std::map<Slot, std::vector<NodeId>> slots_;
        std::map<NodeId, Delay> node_delays_;
        Slot floor_ = 0;
    };

    /// Free-function form: returns the updated ledger.
    ArrivalLedger register_transmission(ArrivalLedger ledger, NodeId node, Slot send_slot, Delay delay);

    SlotOutcome resolve_slot(const ArrivalLedger &ledger, Slot ap_slot);

    /// Outcome for a known arrival set (order irrelevant).
    SlotOutcome resolve_arrivals(std::vector<NodeId> arrivals);

    /// ceil(distance / (sound_speed * slot_duration)); every argument must be positive.
    Delay delay_from_distance(double distance_m, double sound_speed_mps, double slot_duration_s);
}
