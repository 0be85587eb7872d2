#pragma once

// Scenario builders and brute-force reference computations shared by the tests.
// Everything here works from first principles (outcome enumeration, direct slot
// arithmetic) and never calls the oracle or bruteforce modules.

#include "uwmac/core.hpp"

#include <cstdint>
#include <vector>

namespace uwmac::test
{
    inline NodeSpec model_aware(std::uint32_t id, Slot delay, bool member = false)
    {
        return NodeSpec{NodeId{id}, Delay{delay}, ModelAwareRole{member}};
    }

    inline NodeSpec tdma(std::uint32_t id, Slot delay, Slot frame, std::vector<Slot> assigned)
    {
        return NodeSpec{NodeId{id}, Delay{delay}, TdmaRole{TdmaSchedule{frame, std::move(assigned)}}};
    }

    inline NodeSpec aloha(std::uint32_t id, Slot delay, double q)
    {
        return NodeSpec{NodeId{id}, Delay{delay}, AlohaRole{AlohaParams{q}}};
    }

    inline Scenario make_scenario(std::vector<NodeSpec> nodes, Slot horizon, std::uint64_t seed = 1)
    {
        Scenario s;
        s.nodes = std::move(nodes);
        s.horizon = horizon;
        s.seed = seed;
        return s;
    }

    /// Visits every ALOHA outcome vector with its probability.
    template <class Fn>
    void for_each_outcome(const std::vector<double> &q, Fn &&fn)
    {
        const std::uint64_t n = std::uint64_t{1} << q.size();
        for (std::uint64_t mask = 0; mask < n; ++mask)
        {
            double prob = 1.0;
            int senders = 0;
            for (std::size_t i = 0; i < q.size(); ++i)
            {
                const bool s = (mask >> i) & 1u;
                prob *= s ? q[i] : 1.0 - q[i];
                senders += s;
            }
            fn(mask, senders, prob);
        }
    }

    inline double brute_exactly_one(const std::vector<double> &q)
    {
        double p = 0.0;
        for_each_outcome(q, [&](std::uint64_t, int senders, double prob) { p += senders == 1 ? prob : 0.0; });
        return p;
    }

    inline double brute_none(const std::vector<double> &q)
    {
        double p = 0.0;
        for_each_outcome(q, [&](std::uint64_t, int senders, double prob) { p += senders == 0 ? prob : 0.0; });
        return p;
    }

    /// Success probability of one AP slot where the model-aware node transmits with
    /// probability b, averaged over the b coin and the ALOHA outcomes.
    inline double brute_slot(double b, const std::vector<double> &q)
    {
        double p = 0.0;
        for (int ma = 0; ma <= 1; ++ma)
        {
            const double pm = ma ? b : 1.0 - b;
            for_each_outcome(q, [&](std::uint64_t, int senders, double prob) {
                p += (senders + ma == 1) ? pm * prob : 0.0;
            });
        }
        return p;
    }

    /// Slot mix: a fraction p of slots carries a TDMA arrival (model-aware silent there).
    inline double brute_mixed(double b, double p, const std::vector<double> &q)
    {
        double tdma_slot = 0.0;
        for_each_outcome(q, [&](std::uint64_t, int senders, double prob) { tdma_slot += senders == 0 ? prob : 0.0; });
        return p * tdma_slot + (1.0 - p) * brute_slot(b, q);
    }
}
