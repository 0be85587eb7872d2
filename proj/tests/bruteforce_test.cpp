#include "doctest.h"

#include "support.hpp"
#include "uwmac/bruteforce.hpp"
#include "uwmac/oracle.hpp"
#include "uwmac/policies.hpp"

#include <random>

using namespace uwmac;
using namespace uwmac::test;

namespace
{
    constexpr Action T = Action::Transmit;
    constexpr Action W = Action::Wait;

    // Joint enumeration over every ALOHA Bernoulli in every measured slot, replaying
    // the channel slot by slot. Exponential in N * H; test sizes only.
    double joint_expectation(const ActionSequence &seq, const Scenario &s)
    {
        const Slot first = s.effective_warmup();
        std::vector<const NodeSpec *> al;
        for (const auto &n : s.nodes)
            if (n.is_aloha())
                al.push_back(&n);

        const std::size_t h = seq.size();
        const std::size_t bits = al.size() * h;
        long double total = 0.0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask)
        {
            long double prob = 1.0;
            for (std::size_t b = 0; b < bits; ++b)
            {
                const double q = std::get<AlohaRole>(al[b % al.size()]->role).params.q;
                prob *= (mask >> b) & 1u ? q : 1.0 - q;
            }
            if (prob == 0.0)
                continue;
            int successes = 0;
            for (std::size_t k = 0; k < h; ++k)
            {
                const Slot ap = first + static_cast<Slot>(k);
                int arrivals = 0;
                for (std::size_t i = 0; i < al.size(); ++i)
                    arrivals += (mask >> (k * al.size() + i)) & 1u;
                for (const auto &n : s.nodes)
                    if (const auto *t = std::get_if<TdmaRole>(&n.role))
                    {
                        const Slot send = ap - n.delay.slots;
                        arrivals += send >= 0 && tdma_decide(t->schedule, send) == Action::Transmit;
                    }
                // seq[k] is sent at ap - D_ma
                arrivals += seq[k] == Action::Transmit;
                successes += arrivals == 1;
            }
            total += prob * successes;
        }
        return static_cast<double>(total / static_cast<long double>(h));
    }
}

TEST_CASE("exact_expected_throughput examples")
{
    const auto tdma_case = make_scenario({model_aware(0, 1), tdma(1, 4, 5, {0})}, 10);
    CHECK(exact_expected_throughput(ActionSequence(10, T), tdma_case) < 1.0);
    // two of ten measured slots carry a TDMA arrival
    CHECK(exact_expected_throughput(ActionSequence(10, T), tdma_case) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(exact_expected_throughput(policy_sequence(tdma_case, 10), tdma_case) == 1.0);

    const auto aloha_case = make_scenario({model_aware(0, 0), aloha(1, 2, 0.3)}, 8);
    CHECK(std::abs(exact_expected_throughput(ActionSequence(8, W), aloha_case) - 0.3) < 1e-15);

    CHECK_THROWS_AS(exact_expected_throughput(ActionSequence(21, W), aloha_case), RefusalError);
    CHECK_THROWS_AS(exact_expected_throughput(ActionSequence(4, W), make_scenario({aloha(0, 0, 0.3)}, 4)),
                    ContractViolation);
}

TEST_CASE("enumerate_optimal examples")
{
    auto r = enumerate_optimal(make_scenario({model_aware(0, 0), aloha(1, 0, 0.3)}, 1), 1);
    CHECK(r.best == ActionSequence{T});
    CHECK(std::abs(r.value - 0.7) < 1e-15);

    r = enumerate_optimal(make_scenario({model_aware(0, 0), aloha(1, 0, 0.8)}, 2), 2);
    CHECK(r.best == ActionSequence{W, W});
    CHECK(std::abs(r.value - 0.8) < 1e-15);

    r = enumerate_optimal(make_scenario({tdma(0, 0, 2, {0}), model_aware(1, 0)}, 4), 4);
    CHECK(r.best == ActionSequence{W, T, W, T});
    CHECK(r.value == 1.0);

    // ties at q = 0.5 go to all-Transmit
    r = enumerate_optimal(make_scenario({model_aware(0, 0), aloha(1, 0, 0.5)}, 3), 3);
    CHECK(r.best == ActionSequence{T, T, T});

    CHECK_THROWS_AS(enumerate_optimal(make_scenario({model_aware(0, 0)}, 17), 17), RefusalError);
}

TEST_CASE("per-slot decomposition equals joint enumeration")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial)
    {
        const std::size_t n = 1 + rng() % 3;
        const std::size_t h = 1 + rng() % 6;
        std::vector<NodeSpec> nodes{model_aware(0, static_cast<Slot>(rng() % 4))};
        if (rng() % 2)
            nodes.push_back(tdma(1, static_cast<Slot>(rng() % 4), 3, {static_cast<Slot>(rng() % 3)}));
        for (std::size_t i = 0; i < n; ++i)
            nodes.push_back(aloha(static_cast<std::uint32_t>(nodes.size()), static_cast<Slot>(rng() % 4), u(rng)));
        const auto s = make_scenario(nodes, static_cast<Slot>(h));

        ActionSequence seq;
        for (std::size_t k = 0; k < h; ++k)
            seq.push_back(rng() % 2 ? T : W);
        CHECK(std::abs(exact_expected_throughput(seq, s) - joint_expectation(seq, s)) <= 1e-12);
    }

    // the largest size the decomposition is certified at: N = 4, H = 6
    const auto big = make_scenario(
        {model_aware(0, 1), tdma(1, 2, 3, {0}), aloha(2, 0, 0.15), aloha(3, 3, 0.4), aloha(4, 1, 0.25), aloha(5, 2, 0.6)},
        6);
    const ActionSequence seq{T, W, T, T, W, T};
    CHECK(std::abs(exact_expected_throughput(seq, big) - joint_expectation(seq, big)) <= 1e-12);
}

TEST_CASE("flipping Transmit to Wait never helps when z >= 0")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int trial = 0; trial < 100; ++trial)
    {
        std::vector<NodeSpec> nodes{model_aware(0, 1)};
        std::vector<double> q;
        const std::size_t n = 1 + rng() % 3;
        for (std::size_t i = 0; i < n; ++i)
        {
            q.push_back(u(rng) / static_cast<double>(n));
            nodes.push_back(aloha(static_cast<std::uint32_t>(i + 1), static_cast<Slot>(rng() % 3), q.back()));
        }
        REQUIRE(z_value(q) >= 0.0);
        const auto s = make_scenario(nodes, 8);
        ActionSequence seq;
        for (int k = 0; k < 8; ++k)
            seq.push_back(rng() % 2 ? T : W);
        const double before = exact_expected_throughput(seq, s);
        for (std::size_t k = 0; k < seq.size(); ++k)
            if (seq[k] == T)
            {
                auto flipped = seq;
                flipped[k] = W;
                CHECK(exact_expected_throughput(flipped, s) <= before + 1e-15);
            }
    }
}

TEST_CASE("certificates match for policy-driven sequences")
{
    const std::vector<Scenario> cases{
        make_scenario({model_aware(0, 1), tdma(1, 4, 5, {0})}, 12),
        make_scenario({model_aware(0, 0), aloha(1, 2, 0.3)}, 12),
        make_scenario({model_aware(0, 0), aloha(1, 2, 0.7)}, 12),
        make_scenario({model_aware(0, 2), tdma(1, 1, 5, {0}), aloha(2, 0, 0.6)}, 10),
        make_scenario({model_aware(0, 2, true), model_aware(1, 2, true), tdma(2, 0, 3, {1}), aloha(3, 1, 0.2)}, 9),
    };
    for (const auto &s : cases)
    {
        const auto cert = certify(s, static_cast<std::size_t>(s.horizon));
        CHECK(cert.match);
        REQUIRE(cert.oracle);
        CHECK(std::abs(cert.enumerated.value - cert.policy_value) <= 1e-12);
        CHECK(std::abs(cert.enumerated.value - cert.oracle->optimal_throughput) <= 1e-12);
    }

    // negative control
    const auto &s = cases.front();
    auto bad = policy_sequence(s, 12);
    const auto it = std::find(bad.begin(), bad.end(), W);
    REQUIRE(it != bad.end());
    *it = T;
    CHECK_FALSE(certify(s, 12, 1e-12, bad).match);
}
