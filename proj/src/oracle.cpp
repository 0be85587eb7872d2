#include "uwmac/oracle.hpp"

#include "uwmac/policies.hpp"

namespace uwmac
{
    const char *to_string(Branch b) noexcept
    {
        return b == Branch::Transmit ? "TransmitBranch" : "SilentBranch";
    }

    double success_prob_exactly_one(std::span<const double> q)
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i)
        {
            double term = q[i];
            for (std::size_t j = 0; j < q.size(); ++j)
                if (j != i)
                    term *= 1.0 - q[j];
            sum += term;
        }
        return sum;
    }

    double all_silent_prob(std::span<const double> q)
    {
        double prod = 1.0;
        for (double qi : q)
            prod *= 1.0 - qi;
        return prod;
    }

    double expected_slot_throughput(double b, std::span<const double> q)
    {
        return b * all_silent_prob(q) + (1.0 - b) * success_prob_exactly_one(q);
    }

    double expected_mixed_throughput(double b, double p, std::span<const double> q)
    {
        return p * all_silent_prob(q) + (1.0 - p) * expected_slot_throughput(b, q);
    }

    OracleResult optimal_tdma_only()
    {
        return OracleResult{1.0, Branch::Transmit, 1.0};
    }

    OracleResult optimal_aloha(std::span<const double> q)
    {
        const double z = z_value(q);
        if (z < 0.0)
            return OracleResult{success_prob_exactly_one(q), Branch::Silent, z};
        return OracleResult{all_silent_prob(q), Branch::Transmit, z};
    }

    OracleResult optimal_mixed(double p, std::span<const double> q)
    {
        // dF/db = (1 - p) z; the nonnegative factor never flips the sign, and p = 1 makes
        // F flat in b, which lands on the transmit branch with the same value.
        double z = (1.0 - p) * z_value(q);
        if (z == 0.0)
            z = 0.0; // drop the sign of -0.0
        if (z < 0.0)
            return OracleResult{p * all_silent_prob(q) + (1.0 - p) * success_prob_exactly_one(q), Branch::Silent, z};
        return OracleResult{all_silent_prob(q), Branch::Transmit, z};
    }
}
