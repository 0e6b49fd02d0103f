#pragma once

#include <vector>

#include "revmax/types.hpp"

namespace revmax {

/// One advertiser: topic distribution, cost per engagement, budget.
struct AdCampaign {
    AdId id = 0;
    std::vector<double> gamma; // topic distribution, sums to 1
    double cpe = 1.0;          // currency per engagement, > 0
    double budget = 0.0;       // currency, > 0

    AdCampaign() = default;
    AdCampaign(AdId id, std::vector<double> gamma, double cpe, double budget);

    std::size_t topic_count() const noexcept { return gamma.size(); }

    /// Throws std::invalid_argument if the distribution does not sum to 1
    /// (tolerance 1e-9), has negative entries, or cpe/budget are not positive.
    void validate() const;
};

} // namespace revmax
