#include "revmax/campaign.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace revmax {

AdCampaign::AdCampaign(AdId id, std::vector<double> gamma, double cpe, double budget)
    : id(id), gamma(std::move(gamma)), cpe(cpe), budget(budget) {
    validate();
}

void AdCampaign::validate() const {
    if (gamma.empty()) {
        throw std::invalid_argument("campaign " + std::to_string(id) + ": empty topic distribution");
    }
    double sum = 0.0;
    for (double g : gamma) {
        if (g < 0.0) {
            throw std::invalid_argument("campaign " + std::to_string(id) +
                                        ": negative topic weight " + std::to_string(g));
        }
        sum += g;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("campaign " + std::to_string(id) +
                                    ": topic distribution sums to " + std::to_string(sum));
    }
    if (!(cpe > 0.0)) {
        throw std::invalid_argument("campaign " + std::to_string(id) + ": cpe must be positive");
    }
    if (!(budget > 0.0)) {
        throw std::invalid_argument("campaign " + std::to_string(id) + ": budget must be positive");
    }
}

} // namespace revmax
