#include "pssf/projector/physics.hpp"

#include <algorithm>
#include <cmath>

namespace pssf {

double EnergySpectrum::max_energy() const {
    double e = 0.0;
    for (const auto& b : bins) e = std::max(e, b.energy_kev);
    return e;
}

void EnergySpectrum::validate() const {
    if (bins.empty()) throw Error::config("spectrum has no bins");
    double sum = 0.0;
    for (const auto& b : bins) {
        if (b.energy_kev <= 0.0) throw Error::config("spectrum bin with nonpositive energy");
        if (b.weight <= 0.0) throw Error::config("spectrum bin with nonpositive weight");
        sum += b.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error::config("spectrum weights do not sum to 1");
}

AttenuationTable::AttenuationTable(std::vector<double> energies_kev, std::vector<double> mu_cortical,
                                   std::vector<double> mu_trabecular, std::vector<double> mu_soft)
    : energies_(std::move(energies_kev)),
      cortical_(std::move(mu_cortical)),
      trabecular_(std::move(mu_trabecular)),
      soft_(std::move(mu_soft)) {
    validate();
}

void AttenuationTable::validate() const {
    if (energies_.size() < 2) throw Error::config("attenuation table needs >= 2 energies");
    if (cortical_.size() != energies_.size() || trabecular_.size() != energies_.size() ||
        soft_.size() != energies_.size()) {
        throw Error::config("attenuation table column lengths differ");
    }
    for (std::size_t i = 0; i < energies_.size(); ++i) {
        if (i > 0 && energies_[i] <= energies_[i - 1]) {
            throw Error::config("attenuation energies must be strictly increasing");
        }
        for (const auto* col : {&cortical_, &trabecular_, &soft_}) {
            if ((*col)[i] <= 0.0) throw Error::config("attenuation coefficient must be positive");
            if (i > 0 && (*col)[i] > (*col)[i - 1] + 1e-15) {
                throw Error::config("attenuation must be non-increasing in energy");
            }
        }
        if (!(cortical_[i] > trabecular_[i] && trabecular_[i] > soft_[i])) {
            throw Error::config("attenuation ordering cortical > trabecular > soft violated");
        }
    }
}

double AttenuationTable::interp(const std::vector<double>& mu, double energy_kev) const {
    if (energy_kev < energies_.front() - 1e-9 || energy_kev > energies_.back() + 1e-9) {
        throw Error::config("energy " + std::to_string(energy_kev) +
                            " keV outside attenuation table range");
    }
    energy_kev = std::clamp(energy_kev, energies_.front(), energies_.back());
    const auto it = std::upper_bound(energies_.begin(), energies_.end(), energy_kev);
    std::size_t hi = std::min<std::size_t>(it - energies_.begin(), energies_.size() - 1);
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double f = (energy_kev - energies_[lo]) / (energies_[hi] - energies_[lo]);
    return std::exp((1.0 - f) * std::log(mu[lo]) + f * std::log(mu[hi]));
}

double AttenuationTable::mu(const std::string& material, double energy_kev) const {
    if (material == "cortical_bone") return mu_cortical(energy_kev);
    if (material == "trabecular_bone") return mu_trabecular(energy_kev);
    if (material == "soft_tissue") return mu_soft(energy_kev);
    throw Error::config("unknown material: " + material);
}

EnergySpectrum spectrum_from_json(const Json& j) {
    EnergySpectrum s;
    for (const auto& bin : j.at("bins")) {
        s.bins.push_back({bin.at("energy_kev").get<double>(), bin.at("weight").get<double>()});
    }
    double sum = 0.0;
    for (const auto& b : s.bins) sum += b.weight;
    if (sum <= 0.0) throw Error::config("spectrum weights sum to zero");
    for (auto& b : s.bins) b.weight /= sum;
    s.validate();
    return s;
}

AttenuationTable attenuation_from_json(const Json& j) {
    const auto energies = j.at("energies_kev").get<std::vector<double>>();
    const auto& mu = j.at("mu_per_mm");
    return AttenuationTable(energies, mu.at("cortical_bone").get<std::vector<double>>(),
                            mu.at("trabecular_bone").get<std::vector<double>>(),
                            mu.at("soft_tissue").get<std::vector<double>>());
}

}  // namespace pssf
