#pragma once

#include "pssf/core/json_io.hpp"
#include "pssf/core/types.hpp"

#include <string>
#include <vector>

namespace pssf {

struct SpectrumBin {
    double energy_kev = 0.0;
    double weight = 0.0;
};

// Discrete polyenergetic spectrum; weights are normalized on load.
struct EnergySpectrum {
    std::vector<SpectrumBin> bins;

    double max_energy() const;
    void validate() const;  // nonempty, positive energies/weights, sum 1
};

// Linear attenuation coefficients in 1/mm, tabulated on a shared energy
// grid for the three materials; lookups interpolate log-linearly in energy.
class AttenuationTable {
public:
    AttenuationTable() = default;
    AttenuationTable(std::vector<double> energies_kev, std::vector<double> mu_cortical,
                     std::vector<double> mu_trabecular, std::vector<double> mu_soft);

    double mu(const std::string& material, double energy_kev) const;
    double mu_cortical(double energy_kev) const { return interp(cortical_, energy_kev); }
    double mu_trabecular(double energy_kev) const { return interp(trabecular_, energy_kev); }
    double mu_soft(double energy_kev) const { return interp(soft_, energy_kev); }

    double min_energy() const { return energies_.front(); }
    double max_energy() const { return energies_.back(); }

    // non-increasing in energy per material; cortical > trabecular > soft
    void validate() const;

private:
    double interp(const std::vector<double>& mu, double energy_kev) const;

    std::vector<double> energies_;
    std::vector<double> cortical_, trabecular_, soft_;
};

EnergySpectrum spectrum_from_json(const Json& j);
AttenuationTable attenuation_from_json(const Json& j);

}  // namespace pssf
