// Regenerates the committed ROI matching templates (one per resolution
// profile) from the clean grade-0 reference rendering. Run after changing
// the phantom geometry or the physics tables:
//   make_template configs/physics.json configs
#include "pssf/cli/config.hpp"
#include "pssf/core/image_io.hpp"
#include "pssf/radiomics/roi.hpp"

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: make_template <physics.json> <out_dir>" << std::endl;
        return 2;
    }
    try {
        const pssf::Json physics = pssf::read_json_file(argv[1]);
        const pssf::EnergySpectrum spectrum =
            pssf::spectrum_from_json(physics.at("spectra").at("kvp70"));
        const pssf::AttenuationTable atten =
            pssf::attenuation_from_json(physics.at("attenuation"));

        for (const std::string& name : {"desk", "full"}) {
            const pssf::ResolutionProfile profile = pssf::profile_by_name(name);
            const pssf::AcquisitionProtocol reference = pssf::default_protocols(profile)[0];
            const pssf::RasterU16 templ =
                pssf::make_joint_template(reference, spectrum, atten, profile.template_px);
            const std::filesystem::path path =
                std::filesystem::path(argv[2]) / ("template_" + name + ".png");
            pssf::write_png16(path.string(), templ);
            std::cout << "wrote " << path.string() << " (" << profile.template_px << "x"
                      << profile.template_px << ")" << std::endl;
        }
    } catch (const std::exception& e) {
        std::cerr << "make_template: " << e.what() << std::endl;
        return 3;
    }
    return 0;
}
