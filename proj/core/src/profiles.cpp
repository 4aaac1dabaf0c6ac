#include "nimbus/profiles.hpp"

namespace nimbus {

SensorProfile landsat89_profile() {
    SensorProfile p;
    p.name = "landsat89";
    p.bands = {{"coastal", 0.4500}, {"blue", 0.4626}, {"green", 0.5613},
               {"red", 0.6546},     {"nir", 0.8650}};
    p.reference_wavelength = 1.375;
    p.max_parallax_offset = 2;
    return p;
}

SensorProfile sentinel2_profile() {
    SensorProfile p;
    p.name = "sentinel2";
    p.bands = {{"coastal", 0.4430}, {"blue", 0.4900}, {"green", 0.5600},
               {"red", 0.6650},     {"nir", 0.8420}};
    p.reference_wavelength = 1.375;
    p.max_parallax_offset = 5;
    return p;
}

SensorProfile gaofen2_profile() {
    SensorProfile p;
    p.name = "gaofen2";
    p.bands = {{"blue", 0.4850}, {"green", 0.5550}, {"red", 0.6600}, {"nir", 0.8330}};
    p.reference_wavelength = 1.375;
    p.max_parallax_offset = 0;
    return p;
}

std::vector<SensorProfile> builtin_profiles() {
    return {landsat89_profile(), sentinel2_profile(), gaofen2_profile()};
}

std::optional<SensorProfile> find_profile(const std::string& name,
                                          const std::vector<SensorProfile>& extra) {
    for (const auto& p : extra)
        if (p.name == name)
            return p;
    for (const auto& p : builtin_profiles())
        if (p.name == name)
            return p;
    return std::nullopt;
}

} // namespace nimbus
