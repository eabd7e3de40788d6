#include "microswim/robot.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "microswim/errors.hpp"

namespace microswim {

double RobotDesign::total_length() const {
    return std::accumulate(segment_lengths.begin(), segment_lengths.end(), 0.0);
}

double RobotDesign::total_mass() const {
    return std::accumulate(segment_masses.begin(), segment_masses.end(), 0.0);
}

namespace {

struct CatalogEntry {
    std::size_t dof;
    double length;  // m
    double mass;    // kg
};

constexpr CatalogEntry kCatalog[] = {
    {2, 0.117, 0.039},
    {4, 0.170, 0.059},
    {6, 0.224, 0.078},
};

}  // namespace

RobotDesign standard_design(std::size_t dof, bool with_fin, const StandardShares& shares) {
    const CatalogEntry* entry = nullptr;
    for (const auto& e : kCatalog)
        if (e.dof == dof) entry = &e;
    if (!entry)
        throw DataError("standard_design: no catalog entry for dof=" + std::to_string(dof) +
                        "; construct a custom RobotDesign instead");

    RobotDesign d;
    d.dof = dof;
    d.name = "ubot" + std::to_string(dof) + (with_fin ? "" : "_nofin");

    // Build the with-fin proportions, then drop the fin link if requested so
    // that the finless variant is exactly "fin removed".
    const double body_share = (1.0 - shares.head - shares.fin) / static_cast<double>(dof);
    d.segment_lengths.push_back(shares.head * entry->length);
    for (std::size_t k = 0; k < dof; ++k) d.segment_lengths.push_back(body_share * entry->length);
    d.segment_lengths.push_back(shares.fin * entry->length);
    // Uniform linear density: mass shares equal length shares.
    for (double l : d.segment_lengths) d.segment_masses.push_back(entry->mass * l / entry->length);

    d.has_caudal_fin = with_fin;
    if (!with_fin) {
        d.segment_lengths.pop_back();
        d.segment_masses.pop_back();
    }
    return d;
}

RobotDesign design_by_name(const std::string& name) {
    if (name == "ubot2") return standard_design(2, true);
    if (name == "ubot4") return standard_design(4, true);
    if (name == "ubot6") return standard_design(6, true);
    if (name == "ubot2_nofin") return standard_design(2, false);
    if (name == "ubot4_nofin") return standard_design(4, false);
    if (name == "ubot6_nofin") return standard_design(6, false);
    throw DataError("unknown design name '" + name +
                    "' (expected ubot{2,4,6} or ubot{2,4,6}_nofin)");
}

std::vector<std::string> validate_design(const RobotDesign& d) {
    std::vector<std::string> bad;
    if (d.dof < 1) bad.push_back("dof >= 1");
    const std::size_t expected_links = d.dof + (d.has_caudal_fin ? 2 : 1);
    if (d.segment_lengths.size() != expected_links)
        bad.push_back("segment_lengths.size() == dof + " + std::string(d.has_caudal_fin ? "2" : "1"));
    if (d.segment_masses.size() != d.segment_lengths.size())
        bad.push_back("segment_masses.size() == segment_lengths.size()");
    for (std::size_t k = 0; k < d.segment_lengths.size(); ++k)
        if (!(d.segment_lengths[k] > 0.0))
            bad.push_back("segment_lengths[" + std::to_string(k) + "] > 0");
    for (std::size_t k = 0; k < d.segment_masses.size(); ++k)
        if (!(d.segment_masses[k] > 0.0))
            bad.push_back("segment_masses[" + std::to_string(k) + "] > 0");
    if (!(d.width > 0.0)) bad.push_back("width > 0");
    if (!(d.depth > 0.0)) bad.push_back("depth > 0");
    if (d.joint_passive_stiffness < 0.0) bad.push_back("joint_passive_stiffness >= 0");
    if (d.joint_passive_damping < 0.0) bad.push_back("joint_passive_damping >= 0");
    if (d.motor_gain < 0.0) bad.push_back("motor_gain >= 0");
    if (d.motor_damping < 0.0) bad.push_back("motor_damping >= 0");
    if (!(d.torque_limit > 0.0)) bad.push_back("torque_limit > 0");
    if (!(d.hydro.fluid_density >= 0.0)) bad.push_back("hydro.fluid_density >= 0");
    if (d.hydro.normal_drag < 0.0) bad.push_back("hydro.normal_drag >= 0");
    if (d.hydro.tangential_drag < 0.0) bad.push_back("hydro.tangential_drag >= 0");
    if (d.hydro.added_mass_factor < 0.0) bad.push_back("hydro.added_mass_factor >= 0");
    if (d.hydro.tail_reactive_factor < 0.0) bad.push_back("hydro.tail_reactive_factor >= 0");
    if (d.hydro.normal_drag < d.hydro.tangential_drag)
        bad.push_back("hydro.normal_drag >= hydro.tangential_drag");
    return bad;
}

void to_json(nlohmann::json& j, const HydroCoeffs& h) {
    j = nlohmann::json{{"fluid_density", h.fluid_density},
                       {"normal_drag", h.normal_drag},
                       {"tangential_drag", h.tangential_drag},
                       {"added_mass_factor", h.added_mass_factor},
                       {"tail_reactive_factor", h.tail_reactive_factor}};
}

void from_json(const nlohmann::json& j, HydroCoeffs& h) {
    HydroCoeffs defaults;
    h.fluid_density = j.value("fluid_density", defaults.fluid_density);
    h.normal_drag = j.value("normal_drag", defaults.normal_drag);
    h.tangential_drag = j.value("tangential_drag", defaults.tangential_drag);
    h.added_mass_factor = j.value("added_mass_factor", defaults.added_mass_factor);
    h.tail_reactive_factor = j.value("tail_reactive_factor", defaults.tail_reactive_factor);
}

void to_json(nlohmann::json& j, const RobotDesign& d) {
    j = nlohmann::json{{"name", d.name},
                       {"dof", d.dof},
                       {"segment_lengths", d.segment_lengths},
                       {"segment_masses", d.segment_masses},
                       {"width", d.width},
                       {"depth", d.depth},
                       {"joint_passive_stiffness", d.joint_passive_stiffness},
                       {"joint_passive_damping", d.joint_passive_damping},
                       {"motor_gain", d.motor_gain},
                       {"motor_damping", d.motor_damping},
                       {"torque_limit", d.torque_limit},
                       {"hydro", d.hydro},
                       {"has_caudal_fin", d.has_caudal_fin}};
}

void from_json(const nlohmann::json& j, RobotDesign& d) {
    RobotDesign defaults;
    d.name = j.value("name", std::string{});
    d.dof = j.value("dof", defaults.dof);
    d.segment_lengths = j.value("segment_lengths", std::vector<double>{});
    d.segment_masses = j.value("segment_masses", std::vector<double>{});
    d.width = j.value("width", defaults.width);
    d.depth = j.value("depth", defaults.depth);
    d.joint_passive_stiffness = j.value("joint_passive_stiffness", defaults.joint_passive_stiffness);
    d.joint_passive_damping = j.value("joint_passive_damping", defaults.joint_passive_damping);
    d.motor_gain = j.value("motor_gain", defaults.motor_gain);
    d.motor_damping = j.value("motor_damping", defaults.motor_damping);
    d.torque_limit = j.value("torque_limit", defaults.torque_limit);
    if (j.contains("hydro")) j.at("hydro").get_to(d.hydro);
    d.has_caudal_fin = j.value("has_caudal_fin", defaults.has_caudal_fin);
}

}  // namespace microswim
