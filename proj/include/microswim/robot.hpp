#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace microswim {

/// Coefficients of the resistive-force fluid model.
struct HydroCoeffs {
    double fluid_density = 1000.0;   ///< kg/m^3
    double normal_drag = 2.0;        ///< C_n, drag normal to a link
    double tangential_drag = 0.1;    ///< C_t, skin-friction analog along a link
    double added_mass_factor = 1.0;  ///< scales rho*pi*w^2/4 per unit length
    /// Trailing-edge momentum-flux (suction) force factor; scales
    /// rho*pi*depth^2/4 at the posterior tip. 0 disables the term.
    double tail_reactive_factor = 1.0;

    bool operator==(const HydroCoeffs&) const = default;
};

/// Segmented swimmer morphology plus motor and fluid constants.
///
/// Links run head -> tail: one head link, `dof` body links, and optionally a
/// caudal-fin link. Every adjacent pair is connected by a hinge joint; the
/// first `dof` joints carry motors, a fin joint (when present) is passive.
struct RobotDesign {
    std::string name;
    std::size_t dof = 4;                      ///< actuated joint count
    std::vector<double> segment_lengths;      ///< m per link, head -> tail
    std::vector<double> segment_masses;       ///< kg per link
    double width = 0.02;                      ///< m, lateral thickness
    double depth = 0.03;                      ///< m, dorsoventral extent
    double joint_passive_stiffness = 5e-3;    ///< N*m/rad per joint (rubber suit)
    double joint_passive_damping = 1e-4;      ///< N*m*s/rad per joint
    double motor_gain = 2.2e-3;               ///< N*m per volt
    double motor_damping = 1.1e-4;            ///< N*m*s/rad (back-EMF analog)
    double torque_limit = 0.02;               ///< N*m, clamp on motor torque
    HydroCoeffs hydro;
    bool has_caudal_fin = true;

    std::size_t link_count() const { return segment_lengths.size(); }
    std::size_t joint_count() const { return link_count() - 1; }
    double total_length() const;
    double total_mass() const;

    bool operator==(const RobotDesign&) const = default;
};

/// Length/mass fractions used by the standard designs; the remainder is
/// split equally among body links.
struct StandardShares {
    double head = 0.25;
    double fin = 0.15;
};

/// Catalog design for dof in {2, 4, 6}; totals match the published family
/// (117 mm / 39 g, 170 mm / 59 g, 224 mm / 78 g). Throws DataError for any
/// other dof, pointing at custom construction.
RobotDesign standard_design(std::size_t dof, bool with_fin, const StandardShares& shares = {});

/// Named lookup ("ubot2", "ubot4", "ubot6", "ubot4_nofin").
RobotDesign design_by_name(const std::string& name);

/// Returns every violated invariant, each naming the offending field.
/// An empty list means the design is valid.
std::vector<std::string> validate_design(const RobotDesign& design);

void to_json(nlohmann::json& j, const HydroCoeffs& h);
void from_json(const nlohmann::json& j, HydroCoeffs& h);
void to_json(nlohmann::json& j, const RobotDesign& d);
void from_json(const nlohmann::json& j, RobotDesign& d);

}  // namespace microswim
