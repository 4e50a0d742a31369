#pragma once

#include "armbench/robot_model.hpp"
#include "armbench/types.hpp"

namespace arm {

/// Rigid transform of rotating theta about the screw axis:
/// rotation by Rodrigues' formula, translation
/// (I*theta + (1-cos)[w] + (theta-sin)[w]^2) v.
Pose exp_screw(const ScrewAxis& axis, double theta);

/// Product of exponentials: T(q) = [prod_i exp([s_i] q_i)] * home.
Pose forward_kinematics(const RobotModel& model, const VecX& q);

/// Base-frame task Jacobian, rows [linear; angular]: column i maps qd_i to
/// the linear velocity of the end-effector origin and the angular velocity
/// of the end-effector body, both expressed in the base frame.
Jacobian space_jacobian(const RobotModel& model, const VecX& q);

/// d/dt[J(q(t))] qd along the flow qd, as a [linear; angular] 6-vector.
Vec6 jacobian_dot_qdot(const RobotModel& model, const VecX& q, const VecX& qd);

/// sqrt(det(J J^T)); zero iff J loses rank.
double manipulability(const Jacobian& J);

/// Norm of column i: how much instantaneous end-effector motion joint i can
/// produce. For a revolute joint the angular sub-vector is unit, so the value
/// floors at 1 and approaches it as the linear contribution vanishes.
double joint_manipulability(const Jacobian& J, int i);

}  // namespace arm
