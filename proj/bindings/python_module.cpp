#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "armbench/cli.hpp"
#include "armbench/config.hpp"
#include "armbench/controllers.hpp"
#include "armbench/dynamics.hpp"
#include "armbench/kinematics.hpp"
#include "armbench/qp_solver.hpp"
#include "armbench/robot_model.hpp"
#include "armbench/simulation.hpp"
#include "armbench/trajectory.hpp"

namespace py = pybind11;
using namespace arm;

namespace {

Eigen::Vector4d quat_wxyz(const Eigen::Quaterniond& q) {
  return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
}

MatX stack_vec(const RunLog& log, const VecX RunTick::*member) {
  MatX out(static_cast<Eigen::Index>(log.ticks.size()), log.n);
  for (size_t i = 0; i < log.ticks.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = (log.ticks[i].*member).transpose();
  return out;
}

MatX stack_pose(const RunLog& log, const Pose RunTick::*member) {
  MatX out(static_cast<Eigen::Index>(log.ticks.size()), 7);
  for (size_t i = 0; i < log.ticks.size(); ++i) {
    const Pose& p = log.ticks[i].*member;
    out.row(static_cast<Eigen::Index>(i)) << p.translation.x(), p.translation.y(),
        p.translation.z(), p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(armbench, m) {
  m.doc() = "7-DoF manipulator control benchmark: PoE kinematics, rigid-body dynamics, "
            "an ADMM QP solver and three trajectory-tracking controllers";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ValidationError>(m, "ModelValidationError");
  py::register_exception<SingularityError>(m, "SingularityError");

  py::class_<Pose>(m, "Pose")
      .def(py::init([](const Eigen::Vector4d& wxyz, const Vec3& t) {
             return Pose(Eigen::Quaterniond(wxyz[0], wxyz[1], wxyz[2], wxyz[3]), t);
           }),
           py::arg("quat_wxyz") = Eigen::Vector4d(1, 0, 0, 0),
           py::arg("translation") = Vec3::Zero().eval())
      .def_property_readonly("quat_wxyz", [](const Pose& p) { return quat_wxyz(p.rotation); })
      .def_readwrite("translation", &Pose::translation)
      .def("rotation_matrix", &Pose::rotation_matrix)
      .def("matrix", &Pose::matrix)
      .def("inverse", &Pose::inverse)
      .def("__mul__", [](const Pose& a, const Pose& b) { return a * b; })
      .def("__repr__", [](const Pose& p) {
        return "Pose(quat_wxyz=[" + std::to_string(p.rotation.w()) + ", " +
               std::to_string(p.rotation.x()) + ", " + std::to_string(p.rotation.y()) + ", " +
               std::to_string(p.rotation.z()) + "], t=[" + std::to_string(p.translation.x()) +
               ", " + std::to_string(p.translation.y()) + ", " +
               std::to_string(p.translation.z()) + "])";
      });

  py::class_<Twist>(m, "Twist")
      .def(py::init<>())
      .def(py::init([](const Vec3& lin, const Vec3& ang) { return Twist{lin, ang}; }),
           py::arg("linear"), py::arg("angular"))
      .def_readwrite("linear", &Twist::linear)
      .def_readwrite("angular", &Twist::angular)
      .def("vector", &Twist::vector);

  py::class_<JointState>(m, "JointState")
      .def(py::init<VecX, VecX>(), py::arg("q"), py::arg("qd"))
      .def_static("zero", &JointState::zero)
      .def_readwrite("q", &JointState::q)
      .def_readwrite("qd", &JointState::qd);

  py::class_<ScrewAxis>(m, "ScrewAxis")
      .def(py::init([](const Vec3& omega, const Vec3& v) { return ScrewAxis{omega, v}; }),
           py::arg("omega"), py::arg("v"))
      .def_readwrite("omega", &ScrewAxis::omega)
      .def_readwrite("v", &ScrewAxis::v);

  py::class_<LinkInertia>(m, "LinkInertia")
      .def_readwrite("mass", &LinkInertia::mass)
      .def_readwrite("com", &LinkInertia::com)
      .def_readwrite("inertia", &LinkInertia::inertia);

  py::class_<JointLimits>(m, "JointLimits")
      .def_readwrite("q_min", &JointLimits::q_min)
      .def_readwrite("q_max", &JointLimits::q_max)
      .def_readwrite("qd_min", &JointLimits::qd_min)
      .def_readwrite("qd_max", &JointLimits::qd_max)
      .def_readwrite("tau_min", &JointLimits::tau_min)
      .def_readwrite("tau_max", &JointLimits::tau_max);

  py::class_<RobotModel>(m, "RobotModel")
      .def_readonly("n", &RobotModel::n)
      .def_readonly("axes", &RobotModel::axes)
      .def_readonly("home", &RobotModel::home)
      .def_readonly("links", &RobotModel::links)
      .def_readonly("limits", &RobotModel::limits)
      .def_readonly("gravity", &RobotModel::gravity);

  m.def("load_model", &load_model, py::arg("path"));
  m.def("write_model", &write_model, py::arg("model"), py::arg("path"));
  m.def("validate_model", &validate_model, py::arg("model"));

  m.def("exp_screw", &exp_screw, py::arg("axis"), py::arg("theta"));
  m.def("forward_kinematics", &forward_kinematics, py::arg("model"), py::arg("q"));
  m.def("space_jacobian",
        [](const RobotModel& model, const VecX& q) { return MatX(space_jacobian(model, q)); },
        py::arg("model"), py::arg("q"));
  m.def("jacobian_dot_qdot", &jacobian_dot_qdot, py::arg("model"), py::arg("q"), py::arg("qd"));
  m.def("manipulability",
        [](const MatX& J) { return manipulability(Jacobian(J)); }, py::arg("J"));
  m.def("joint_manipulability",
        [](const MatX& J, int i) { return joint_manipulability(Jacobian(J), i); }, py::arg("J"),
        py::arg("i"));

  m.def("inverse_dynamics", &inverse_dynamics, py::arg("model"), py::arg("q"), py::arg("qd"),
        py::arg("qdd"));
  m.def("mass_matrix", &mass_matrix, py::arg("model"), py::arg("q"));
  m.def("bias_forces", &bias_forces, py::arg("model"), py::arg("q"), py::arg("qd"));
  m.def("gravity_forces", &gravity_forces, py::arg("model"), py::arg("q"));
  m.def("forward_dynamics", &forward_dynamics, py::arg("model"), py::arg("q"), py::arg("qd"),
        py::arg("tau"));

  py::class_<TaskInertia>(m, "TaskInertia")
      .def_readonly("lambda_", &TaskInertia::lambda)
      .def_readonly("lambda_sqrt", &TaskInertia::lambda_sqrt);
  m.def("task_space_inertia",
        [](const MatX& M, const MatX& J, double damping) {
          return task_space_inertia(M, Jacobian(J), damping);
        },
        py::arg("M"), py::arg("J"), py::arg("damping") = 1e-6);
  m.def("critical_damping", &critical_damping, py::arg("lambda_sqrt"), py::arg("k_des_diag"));

  py::enum_<QPStatus>(m, "QPStatus")
      .value("solved", QPStatus::solved)
      .value("max_iterations", QPStatus::max_iterations)
      .value("primal_infeasible", QPStatus::primal_infeasible);

  py::class_<QPProblem>(m, "QPProblem")
      .def(py::init([](const MatX& P, const VecX& c, const MatX& A, const VecX& l, const VecX& u) {
             return QPProblem{P, c, A, l, u};
           }),
           py::arg("P"), py::arg("c"), py::arg("A"), py::arg("l"), py::arg("u"))
      .def_readwrite("P", &QPProblem::P)
      .def_readwrite("c", &QPProblem::c)
      .def_readwrite("A", &QPProblem::A)
      .def_readwrite("l", &QPProblem::l)
      .def_readwrite("u", &QPProblem::u);

  py::class_<QPSettings>(m, "QPSettings")
      .def(py::init<>())
      .def_readwrite("eps_abs", &QPSettings::eps_abs)
      .def_readwrite("eps_rel", &QPSettings::eps_rel)
      .def_readwrite("max_iter", &QPSettings::max_iter)
      .def_readwrite("rho", &QPSettings::rho)
      .def_readwrite("sigma", &QPSettings::sigma)
      .def_readwrite("alpha", &QPSettings::alpha)
      .def_readwrite("adaptive_rho", &QPSettings::adaptive_rho)
      .def_readwrite("warm_start", &QPSettings::warm_start);

  py::class_<QPSolution>(m, "QPSolution")
      .def_readonly("x", &QPSolution::x)
      .def_readonly("y", &QPSolution::y)
      .def_readonly("status", &QPSolution::status)
      .def_readonly("iterations", &QPSolution::iterations)
      .def_readonly("primal_residual", &QPSolution::primal_residual)
      .def_readonly("dual_residual", &QPSolution::dual_residual)
      .def_readonly("objective", &QPSolution::objective);

  py::class_<QPSolver>(m, "QPSolver")
      .def(py::init<QPSettings>(), py::arg("settings") = QPSettings{})
      .def("solve", &QPSolver::solve, py::arg("problem"))
      .def("reset", &QPSolver::reset);

  py::class_<ControlTarget>(m, "ControlTarget")
      .def(py::init([](const Pose& pose, const Twist& twist) {
             return ControlTarget{pose, twist};
           }),
           py::arg("pose_des"), py::arg("twist_des") = Twist{})
      .def_readwrite("pose_des", &ControlTarget::pose_des)
      .def_readwrite("twist_des", &ControlTarget::twist_des);

  py::enum_<CommandKind>(m, "CommandKind")
      .value("position", CommandKind::position)
      .value("torque", CommandKind::torque);

  py::class_<ControlCommand>(m, "ControlCommand")
      .def_readonly("kind", &ControlCommand::kind)
      .def_readonly("q_des", &ControlCommand::q_des)
      .def_readonly("tau_des", &ControlCommand::tau_des)
      .def_readonly("qd_des", &ControlCommand::qd_des);

  m.def("pose_error", &pose_error, py::arg("current"), py::arg("desired"));
  m.def("derive_desired_twist", &derive_desired_twist, py::arg("prev"), py::arg("curr"),
        py::arg("dt"));
  m.def("impedance_wrench", &impedance_wrench, py::arg("k_des_diag"), py::arg("d_des"),
        py::arg("pose"), py::arg("twist"), py::arg("target"));
  m.def("nullspace_feedback", &nullspace_feedback, py::arg("k_n_diag"), py::arg("d_n_diag"),
        py::arg("q_null_target"), py::arg("state"));

  py::class_<DLSParams>(m, "DLSParams")
      .def(py::init<>())
      .def_readwrite("damping_lambda", &DLSParams::damping_lambda)
      .def_readwrite("epsilon", &DLSParams::epsilon)
      .def_readwrite("dt", &DLSParams::dt)
      .def_readwrite("feedback_gain", &DLSParams::feedback_gain)
      .def_readwrite("damped_branch", &DLSParams::damped_branch);

  py::enum_<NullspaceMode>(m, "NullspaceMode")
      .value("fixed", NullspaceMode::fixed)
      .value("dynamic", NullspaceMode::dynamic);

  py::class_<QPControllerParams>(m, "QPControllerParams")
      .def_static("defaults", &QPControllerParams::defaults, py::arg("n"))
      .def_readwrite("k_des_diag", &QPControllerParams::k_des_diag)
      .def_readwrite("w_track_diag", &QPControllerParams::w_track_diag)
      .def_readwrite("s_diag", &QPControllerParams::s_diag)
      .def_readwrite("w_joint_diag", &QPControllerParams::w_joint_diag)
      .def_readwrite("k_n_diag", &QPControllerParams::k_n_diag)
      .def_readwrite("d_n_diag", &QPControllerParams::d_n_diag)
      .def_readwrite("q_null_target", &QPControllerParams::q_null_target)
      .def_readwrite("dt", &QPControllerParams::dt)
      .def_readwrite("nullspace_mode", &QPControllerParams::nullspace_mode)
      .def_readwrite("lambda_threshold", &QPControllerParams::lambda_threshold)
      .def_readwrite("weight_reduction_exponent", &QPControllerParams::weight_reduction_exponent)
      .def_readwrite("unlock_hysteresis", &QPControllerParams::unlock_hysteresis)
      .def_readwrite("lambda_damping", &QPControllerParams::lambda_damping);

  m.def("dls_ik_step", &dls_ik_step, py::arg("model"), py::arg("state"), py::arg("target"),
        py::arg("params"));
  m.def("id_step", &id_step, py::arg("model"), py::arg("state"), py::arg("target"),
        py::arg("params"), py::arg("qd_des_prev"));
  m.def("build_qp", &build_qp, py::arg("model"), py::arg("state"), py::arg("target"),
        py::arg("params"), py::arg("dyn_terms"), py::arg("task_inertia"));
  m.def("dynamics_terms", &dynamics_terms, py::arg("model"), py::arg("q"), py::arg("qd"));

  py::class_<JointDynamicsTerms>(m, "JointDynamicsTerms")
      .def_readonly("mass_matrix", &JointDynamicsTerms::mass_matrix)
      .def_readonly("bias", &JointDynamicsTerms::bias)
      .def_readonly("gravity", &JointDynamicsTerms::gravity);

  py::class_<Controller>(m, "Controller")
      .def("step", &Controller::step, py::arg("state"), py::arg("target"))
      .def("reset", &Controller::reset)
      .def_property_readonly("name", [](const Controller& c) { return std::string(c.name()); });

  py::class_<DlsIkController, Controller>(m, "DlsIkController")
      .def(py::init<RobotModel, DLSParams>(), py::arg("model"), py::arg("params"));
  py::class_<InverseDynamicsController, Controller>(m, "InverseDynamicsController")
      .def(py::init<RobotModel, DLSParams>(), py::arg("model"), py::arg("params"));
  py::class_<QpComplianceController, Controller>(m, "QpComplianceController")
      .def(py::init<RobotModel, QPControllerParams, QPSettings>(), py::arg("model"),
           py::arg("params"), py::arg("solver_settings") = QPSettings{});

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def(py::init<>())
      .def(py::init([](double t, const Pose& pose) {
             return TrajectorySample{t, pose, std::nullopt};
           }),
           py::arg("t"), py::arg("pose"))
      .def_readwrite("t", &TrajectorySample::t)
      .def_readwrite("pose", &TrajectorySample::pose);

  py::enum_<SynthKind>(m, "SynthKind")
      .value("lissajous", SynthKind::lissajous)
      .value("step", SynthKind::step)
      .value("circle", SynthKind::circle);

  py::class_<SynthParams>(m, "SynthParams")
      .def(py::init<>())
      .def_readwrite("center", &SynthParams::center)
      .def_readwrite("amplitude", &SynthParams::amplitude)
      .def_readwrite("frequency_hz", &SynthParams::frequency_hz)
      .def_readwrite("phase_rad", &SynthParams::phase_rad)
      .def_readwrite("plane_u", &SynthParams::plane_u)
      .def_readwrite("plane_v", &SynthParams::plane_v)
      .def_readwrite("rot_amplitude_rad", &SynthParams::rot_amplitude_rad)
      .def_readwrite("rot_axis", &SynthParams::rot_axis)
      .def_readwrite("rot_frequency_hz", &SynthParams::rot_frequency_hz)
      .def_readwrite("step_time_s", &SynthParams::step_time_s);

  m.def("load_trajectory", &load_trajectory, py::arg("path"));
  m.def("write_trajectory", &write_trajectory, py::arg("trajectory"), py::arg("path"));
  m.def("synth_trajectory", &synth_trajectory, py::arg("kind"), py::arg("params"),
        py::arg("duration_s"), py::arg("rate_hz"));
  m.def("resample_hold", &resample_hold, py::arg("trajectory"), py::arg("t"));

  py::class_<ServoGains>(m, "ServoGains")
      .def_static("defaults", &ServoGains::defaults, py::arg("n"))
      .def_readwrite("kp", &ServoGains::kp)
      .def_readwrite("kd", &ServoGains::kd);

  m.def("integrate_step",
        [](const RobotModel& model, const JointState& state, const VecX& tau, double dt) {
          const IntegrateResult r = integrate_step(model, state, tau, dt);
          return py::make_tuple(r.state, r.diverged);
        },
        py::arg("model"), py::arg("state"), py::arg("tau"), py::arg("dt"));
  m.def("position_servo", &position_servo, py::arg("model"), py::arg("state"), py::arg("q_des"),
        py::arg("gains"));

  py::class_<RunLog>(m, "RunLog")
      .def_readonly("n", &RunLog::n)
      .def_readonly("dt", &RunLog::dt)
      .def_readonly("unstable", &RunLog::unstable)
      .def_property_readonly("num_ticks",
                             [](const RunLog& log) { return log.ticks.size(); })
      .def_property_readonly("t",
                             [](const RunLog& log) {
                               VecX t(static_cast<Eigen::Index>(log.ticks.size()));
                               for (size_t i = 0; i < log.ticks.size(); ++i)
                                 t[static_cast<Eigen::Index>(i)] = log.ticks[i].t;
                               return t;
                             })
      .def_property_readonly("q", [](const RunLog& log) { return stack_vec(log, &RunTick::q); })
      .def_property_readonly("qd", [](const RunLog& log) { return stack_vec(log, &RunTick::qd); })
      .def_property_readonly("qd_cmd",
                             [](const RunLog& log) { return stack_vec(log, &RunTick::qd_cmd); })
      .def_property_readonly("tau_raw",
                             [](const RunLog& log) { return stack_vec(log, &RunTick::tau_raw); })
      .def_property_readonly(
          "tau_clamped", [](const RunLog& log) { return stack_vec(log, &RunTick::tau_clamped); })
      .def_property_readonly(
          "pose_actual", [](const RunLog& log) { return stack_pose(log, &RunTick::pose_actual); })
      .def_property_readonly(
          "pose_des", [](const RunLog& log) { return stack_pose(log, &RunTick::pose_des); });

  m.def("run_experiment",
        [](const RobotModel& model, Controller& controller, const Trajectory& trajectory,
           double dt, double duration_s, const JointState& initial, const ServoGains& gains) {
          return run_experiment(model, controller, trajectory, dt, duration_s, initial, gains);
        },
        py::arg("model"), py::arg("controller"), py::arg("trajectory"), py::arg("dt"),
        py::arg("duration_s"), py::arg("initial_state"), py::arg("servo_gains"));

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("e_p", &MetricsReport::e_p)
      .def_readonly("e_phi", &MetricsReport::e_phi)
      .def_readonly("V", &MetricsReport::V)
      .def_readonly("T", &MetricsReport::T)
      .def_readonly("window_t0", &MetricsReport::window_t0)
      .def_readonly("window_t1", &MetricsReport::window_t1)
      .def_readonly("ticks", &MetricsReport::ticks)
      .def_readonly("gimbal_flags", &MetricsReport::gimbal_flags);

  m.def("compute_metrics", &compute_metrics, py::arg("log"), py::arg("t0"), py::arg("t1"));
  m.def("write_runlog", &write_runlog, py::arg("log"), py::arg("path"));
  m.def("read_runlog", &read_runlog, py::arg("path"));
}
