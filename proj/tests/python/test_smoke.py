"""Smoke tests for the armbench python module: load the shipped model, check
the headline numerics against numpy, run a short closed-loop experiment and
poke the CLI binary."""

import os
import subprocess
import sys

import numpy as np

import armbench as ab

SOURCE_DIR = os.environ.get("ARMBENCH_SOURCE_DIR", os.getcwd())
MODEL_PATH = os.path.join(SOURCE_DIR, "models", "h1_arm_7dof.model")

failures = []


def check(name, ok, detail=""):
    print(f"{'ok' if ok else 'FAIL'}: {name} {detail}")
    if not ok:
        failures.append(name)


def main():
    model = ab.load_model(MODEL_PATH)
    check("model joint count", model.n == 7)
    check("model validates", ab.validate_model(model) == [])

    # FK at zero lands on the home pose.
    home = ab.forward_kinematics(model, np.zeros(7))
    check(
        "fk(0) == home",
        np.allclose(home.translation, model.home.translation, atol=1e-12)
        and np.allclose(home.quat_wxyz, model.home.quat_wxyz, atol=1e-12),
    )

    # Jacobian columns against a numpy finite difference on the translation.
    q = np.array([0.3, 0.4, 0.2, 1.2, 0.1, 0.5, 0.2])
    J = ab.space_jacobian(model, q)
    h = 1e-6
    fd = np.zeros((3, 7))
    for i in range(7):
        dq = np.zeros(7)
        dq[i] = h
        p_plus = ab.forward_kinematics(model, q + dq).translation
        p_minus = ab.forward_kinematics(model, q - dq).translation
        fd[:, i] = (p_plus - p_minus) / (2 * h)
    check("jacobian vs numpy fd", np.abs(J[:3] - fd).max() < 1e-5,
          f"max err {np.abs(J[:3] - fd).max():.2e}")

    # Mass matrix symmetry and gravity consistency.
    M = ab.mass_matrix(model, q)
    check("mass matrix symmetric", np.abs(M - M.T).max() < 1e-10)
    tau_g = ab.inverse_dynamics(model, q, np.zeros(7), np.zeros(7))
    check("statics equals gravity", np.allclose(tau_g, ab.gravity_forces(model, q), atol=1e-12))

    # Tiny QP: minimize (x-1)^2 with 0 <= x <= 0.5 clamps to 0.5.
    problem = ab.QPProblem(
        P=np.array([[2.0]]), c=np.array([-2.0]), A=np.array([[1.0]]),
        l=np.array([0.0]), u=np.array([0.5]))
    solution = ab.QPSolver().solve(problem)
    check("qp clamps to the active bound",
          solution.status == ab.QPStatus.solved and abs(solution.x[0] - 0.5) < 1e-5)

    # Short closed-loop regulation with the QP compliance controller.
    params = ab.QPControllerParams.defaults(7)
    controller = ab.QpComplianceController(model, params)
    pose0 = ab.forward_kinematics(model, q)
    trajectory = [ab.TrajectorySample()]
    trajectory[0].t = 0.0
    trajectory[0].pose = pose0
    log = ab.run_experiment(model, controller, trajectory, 0.001, 0.2,
                            ab.JointState(q, np.zeros(7)), ab.ServoGains.defaults(7))
    check("run is stable", not log.unstable and log.num_ticks == 200)
    metrics = ab.compute_metrics(log, 0.0, 0.2)
    check("holding the pose keeps errors tiny", metrics.e_p < 1e-6 and metrics.V < 1e-6,
          f"e_p={metrics.e_p:.2e} V={metrics.V:.2e}")

    # Determinism of the experiment loop.
    controller_b = ab.QpComplianceController(model, params)
    log_b = ab.run_experiment(model, controller_b, trajectory, 0.001, 0.2,
                              ab.JointState(q, np.zeros(7)), ab.ServoGains.defaults(7))
    check("experiment is deterministic", np.array_equal(log.q, log_b.q))

    # The CLI binary validates the shipped preset.
    cli = os.environ.get("ARMBENCH_CLI")
    if cli:
        result = subprocess.run(
            [cli, "validate", "--config", "configs/qp_default.cfg"],
            cwd=SOURCE_DIR, capture_output=True, text=True)
        check("cli validate exits 0", result.returncode == 0, result.stdout.strip())

    if failures:
        print(f"{len(failures)} smoke checks failed: {failures}")
        sys.exit(1)
    print("all python smoke checks passed")


if __name__ == "__main__":
    main()
