r"""Quadrotor rigid-body model, flat attitude reconstruction and tracking control.

Attitudes are body-to-world rotation matrices with body-frame angular velocity,
``dR/dt = R hat(omega)``. The printed model writes ``dR/dt = omega x R``; with a
body-frame Euler equation only the former is consistent, so that is the one used
throughout (integrator, reconstruction and controller).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.transform import Rotation

from cableflat.errors import (
    DegenerateThrust,
    GimbalDegeneracy,
    InsufficientDepth,
    first_sample,
)
from cableflat.flatness.jet import Jet
from cableflat.model.cable import E3
from cableflat.model.params import CableParams, QuadParams

__all__ = [
    "EPS_THRUST",
    "EPS_ALIGN",
    "QuadState",
    "QuadInput",
    "QuadDerivative",
    "AttitudeTrajectory",
    "TrackingReference",
    "ControllerGains",
    "hat",
    "vee",
    "exp_so3",
    "orthonormalize",
    "yaw_from_rotation",
    "rotation_from_thrust_and_yaw",
    "quad_dynamics",
    "attitude_from_flat",
    "geometric_tracking_control",
]

logger = logging.getLogger(__name__)

EPS_THRUST = 1e-4
EPS_ALIGN = 1e-3


def hat(w) -> np.ndarray:
    r"""Skew-symmetric matrix of ``w``, batched over leading axes"""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def vee(M) -> np.ndarray:
    r"""Inverse of :func:`hat` applied to the skew part of ``M``"""
    M = np.asarray(M, dtype=float)
    return 0.5 * np.stack(
        [
            M[..., 2, 1] - M[..., 1, 2],
            M[..., 0, 2] - M[..., 2, 0],
            M[..., 1, 0] - M[..., 0, 1],
        ],
        axis=-1,
    )


def exp_so3(rotation_vector) -> np.ndarray:
    rotation_vector = np.asarray(rotation_vector, dtype=float)
    flat = rotation_vector.reshape(-1, 3)
    matrices = Rotation.from_rotvec(flat).as_matrix()
    return matrices.reshape(rotation_vector.shape[:-1] + (3, 3))


def orthonormalize(R) -> np.ndarray:
    r"""Closest rotation matrix in the Frobenius sense"""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    return U @ Vt


def yaw_from_rotation(R) -> np.ndarray:
    r"""ZYX yaw angle of a rotation matrix"""
    R = np.asarray(R, dtype=float)
    return np.arctan2(R[..., 1, 0], R[..., 0, 0])


def rotation_from_thrust_and_yaw(b3, yaw) -> np.ndarray:
    r"""Rotation whose third column is ``b3`` and whose ZYX yaw is ``yaw``.

    The intermediate axis is ``y_c = (-sin yaw, cos yaw, 0)``, for which the yaw
    recovered from the result equals ``yaw`` exactly.
    """
    b3 = np.asarray(b3, dtype=float)
    yaw = np.asarray(yaw, dtype=float)
    y_c = np.stack([-np.sin(yaw), np.cos(yaw), np.zeros_like(yaw)], axis=-1)
    b1 = np.cross(y_c, b3)
    b1 = b1 / np.linalg.norm(b1, axis=-1, keepdims=True)
    b2 = np.cross(b3, b1)
    return np.stack([b1, b2, b3], axis=-1)


@dataclass(frozen=True)
class QuadState:
    p: np.ndarray
    v: np.ndarray
    R: np.ndarray
    omega: np.ndarray

    def __post_init__(self) -> None:
        for name, shape in (("p", (3,)), ("v", (3,)), ("R", (3, 3)), ("omega", (3,))):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != shape:
                raise ValueError("'{}' must have shape {}".format(name, shape))
            value.flags.writeable = False
            object.__setattr__(self, name, value)
        if not np.allclose(self.R.T @ self.R, np.eye(3), atol=1e-6) or (
            np.linalg.det(self.R) <= 0
        ):
            raise ValueError("'R' must be a rotation matrix")

    @classmethod
    def hover(cls, p) -> "QuadState":
        return cls(p=p, v=np.zeros(3), R=np.eye(3), omega=np.zeros(3))


@dataclass(frozen=True)
class QuadInput:
    f: float
    tau: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "f", float(self.f))
        tau = np.array(self.tau, dtype=float)
        if tau.shape != (3,):
            raise ValueError("'tau' must be a 3-vector")
        tau.flags.writeable = False
        object.__setattr__(self, "tau", tau)
        if self.f < 0:
            raise ValueError("thrust must be non-negative, got {}".format(self.f))


@dataclass(frozen=True)
class QuadDerivative:
    p_dot: np.ndarray
    v_dot: np.ndarray
    R_dot: np.ndarray
    omega_dot: np.ndarray
    body_rate: np.ndarray


def quad_dynamics(
    state: QuadState,
    control: QuadInput,
    f_left,
    f_right,
    quad: QuadParams,
    cable: CableParams,
) -> QuadDerivative:
    r"""Time derivative of a quadrotor carrying cable mass ``quad.attach``.

    Args:
        state: Robot state
        control: Thrust and body torque
        f_left: Force of the segment ending at the robot, ``f_{j-1}``
        f_right: Force of the segment starting at the robot, ``f_j``
        quad: Robot parameters
        cable: Cable parameters, for the attached point mass

    Returns:
        The derivative, including the body rate used by exponential-map updates
    """
    m_bar = quad.total_mass(cable)
    thrust = control.f * state.R @ E3
    v_dot = -cable.g * E3 + (np.asarray(f_right) - np.asarray(f_left) + thrust) / m_bar
    J = quad.J
    omega_dot = np.linalg.solve(J, control.tau - np.cross(state.omega, J @ state.omega))
    return QuadDerivative(
        p_dot=state.v,
        v_dot=v_dot,
        R_dot=state.R @ hat(state.omega),
        omega_dot=omega_dot,
        body_rate=state.omega,
    )


@dataclass(frozen=True)
class AttitudeTrajectory:
    r"""Attitude, rates and inputs of one robot along a time grid.

    Args:
        R: Rotations, shape (T, 3, 3)
        omega: Body angular velocity, shape (T, 3)
        omega_dot: Body angular acceleration, shape (T, 3)
        thrust: Total thrust, shape (T,)
        torque: Body torque, shape (T, 3)
    """

    R: np.ndarray
    omega: np.ndarray
    omega_dot: np.ndarray
    thrust: np.ndarray
    torque: np.ndarray


def attitude_from_flat(thrust_vector: Jet, yaw: Jet, J) -> AttitudeTrajectory:
    r"""Reconstruct attitude and body inputs from the thrust vector and yaw jets.

    Args:
        thrust_vector: Jet of ``u = f R e3``, at least second order
        yaw: Jet of the yaw angle, at least second order
        J: Inertia matrix

    Returns:
        The attitude trajectory
    """
    if thrust_vector.depth < 2 or yaw.depth < 2:
        raise InsufficientDepth(
            "attitude reconstruction needs second derivatives of thrust and yaw"
        )
    u = thrust_vector.truncate(2)
    psi = yaw.truncate(2)
    magnitude = np.linalg.norm(u.value, axis=-1)
    weak = magnitude < EPS_THRUST
    if np.any(weak):
        raise DegenerateThrust(
            "thrust magnitude below {:g} N".format(EPS_THRUST), sample=first_sample(weak)
        )
    b3 = u.unit(EPS_THRUST)
    y_c = Jet.stack([-psi.sin(), psi.cos(), psi * 0.0])
    side = y_c.cross(b3)
    aligned = np.linalg.norm(side.value, axis=-1) < EPS_ALIGN
    if np.any(aligned):
        raise GimbalDegeneracy(
            "thrust direction aligned with the yaw reference axis",
            sample=first_sample(aligned),
        )
    b1 = side.unit(EPS_ALIGN)
    b2 = b3.cross(b1)
    R0, R1, R2 = (
        np.stack([b1.derivative(k), b2.derivative(k), b3.derivative(k)], axis=-1)
        for k in range(3)
    )
    R0T = np.swapaxes(R0, -1, -2)
    omega = vee(R0T @ R1)
    omega_dot = vee(np.swapaxes(R1, -1, -2) @ R1 + R0T @ R2)
    J = np.asarray(J, dtype=float)
    J_omega = omega @ J.T
    torque = omega_dot @ J.T + np.cross(omega, J_omega)
    return AttitudeTrajectory(
        R=R0, omega=omega, omega_dot=omega_dot, thrust=magnitude, torque=torque
    )


@dataclass(frozen=True)
class ControllerGains:
    r"""Geometric controller gains, scaled by the robot mass m-bar.

    Args:
        kp: Position gain in 1/s^2
        kv: Velocity gain in 1/s
        kR: Attitude gain
        komega: Angular rate gain
    """

    kp: float = 6.0
    kv: float = 4.0
    kR: float = 0.7
    komega: float = 0.12

    def __post_init__(self) -> None:
        if min(self.kp, self.kv, self.kR, self.komega) <= 0:
            raise ValueError("controller gains must be positive")


@dataclass(frozen=True)
class TrackingReference:
    r"""Desired motion of a robot at one instant.

    ``thrust_vector`` replaces the hover feed-forward ``m(a + g e3)`` when the
    cable forces are known, ``omega`` and ``omega_dot`` are the planned body rates.
    """

    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    jerk: np.ndarray
    yaw: float = 0.0
    yaw_rate: float = 0.0
    thrust_vector: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None
    omega_dot: Optional[np.ndarray] = None

    @classmethod
    def hover(cls, p, yaw: float = 0.0) -> "TrackingReference":
        zero = np.zeros(3)
        return cls(p=np.asarray(p, dtype=float), v=zero, a=zero, jerk=zero, yaw=yaw)


def geometric_tracking_control(
    state: QuadState,
    reference: TrackingReference,
    quad: QuadParams,
    cable: CableParams,
    gains: ControllerGains = ControllerGains(),
) -> QuadInput:
    r"""SE(3) geometric tracking controller.

    Args:
        state: Measured robot state
        reference: Desired position derivatives, yaw and optional feed-forward
        quad: Robot parameters
        cable: Cable parameters, for the attached point mass
        gains: Controller gains

    Returns:
        Thrust clamped to ``[0, quad.f_max]`` and body torque
    """
    m_bar = quad.total_mass(cable)
    e_p = state.p - reference.p
    e_v = state.v - reference.v
    if reference.thrust_vector is None:
        feed_forward = m_bar * (np.asarray(reference.a) + cable.g * E3)
    else:
        feed_forward = np.asarray(reference.thrust_vector, dtype=float)
    force = -m_bar * (gains.kp * e_p + gains.kv * e_v) + feed_forward

    b3 = state.R @ E3
    thrust = float(force @ b3)
    if thrust < 0.0 or thrust > quad.f_max:
        clamped = min(max(thrust, 0.0), quad.f_max)
        logger.debug(
            "thrust %.4f N of robot %d clamped to %.4f N", thrust, quad.attach, clamped
        )
        thrust = clamped

    force_norm = np.linalg.norm(force)
    b3_des = force / force_norm if force_norm > EPS_THRUST else E3
    R_des = rotation_from_thrust_and_yaw(b3_des, reference.yaw)

    if reference.omega is not None:
        omega_des = np.asarray(reference.omega, dtype=float)
    else:
        # body rates of the desired frame from the jerk
        h = np.asarray(reference.jerk, dtype=float)
        if force_norm > EPS_THRUST:
            h = m_bar / force_norm * (h - (b3_des @ h) * b3_des)
        else:
            h = np.zeros(3)
        omega_des = np.array(
            [
                -h @ R_des[:, 1],
                h @ R_des[:, 0],
                reference.yaw_rate * b3_des[2],
            ]
        )

    R = state.R
    e_R = 0.5 * vee(R_des.T @ R - R.T @ R_des)
    relative = R.T @ R_des
    e_omega = state.omega - relative @ omega_des
    J = quad.J
    torque = m_bar * (-gains.kR * e_R - gains.komega * e_omega) + np.cross(
        state.omega, J @ state.omega
    )
    if reference.omega_dot is not None:
        torque = torque - J @ (
            hat(state.omega) @ relative @ omega_des
            - relative @ np.asarray(reference.omega_dot, dtype=float)
        )
    return QuadInput(f=thrust, tau=torque)
