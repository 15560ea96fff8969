from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np

from cableflat.errors import InvalidConfig
from cableflat.parse.utilities import check_keys, load_json

__all__ = ["GRAVITY", "CableParams", "QuadParams"]

GRAVITY = 9.81


def _frozen_array(values, name: str, length: Optional[int] = None) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim == 0 and length is not None:
        array = np.full(length, float(array))
    if array.ndim != 1:
        raise InvalidConfig("'{}' must be a flat list of numbers".format(name))
    if length is not None and array.shape[0] != length:
        raise InvalidConfig(
            "'{}' must have {} entries, got {}".format(name, length, array.shape[0])
        )
    if not np.all(np.isfinite(array)):
        raise InvalidConfig("'{}' must contain finite numbers".format(name))
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class CableParams:
    r"""Lumped-mass cable parameters.

    Segment ``i`` joins masses ``i`` and ``i+1``; segment 0 joins the ground anchor
    to mass 1 and only exists for class A systems.

    Args:
        n: Number of point masses
        k: Segment stiffnesses in N/m, either ``n`` values (segments 0..n-1) or
            ``n-1`` values (segments 1..n-1)
        l0: Segment rest lengths in m, same layout as ``k``
        mass: Point masses in kg, one per mass 1..n or a single shared value
        c: Viscous coefficients in N s/m, one per mass 1..n or a single shared value
        g: Gravitational acceleration in m/s^2
    """

    n: int
    k: np.ndarray
    l0: np.ndarray
    mass: np.ndarray
    c: np.ndarray
    g: float = GRAVITY

    def __post_init__(self) -> None:
        n = int(self.n)
        if n < 1:
            raise InvalidConfig("a cable needs at least one point mass")
        object.__setattr__(self, "n", n)
        k = _frozen_array(self.k, "k")
        l0 = _frozen_array(self.l0, "l0")
        if k.shape != l0.shape:
            raise InvalidConfig("'k' and 'l0' must have the same length")
        if k.shape[0] not in (n, n - 1):
            raise InvalidConfig(
                "'k' must have n={} or n-1={} entries, got {}".format(n, n - 1, k.shape[0])
            )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l0", l0)
        object.__setattr__(self, "mass", _frozen_array(self.mass, "mass", n))
        object.__setattr__(self, "c", _frozen_array(self.c, "c", n))
        object.__setattr__(self, "g", float(self.g))
        if np.any(self.k <= 0) or np.any(self.l0 <= 0):
            raise InvalidConfig("stiffness and rest length must be positive")
        if np.any(self.mass <= 0):
            raise InvalidConfig("point masses must be positive")
        if np.any(self.c < 0):
            raise InvalidConfig("viscous coefficients must be non-negative")
        if self.g < 0:
            raise InvalidConfig("gravity must be non-negative")

    @property
    def has_ground_segment(self) -> bool:
        return self.k.shape[0] == self.n

    @property
    def stiffness(self) -> np.ndarray:
        r"""Stiffness indexed by segment number 0..n-1 (NaN when segment 0 is absent)"""
        return self._by_segment(self.k)

    @property
    def rest_lengths(self) -> np.ndarray:
        r"""Rest length indexed by segment number 0..n-1 (NaN when segment 0 is absent)"""
        return self._by_segment(self.l0)

    def _by_segment(self, values: np.ndarray) -> np.ndarray:
        if self.has_ground_segment:
            return values
        return np.concatenate([[np.nan], values])

    def segment(self, i: int):
        r"""Stiffness and rest length of segment ``i``"""
        k, l0 = self.stiffness[i], self.rest_lengths[i]
        if i < 0 or i >= self.n or np.isnan(k):
            raise InvalidConfig("segment {} does not exist".format(i))
        return float(k), float(l0)

    def point(self, i: int):
        r"""Mass and viscous coefficient of point ``i`` (1-based)"""
        return float(self.mass[i - 1]), float(self.c[i - 1])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.mass))

    def check(self, topology) -> None:
        if topology.n != self.n:
            raise InvalidConfig(
                "parameters describe {} masses, topology {}".format(self.n, topology.n)
            )
        if topology.has_anchor != self.has_ground_segment:
            raise InvalidConfig(
                "class {} {} a ground segment k[0]".format(
                    topology.system_class,
                    "requires" if topology.has_anchor else "does not take",
                )
            )

    def with_segment_parameters(
        self, k: Optional[Sequence[float]] = None, c: Optional[Union[float, Sequence[float]]] = None
    ) -> "CableParams":
        changes = {}
        if k is not None:
            changes["k"] = np.asarray(k, dtype=float)
        if c is not None:
            changes["c"] = np.broadcast_to(np.asarray(c, dtype=float), (self.n,)).copy()
        return replace(self, **changes)

    def scaled(self, mass: float = 1.0, k: float = 1.0, c: float = 1.0) -> "CableParams":
        return replace(self, mass=self.mass * mass, k=self.k * k, c=self.c * c)

    @classmethod
    def from_dict(cls, data: Dict) -> "CableParams":
        check_keys(data, ("n", "k", "l0", "mass", "c"), ("g", "description"), "cable")
        n = int(data["n"])
        return cls(
            n=n,
            k=data["k"],
            l0=data["l0"],
            mass=data["mass"],
            c=data["c"],
            g=data.get("g", GRAVITY),
        )

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "k": self.k.tolist(),
            "l0": self.l0.tolist(),
            "mass": self.mass.tolist(),
            "c": self.c.tolist(),
            "g": self.g,
        }

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CableParams":
        return cls.from_dict(load_json(path))


@dataclass(frozen=True)
class QuadParams:
    r"""Quadrotor parameters.

    Args:
        m_R: Vehicle mass in kg
        J: Inertia matrix in kg m^2, or its diagonal
        attach: Index of the cable mass rigidly attached at the centre of mass
        f_max: Maximum total thrust in N
    """

    m_R: float
    J: np.ndarray
    attach: int
    f_max: float = field(default=np.inf)

    def __post_init__(self) -> None:
        J = np.array(self.J, dtype=float)
        if J.shape == (3,):
            J = np.diag(J)
        if J.shape != (3, 3):
            raise InvalidConfig("inertia must be a 3x3 matrix")
        if not np.allclose(J, J.T):
            raise InvalidConfig("inertia must be symmetric")
        if np.any(np.linalg.eigvalsh(J) <= 0):
            raise InvalidConfig("inertia must be positive definite")
        J.flags.writeable = False
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "m_R", float(self.m_R))
        object.__setattr__(self, "f_max", float(self.f_max))
        object.__setattr__(self, "attach", int(self.attach))
        if self.m_R <= 0:
            raise InvalidConfig("robot mass must be positive")
        if self.f_max <= 0:
            raise InvalidConfig("maximum thrust must be positive")

    @property
    def J_inv(self) -> np.ndarray:
        return np.linalg.inv(self.J)

    def total_mass(self, cable: CableParams) -> float:
        r"""Robot mass plus the attached cable point, the m-bar of the robot equations"""
        return self.m_R + cable.point(self.attach)[0]

    def attached_to(self, j: int) -> "QuadParams":
        return replace(self, attach=j)

    @classmethod
    def from_dict(cls, data: Dict) -> "QuadParams":
        check_keys(data, ("m_R", "J"), ("attach", "f_max", "description"), "quadrotor")
        return cls(
            m_R=data["m_R"],
            J=data["J"],
            attach=data.get("attach", 1),
            f_max=data.get("f_max", np.inf),
        )

    def to_dict(self) -> Dict:
        return {
            "m_R": self.m_R,
            "J": self.J.tolist(),
            "attach": self.attach,
            "f_max": self.f_max,
        }

    @classmethod
    def load(cls, path: Union[str, Path]) -> "QuadParams":
        return cls.from_dict(load_json(path))
