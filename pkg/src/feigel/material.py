"""Medium description and constitutive relations of a magnetoelectric fluid.

Everything here works in natural units (hbar = c = eps0 = mu0 = 1), so

    D = eps E + chi B
    H = -chi^T E + B / mu

with ``chi`` a real 3x3 pseudotensor. The theory built on top of these
relations is first order in ``chi``; :class:`MaterialParams` refuses
couplings above ``chi_max``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_CHI_MAX = 1e-2

_AXES = "xyz"


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class MaterialParams:
    """Homogeneous, non-dispersive magnetoelectric medium.

    Parameters
    ----------
    eps, mu : float
        Relative permittivity and permeability (scalars, positive).
    chi : array_like, shape (3, 3)
        Magnetoelectric coupling ``chi[i, k]``.
    chi_max : float
        Largest admissible ``|chi_ik|``.
    """

    eps: float = 1.0
    mu: float = 1.0
    chi: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    chi_max: float = DEFAULT_CHI_MAX

    def __post_init__(self):
        chi = _frozen(self.chi)
        if chi.shape != (3, 3):
            raise ValueError(f"chi must be 3x3, got shape {chi.shape}")
        for name in ("eps", "mu"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and positive, got {value}")
            object.__setattr__(self, name, value)
        if not np.all(np.isfinite(chi)):
            raise ValueError("chi entries must be finite")
        if np.max(np.abs(chi)) > self.chi_max:
            raise ValueError(
                f"max|chi| = {np.max(np.abs(chi)):g} exceeds chi_max = {self.chi_max:g}; "
                "the first-order theory does not apply"
            )
        object.__setattr__(self, "chi", chi)

    @classmethod
    def from_couplings(cls, eps=1.0, mu=1.0, chi_yz=0.0, chi_zy=0.0, chi_max=DEFAULT_CHI_MAX):
        """Medium whose only couplings are ``chi_yz`` and ``chi_zy``."""
        chi = np.zeros((3, 3))
        chi[1, 2] = chi_yz
        chi[2, 1] = chi_zy
        return cls(eps=eps, mu=mu, chi=chi, chi_max=chi_max)

    @classmethod
    def from_entries(cls, eps=1.0, mu=1.0, chi_max=DEFAULT_CHI_MAX, **entries):
        """Build from keyword entries such as ``chi_xy=1e-3``."""
        chi = np.zeros((3, 3))
        for key, value in entries.items():
            if len(key) != 6 or not key.startswith("chi_") or any(c not in _AXES for c in key[4:]):
                raise ValueError(f"unknown chi entry {key!r}")
            chi[_AXES.index(key[4]), _AXES.index(key[5])] = value
        return cls(eps=eps, mu=mu, chi=chi, chi_max=chi_max)

    @property
    def chi_yz(self) -> float:
        return float(self.chi[1, 2])

    @property
    def chi_zy(self) -> float:
        return float(self.chi[2, 1])

    @property
    def index(self) -> float:
        """Refractive index sqrt(eps mu)."""
        return float(np.sqrt(self.eps * self.mu))

    def replace(self, **changes) -> "MaterialParams":
        """Copy with some scalar fields or ``chi_ij`` entries changed."""
        chi = np.array(self.chi)
        kwargs = {"eps": self.eps, "mu": self.mu, "chi_max": self.chi_max}
        for key, value in changes.items():
            if key.startswith("chi_") and len(key) == 6:
                chi[_AXES.index(key[4]), _AXES.index(key[5])] = value
            elif key == "chi":
                chi = np.array(value, dtype=float)
            else:
                kwargs[key] = value
        return MaterialParams(chi=chi, **kwargs)


def d_from_eb(E, B, m: MaterialParams) -> np.ndarray:
    """Displacement field ``D = eps E + chi B``."""
    E = np.asarray(E)
    B = np.asarray(B)
    return m.eps * E + np.einsum("ik,...k->...i", m.chi, B)


def h_from_eb(E, B, m: MaterialParams) -> np.ndarray:
    """Magnetic field ``H = -chi^T E + B / mu``; note the transpose."""
    E = np.asarray(E)
    B = np.asarray(B)
    return -np.einsum("ki,...k->...i", m.chi, E) + B / m.mu


def invert_constitutive(D, H, m: MaterialParams):
    """Recover ``(E, B)`` from ``(D, H)`` to first order in chi.

    Returns
    -------
    E, B : ndarray
        ``E = (D - mu chi H) / eps`` and ``B = mu (H + chi^T D / eps)``.
        The round trip through :func:`d_from_eb` and :func:`h_from_eb`
        is exact only up to terms of order chi**2.
    """
    D = np.asarray(D)
    H = np.asarray(H)
    E = (D - m.mu * np.einsum("ik,...k->...i", m.chi, H)) / m.eps
    B = m.mu * (H + np.einsum("ki,...k->...i", m.chi, D) / m.eps)
    return E, B


@dataclass(frozen=True)
class FieldState:
    """Field vectors at one spacetime point.

    Only ``E`` and ``B`` are supplied; ``D`` and ``H`` are always derived
    from them through the medium, so the four can never disagree.
    Complex arrays denote monochromatic amplitudes, real arrays
    instantaneous values.
    """

    E: np.ndarray
    B: np.ndarray
    material: MaterialParams
    D: np.ndarray = field(init=False, repr=False)
    H: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        E = np.array(self.E, copy=True)
        B = np.array(self.B, copy=True)
        if E.shape != (3,) or B.shape != (3,):
            raise ValueError("E and B must be 3-vectors")
        D = d_from_eb(E, B, self.material)
        H = h_from_eb(E, B, self.material)
        for name, value in (("E", E), ("B", B), ("D", D), ("H", H)):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(self.E) or np.iscomplexobj(self.B))

    def real_part(self) -> "FieldState":
        return FieldState(self.E.real, self.B.real, self.material)
