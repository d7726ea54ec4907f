"""Physical parameters of the (kappa-deformed) JC / AJC models."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

from .errors import ValidationError

BRANCHES = ("jc", "ajc")
CONVENTIONS = ("consistent", "printed")

DEFAULT_EPSILON = 5e-4


@dataclass(frozen=True)
class ModelParams:
    """Constants, deformation and convention flags; derived couplings.

    ``branch`` selects the JC (``"jc"``) or AJC (``"ajc"``) tower.
    ``convention`` fixes the sign of the identity term ``C (2N + 1)``:
    ``"consistent"`` uses ``C = -2 mc^2 eps xi`` (reproduces the closed-form
    deformed spectrum), ``"printed"`` uses ``C = +2 mc^2 eps xi``.
    """

    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    s: int = 1
    branch: str = "jc"
    convention: str = "consistent"

    def __post_init__(self):
        for name in ("m", "c", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {value!r}")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise ValidationError(f"omega must be >= 0, got {self.omega!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if self.s not in (1, -1):
            raise ValidationError(f"chirality s must be +1 or -1, got {self.s!r}")
        if self.branch not in BRANCHES:
            raise ValidationError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        if self.convention not in CONVENTIONS:
            raise ValidationError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")

    @classmethod
    def from_xi(cls, xi: float, **kwargs) -> "ModelParams":
        """Build parameters with ``omega`` chosen so that ``hbar omega / mc^2 = xi``."""
        m = kwargs.get("m", 1.0)
        c = kwargs.get("c", 1.0)
        hbar = kwargs.get("hbar", 1.0)
        return cls(omega=xi * m * c**2 / hbar, **kwargs)

    def with_(self, **changes) -> "ModelParams":
        if "xi" in changes:
            xi = changes.pop("xi")
            base = replace(self, **changes)
            return replace(base, omega=xi * base.rest_energy / base.hbar)
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

    @property
    def xi(self) -> float:
        """Relativistic parameter ``hbar omega / mc^2``."""
        return self.hbar * self.omega / self.rest_energy

    @property
    def g(self) -> complex:
        """Coupling ``2 i mc^2 sqrt(xi) / hbar`` (purely imaginary)."""
        return 2j * self.rest_energy * math.sqrt(self.xi) / self.hbar

    @property
    def delta(self) -> float:
        return self.rest_energy

    @property
    def sign(self) -> int:
        """+1 for the JC branch, -1 for AJC."""
        return 1 if self.branch == "jc" else -1

    @property
    def theta(self) -> int:
        """Heaviside branch factor: 1 for JC, 0 for AJC."""
        return 1 if self.branch == "jc" else 0

    @property
    def delta_eps(self) -> float:
        return (1 - self.sign * 2 * self.epsilon * self.xi) * self.delta

    @property
    def mu_plus(self) -> float:
        return 1 + self.epsilon

    @property
    def mu_minus(self) -> float:
        return 1 - self.epsilon

    @property
    def identity_coeff(self) -> float:
        """Coefficient ``C`` of ``(2N + 1)`` under the selected convention."""
        magnitude = 2 * self.rest_energy * self.epsilon * self.xi
        return -magnitude if self.convention == "consistent" else magnitude

    @property
    def kappa_epsilon(self) -> float:
        """Inverse deformation scale ``1/kappa`` implied by ``epsilon = mc^2 / (2 kappa)``."""
        return 2 * self.epsilon / self.rest_energy

    @property
    def mode_chirality(self) -> int:
        """Chirality label of the ladder operators entering the Hamiltonian."""
        return self.s if self.branch == "jc" else -self.s
