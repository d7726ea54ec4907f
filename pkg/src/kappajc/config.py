"""Run configuration: INI file plus command-line overrides.

Sections and keys (all optional)::

    [model]     m, c, hbar, omega | xi, epsilon, s, branch, convention
    [numerics]  n_max, margin, method, seed
    [initial]   kind (coherent|fock), n, mean
    [time]      t_max, n_points
    [run]       out

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .dynamics import METHODS, InitialState
from .errors import ValidationError
from .params import BRANCHES, CONVENTIONS, DEFAULT_EPSILON, ModelParams

SECTIONS = {
    "model": ("m", "c", "hbar", "omega", "xi", "epsilon", "s", "branch", "convention"),
    "numerics": ("n_max", "margin", "method", "seed"),
    "initial": ("kind", "n", "mean"),
    "time": ("t_max", "n_points"),
    "run": ("out",),
}
# INI key -> RunConfig field where they differ
_FIELD = {"kind": "initial_kind", "n": "initial_n"}


@dataclass(frozen=True)
class RunConfig:
    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    omega: float | None = None
    xi: float | None = None
    epsilon: float = DEFAULT_EPSILON
    s: int = 1
    branch: str = "jc"
    convention: str = "consistent"
    n_max: int | None = None
    margin: int = 10
    method: str = "numeric"
    seed: int = 0
    initial_kind: str = "coherent"
    initial_n: int = 5
    mean: float = 25.0
    t_max: float | None = None
    n_points: int | None = None
    out: str = "kappajc_out"

    def __post_init__(self):
        if self.omega is not None and self.xi is not None:
            raise ValidationError("give either omega or xi, not both")
        if self.branch not in BRANCHES:
            raise ValidationError(f"branch must be one of {BRANCHES}")
        if self.convention not in CONVENTIONS:
            raise ValidationError(f"convention must be one of {CONVENTIONS}")
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}")
        if self.margin < 0:
            raise ValidationError(f"margin must be >= 0, got {self.margin}")
        if self.n_max is not None and self.n_max < self.margin + 3:
            raise ValidationError(
                f"n_max={self.n_max} leaves no interior levels with margin {self.margin}; need n_max >= {self.margin + 3}"
            )
        if self.t_max is not None and not self.t_max > 0:
            raise ValidationError(f"t_max must be > 0, got {self.t_max}")
        if self.n_points is not None and self.n_points < 2:
            raise ValidationError(f"n_points must be >= 2, got {self.n_points}")
        self.params()
        self.initial()

    def params(self) -> ModelParams:
        kw = dict(m=self.m, c=self.c, hbar=self.hbar, epsilon=self.epsilon, s=self.s, branch=self.branch, convention=self.convention)
        try:
            if self.xi is not None:
                return ModelParams.from_xi(self.xi, **kw)
            return ModelParams(omega=1.0 if self.omega is None else self.omega, **kw)
        except (TypeError, ValueError) as exc:
            raise ValidationError(str(exc)) from exc

    def initial(self) -> InitialState:
        if self.initial_kind == "fock":
            return InitialState.fock(self.initial_n)
        return InitialState(self.initial_kind, mean=self.mean)

    def with_(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValidationError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_ini(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ValidationError(f"cannot parse {path}: {exc}") from exc
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for section in parser.sections():
            if section not in SECTIONS:
                raise ValidationError(f"unknown section [{section}] in {path}")
            for key, raw in parser[section].items():
                if key not in SECTIONS[section]:
                    raise ValidationError(f"unknown key {key!r} in section [{section}]")
                name = _FIELD.get(key, key)
                values[name] = _coerce(raw, types[name], key)
        return cls(**values)

    def to_ini(self) -> str:
        lines = []
        data = self.to_dict()
        for section, keys in SECTIONS.items():
            lines.append(f"[{section}]")
            for key in keys:
                value = data[_FIELD.get(key, key)]
                if value is not None:
                    lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
            lines.append("")
        return "\n".join(lines)

    def write_ini(self, path) -> None:
        Path(path).write_text(self.to_ini(), encoding="utf-8")


def _coerce(raw: str, annotation: str, key: str):
    raw = raw.strip()
    try:
        if "int" in annotation:
            return int(raw)
        if "float" in annotation:
            return float(raw)
    except ValueError:
        raise ValidationError(f"bad value {raw!r} for {key!r}") from None
    return raw
