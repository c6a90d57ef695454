"""Named parameter sets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .model import FieldMode, SystemParams

#: Largest mean photon number kept below saturation of the Rb-87 D1 transitions.
RB87_N_BAR_MAX = 345.0
#: Rb-87 D1 decay rate, 2*pi x 5.75 MHz, in rad/s.
RB87_GAMMA = 2.0 * math.pi * 5.75e6


class UnknownPreset(KeyError):
    pass


class SaturationWarning(UserWarning):
    """The requested pump intensity exceeds the preset's saturation limit."""


@dataclass(frozen=True)
class Preset:
    name: str
    params: SystemParams
    units: str
    description: str
    n_bar_max: float | None = None

    def check_n_bar(self, n_bar: float) -> None:
        if self.n_bar_max is not None and n_bar > self.n_bar_max:
            warnings.warn(
                f"n_bar = {n_bar:g} exceeds the saturation limit {self.n_bar_max:g} of preset {self.name!r}",
                SaturationWarning,
                stacklevel=2,
            )


PRESETS = {
    p.name: p
    for p in (
        Preset(
            name="symmetric-dimensionless",
            params=SystemParams(gamma_a_iso=1.0, gamma_b_iso=1.0, p=0.0, delta=0.1, n_bar=100.0),
            units="dimensionless",
            description="gamma_a = gamma_b = 1, p = 0, polarized pump",
        ),
        Preset(
            name="asymmetric-10",
            params=SystemParams(gamma_a_iso=10.0, gamma_b_iso=1.0, p=0.0, delta=0.55, n_bar=100.0),
            units="dimensionless",
            description="gamma_a = 10 gamma_b, p = 0, polarized pump",
        ),
        Preset(
            name="rb87-d1",
            params=SystemParams(
                gamma_a_iso=RB87_GAMMA,
                gamma_b_iso=RB87_GAMMA,
                p=0.0,
                delta=0.1 * RB87_GAMMA,
                n_bar=100.0,
                field_mode=FieldMode.POLARIZED,
            ),
            units="SI",
            description="Rb-87 D1 line, |F=1,m=0> ground and |F'=1,m=-1/+1> excited, x-polarized broadband pump",
            n_bar_max=RB87_N_BAR_MAX,
        ),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None


def preset(name: str) -> SystemParams:
    """Parameter set of the named preset."""
    return get_preset(name).params
