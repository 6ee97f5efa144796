"""Normalisation constants of the 4D critical problem."""

from dataclasses import dataclass
import math

__all__ = ["Constants", "CONSTANTS", "FRAK_c", "OMEGA", "FRAK_C", "C_REDUCED"]


@dataclass(frozen=True)
class Constants:
    """Bubble height, sphere measure and the derived reduced-system constant.

    ``frak_c`` is the height of the standard bubble, ``omega`` the measure of
    the unit sphere S^3, ``frak_C = 2 frak_c omega`` the coefficient of the
    regular part in the projected bubble and ``c_reduced`` the coefficient
    in front of the Robin function in the reduced equations.
    """

    frak_c: float = 2.0 * math.sqrt(2.0)
    omega: float = 2.0 * math.pi**2

    @property
    def frak_C(self) -> float:
        return 2.0 * self.frak_c * self.omega

    @property
    def c_reduced(self) -> float:
        return self.frak_C**2 / (self.omega * self.frak_c**2)

    def as_dict(self) -> dict:
        return {
            "frak_c": self.frak_c,
            "omega": self.omega,
            "frak_C": self.frak_C,
            "c_reduced": self.c_reduced,
        }


CONSTANTS = Constants()
FRAK_c = CONSTANTS.frak_c
OMEGA = CONSTANTS.omega
FRAK_C = CONSTANTS.frak_C
C_REDUCED = CONSTANTS.c_reduced
