# src/dlog_simulator/kernel/schemas.py
from fractions import Fraction

from mpmath import mpf
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dlog_simulator.numtheory import kappa


class PublicInstance(BaseModel):
    """The public part (m, ell, r) of an instance: all the solver may know."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=2, description="bit length of r")
    ell: int = Field(..., ge=0, description="padding length")
    r: int = Field(..., description="group order")

    @model_validator(mode="after")
    def _check_order(self):
        if not (2 ** (self.m - 1) <= self.r < 2**self.m):
            raise ValueError(f"r={self.r} is not an {self.m}-bit integer")
        return self

    @property
    def modulus(self) -> int:
        """2^(m + ell), the size of each control register."""
        return 1 << (self.m + self.ell)

    @property
    def kappa(self) -> int:
        return kappa(self.r)

    def fingerprint(self) -> dict:
        return {"m": self.m, "ell": self.ell, "r": self.r}


class ProblemInstance(PublicInstance):
    d: int = Field(..., ge=0, description="discrete logarithm")

    @model_validator(mode="after")
    def _check_logarithm(self):
        if self.d >= self.r:
            raise ValueError(f"d={self.d} must be smaller than r={self.r}")
        return self

    @property
    def public(self) -> PublicInstance:
        return PublicInstance(m=self.m, ell=self.ell, r=self.r)

    def fingerprint(self) -> dict:
        return {**super().fingerprint(), "d": self.d}


class FrequencyPair(BaseModel):
    """A measured output (j, k) of the two control registers."""

    model_config = ConfigDict(frozen=True)

    j: int = Field(..., ge=0)
    k: int = Field(..., ge=0)


class ArgumentPair(BaseModel):
    """Signed arguments alpha_d = {dj + k} and alpha_r = {rj} modulo 2^(m+ell)."""

    model_config = ConfigDict(frozen=True)

    alpha_d: int
    alpha_r: int

    def is_admissible(self, r: int) -> bool:
        return self.alpha_r % (1 << kappa(r)) == 0


class AnglePair(BaseModel):
    """Angles theta = 2 pi alpha / 2^(m+ell) in radians, extended precision."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta_d: mpf
    theta_r: mpf


class GoodnessDecomposition(BaseModel):
    """
    alpha_d = round(alpha_r d / r) + Delta, with
    delta_Delta = round(alpha_r d / r) - alpha_r d / r in [-1/2, 1/2).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    Delta: int
    delta_Delta: Fraction
