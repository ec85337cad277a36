"""Real-analytic potentials on the circle.

A ``TrigPotential`` stores Fourier coefficients v_k for |k| <= d in natural
order, i.e. ``coeffs[k + d]`` is v_k. Evaluation is always
``sum_k v_k exp(2 pi i k z)`` and accepts complex arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

REALITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TrigPotential:
    coeffs: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).copy()
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coeffs must have odd length 2d+1")
        d = c.size // 2
        mismatch = np.max(np.abs(c - np.conj(c[::-1]))) if c.size else 0.0
        if mismatch > REALITY_TOL * max(1.0, np.max(np.abs(c))):
            raise ValueError("coefficients violate v_{-k} = conj(v_k)")
        # trailing zeros would make the degree (and the dual dimension) lie
        while d > 0 and abs(c[0]) == 0 and abs(c[-1]) == 0:
            c = c[1:-1]
            d -= 1
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size // 2

    def coeff(self, k: int) -> complex:
        d = self.degree
        if abs(k) > d:
            return 0j
        return complex(self.coeffs[k + d])

    @property
    def is_even(self) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= REALITY_TOL))

    def __call__(self, z):
        return evaluate(self, z)

    def __eq__(self, other):
        return isinstance(other, TrigPotential) and np.array_equal(
            self.coeffs, other.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def shifted(self, t: float) -> "TrigPotential":
        """Potential theta -> v(theta + t)."""
        d = self.degree
        k = np.arange(-d, d + 1)
        return TrigPotential(self.coeffs * np.exp(2j * np.pi * k * t), self.name)

    def to_spec(self) -> dict:
        d = self.degree
        rows = [
            [k, float(self.coeffs[k + d].real), float(self.coeffs[k + d].imag)]
            for k in range(-d, d + 1)
            if self.coeffs[k + d] != 0
        ]
        return {"type": "trig", "coeffs": rows}


@dataclass(frozen=True)
class AnalyticPotential:
    """Potential given by a coefficient rule k -> v_k with |v_k| <= C e^{-2 pi h1 |k|}."""

    coeff_generator: Callable[[int], complex]
    decay_rate: float
    name: str = ""
    spec: dict = field(default=None, compare=False)

    def coeff(self, k: int) -> complex:
        return complex(self.coeff_generator(k))

    def truncation_degree(self, im_part: float = 0.0, tol: float = 1e-16) -> int:
        """Degree beyond which the tail is below ``tol`` on |Im z| <= im_part."""
        rate = 2 * math.pi * (self.decay_rate - abs(im_part))
        if rate <= 0:
            raise ValueError("evaluation point outside the analyticity strip")
        scale = max(abs(self.coeff(0)), abs(self.coeff(1)), 1.0)
        return max(1, int(math.ceil(math.log(scale / tol) / rate)) + 2)

    def __call__(self, z):
        z = np.asarray(z)
        n = self.truncation_degree(float(np.max(np.abs(np.imag(z)), initial=0.0)))
        return evaluate(truncate(self, n), z)

    def to_spec(self) -> dict:
        return dict(self.spec) if self.spec else {"type": "analytic"}


def evaluate(v: TrigPotential, z):
    """sum_k v_k exp(2 pi i k z) for scalar or array ``z``."""
    z = np.asarray(z)
    d = v.degree
    out = np.full(z.shape, v.coeffs[d], dtype=complex)
    if d == 0:
        return out if out.ndim else complex(out)
    w = np.exp(2j * np.pi * z)
    wk = np.ones_like(w, dtype=complex)
    winv = 1.0 / w
    wmk = np.ones_like(w, dtype=complex)
    for k in range(1, d + 1):
        wk = wk * w
        wmk = wmk * winv
        out = out + v.coeffs[d + k] * wk + v.coeffs[d - k] * wmk
    return out if out.ndim else complex(out)


def truncate(v, n: int) -> TrigPotential:
    """Degree-``n`` trigonometric truncation (identity for short polynomials)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(v, TrigPotential):
        if n >= v.degree:
            return v
        d = v.degree
        return TrigPotential(v.coeffs[d - n : d + n + 1], v.name)
    coeffs = np.array([v.coeff(k) for k in range(-n, n + 1)])
    # enforce exact reality on the sampled rule
    coeffs = 0.5 * (coeffs + np.conj(coeffs[::-1]))
    return TrigPotential(coeffs, f"{v.name}|n={n}" if v.name else "")


def strip_norm(v: TrigPotential, h: float, tol: float = 1e-10) -> float:
    """sup over theta of |v(theta +- i h)|.

    A uniform grid is doubled until the sup stabilises, then each grid
    maximum is polished with a bounded scalar search.
    """
    if h < 0:
        raise ValueError("h must be non-negative")
    if v.degree == 0:
        return abs(v.coeffs[0])

    def neg_abs(t, s):
        return -abs(evaluate(v, t + 1j * s * h))

    def grid_sup(n):
        t = np.arange(n) / n
        vals = np.maximum(np.abs(evaluate(v, t + 1j * h)), np.abs(evaluate(v, t - 1j * h)))
        return vals, t

    n = 64 * max(1, v.degree)
    prev = None
    while True:
        vals, t = grid_sup(n)
        best = float(vals.max())
        if prev is not None and abs(best - prev) < tol:
            break
        prev = best
        n *= 2
        if n > 2**20:
            break
    dt = 1.0 / n
    for s in (1.0, -1.0):
        vals = np.abs(evaluate(v, t + 1j * s * h))
        for i in np.argsort(vals)[-4:]:
            res = optimize.minimize_scalar(
                neg_abs, bounds=(t[i] - dt, t[i] + dt), args=(s,), method="bounded",
                options={"xatol": 1e-12},
            )
            best = max(best, -float(res.fun))
    return best


# -- stock potentials -------------------------------------------------------


def trig_from_terms(cos_terms=None, sin_terms=None, const: float = 0.0, name=""):
    """Build sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x) + const."""
    cos_terms = dict(cos_terms or {})
    sin_terms = dict(sin_terms or {})
    d = max([0, *cos_terms, *sin_terms])
    c = np.zeros(2 * d + 1, dtype=complex)
    c[d] = const
    for k, a in cos_terms.items():
        c[d + k] += a / 2
        c[d - k] += a / 2
    for k, b in sin_terms.items():
        c[d + k] += b / 2j
        c[d - k] -= b / 2j
    return TrigPotential(c, name)


def amo(lam: float) -> TrigPotential:
    """Almost Mathieu potential 2 lam cos(2 pi x)."""
    return trig_from_terms({1: 2.0 * lam}, name=f"amo(lam={lam})")


def free() -> TrigPotential:
    return TrigPotential(np.zeros(1), "free")


def perturbed_amo(lam: float, delta: float, f: TrigPotential) -> TrigPotential:
    """2 lam cos(2 pi x) + delta f(x)."""
    base = amo(lam)
    d = max(base.degree, f.degree)
    c = np.zeros(2 * d + 1, dtype=complex)
    c[d - 1 : d + 2] += base.coeffs
    c[d - f.degree : d + f.degree + 1] += delta * f.coeffs
    return TrigPotential(c, f"amo(lam={lam})+{delta}*{f.name or 'f'}")


def non_even_example() -> TrigPotential:
    """2 cos(2 pi x) + 0.3 sin(4 pi x)."""
    return trig_from_terms({1: 2.0}, {2: 0.3}, name="2cos+0.3sin2")


def stock_non_even_d2() -> TrigPotential:
    """Supercritical non-even degree-2 test potential.

    4 cos(2 pi x) + 0.6 cos(4 pi x) + 0.3 sin(4 pi x): a perturbation of the
    almost Mathieu operator at coupling 2, hence of type I, with v_2 complex.
    """
    return trig_from_terms({1: 4.0, 2: 0.6}, {2: 0.3}, name="stock_d2")


def geometric(lam: float = 2.0, ratio: float = 0.5) -> AnalyticPotential:
    """v_k = lam * ratio^|k| (all k), decaying at h1 = -ln(ratio) / 2 pi."""
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    return AnalyticPotential(
        coeff_generator=lambda k: lam * ratio ** abs(k),
        decay_rate=-math.log(ratio) / (2 * math.pi),
        name=f"geometric(lam={lam},ratio={ratio})",
        spec={"type": "analytic", "family": "geometric", "lambda": lam, "ratio": ratio},
    )


def from_spec(spec: dict):
    """Potential from its JSON description (see ``to_spec``)."""
    from .errors import ConfigError

    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("potential: expected an object with key 'type'")
    kind = spec["type"]
    if kind == "trig":
        allowed = {"type", "coeffs"}
        extra = set(spec) - allowed
        if extra:
            raise ConfigError(f"potential: unknown key(s) {sorted(extra)}")
        rows = spec.get("coeffs")
        if not isinstance(rows, list) or not rows:
            raise ConfigError("potential.coeffs: expected a non-empty list of [k, re, im]")
        try:
            d = max(abs(int(r[0])) for r in rows)
            c = np.zeros(2 * d + 1, dtype=complex)
            for k, re, im in rows:
                c[int(k) + d] += complex(float(re), float(im))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"potential.coeffs: malformed entry ({exc})") from exc
        try:
            return TrigPotential(c)
        except ValueError as exc:
            raise ConfigError(f"potential.coeffs: {exc}") from exc
    if kind == "analytic":
        allowed = {"type", "family", "lambda", "ratio"}
        extra = set(spec) - allowed
        if extra:
            raise ConfigError(f"potential: unknown key(s) {sorted(extra)}")
        if spec.get("family") != "geometric":
            raise ConfigError("potential.family: only 'geometric' is supported")
        try:
            return geometric(float(spec["lambda"]), float(spec["ratio"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"potential.lambda/ratio: {exc}") from exc
    if kind == "amo":
        extra = set(spec) - {"type", "lambda"}
        if extra:
            raise ConfigError(f"potential: unknown key(s) {sorted(extra)}")
        try:
            return amo(float(spec.get("lambda", 1.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"potential.lambda: {exc}") from exc
    named = {"free": free, "stock_d2": stock_non_even_d2, "non_even": non_even_example}
    if kind in named:
        if set(spec) != {"type"}:
            raise ConfigError(f"potential: unknown key(s) {sorted(set(spec) - {'type'})}")
        return named[kind]()
    raise ConfigError(f"potential.type: unknown value {kind!r}")
