"""Analytic test fields and the field-spec mini language.

A field on the affine Grassmannian G(p, n) is evaluated in batches:
``field.evaluate(B, x)`` takes bases ``B`` of shape ``(N, n, p)`` and fiber
points ``x`` of shape ``(N, n)`` (each ``x[i]`` orthogonal to ``B[i]``) and
returns ``N`` values.  Catalog fields additionally carry a compact numeric
descriptor (``kernel``) that the compiled quadrature loops in
:mod:`grassradon._kernels` understand; generic fields fall back to NumPy.

Field-spec grammar::

    spec   := ident '(' params? ')'
    params := kv (',' kv)*
    kv     := ident '=' float

Whitespace is insignificant.  Error positions are 0-based character offsets.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import BadRadii, DomainMismatch, ParseError, UnknownField, UnknownParam, UnsupportedCase
from .geometry import AffinePlane, FlagPoint

SUPPORTED_PN = {(0, 2), (0, 3), (1, 4), (2, 4), (1, 3)}

# kernel term codes shared with _kernels.py
K_GAUSS, K_SHELL, K_BALL = 1, 2, 3
PARAM_WIDTH = 2 + 16  # scale/flag + up to a 4x4 matrix


# ---------------------------------------------------------------------------
# ScalarField
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScalarField:
    """An evaluatable function on one of the package's domains.

    Attributes
    ----------
    domain : str
        ``"affine"`` (G(p,n)), ``"flag"`` (flag manifold times R),
        ``"grassmannian"`` (compact G_{p,n}) or ``"sphere"``.
    p, n : int
        Plane dimension and ambient dimension.
    evaluator : callable
        Batched evaluator; signature depends on ``domain``:
        affine ``(B, x)``, flag ``(B, omega, r)``, grassmannian ``(B,)``,
        sphere ``(omega,)``.
    smoothness : str
        ``"schwartz"``, ``"compact"`` or ``"generic"``.
    radius : float or None
        Support radius when ``smoothness == "compact"``.
    kernel : tuple or None
        ``(codes, coefs, params)`` descriptor for compiled evaluation.
    source : tuple or None
        ``("radon", f, cfg, truncation)`` when the field is a Radon image;
        lets downstream quadrature fuse the nested integrals.
    even : bool
        For flag fields: ``F(σ,-ω,-r) = F(σ,ω,r)`` holds by construction.
    """

    domain: str
    p: int
    n: int
    evaluator: Callable
    smoothness: str = "generic"
    radius: float | None = None
    kernel: tuple | None = None
    source: tuple | None = None
    label: str = "field"
    even: bool = False
    peak: float | None = None

    # -- evaluation --------------------------------------------------------
    def evaluate(self, *args) -> np.ndarray:
        return np.asarray(self.evaluator(*args))

    def __call__(self, point, *rest):
        """Evaluate at a single :class:`AffinePlane`, or ``(FlagPoint, r)``."""
        if self.domain == "affine":
            if not isinstance(point, AffinePlane):
                raise DomainMismatch("affine fields are evaluated at AffinePlane points")
            if point.dim != self.p or point.subspace.ambient_dim != self.n:
                raise DomainMismatch(f"plane of dim {point.dim} in R^{point.subspace.ambient_dim} "
                                     f"does not belong to G({self.p},{self.n})")
            return self.evaluate(point.subspace.basis[None], point.offset[None])[0]
        if self.domain == "flag":
            if not isinstance(point, FlagPoint):
                raise DomainMismatch("flag fields are evaluated at FlagPoint points")
            r = rest[0] if rest else 0.0
            return self.evaluate(point.subspace.basis[None], point.direction[None], np.atleast_1d(r))[0]
        return self.evaluate(np.asarray(point)[None])[0]

    # -- algebra -----------------------------------------------------------
    def _check_compatible(self, other: "ScalarField"):
        if (self.domain, self.p, self.n) != (other.domain, other.p, other.n):
            raise DomainMismatch("fields live on different domains")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self._check_compatible(other)
        fa, fb = self.evaluator, other.evaluator
        kern = _kernel_concat(self.kernel, other.kernel)
        if "generic" in (self.smoothness, other.smoothness):
            sm, rad = "generic", None
        elif "schwartz" in (self.smoothness, other.smoothness):
            sm, rad = "schwartz", None
        else:
            sm, rad = "compact", max(self.radius, other.radius)
        return ScalarField(self.domain, self.p, self.n, lambda *a: fa(*a) + fb(*a), sm, rad, kern,
                           None, f"({self.label} + {other.label})", self.even and other.even)

    def scaled(self, a: float) -> "ScalarField":
        fa = self.evaluator
        kern = None
        if self.kernel is not None:
            codes, coefs, prm = self.kernel
            kern = (codes, coefs * float(a), prm)
        src = None
        if self.source is not None and self.source[0] == "radon":
            src = ("radon", self.source[1].scaled(a), self.source[2], self.source[3])
        return replace(self, evaluator=lambda *args: a * fa(*args), kernel=kern, source=src,
                       label=f"{a}*{self.label}", peak=None if self.peak is None else abs(a) * self.peak)

    def __rmul__(self, a: float) -> "ScalarField":
        return self.scaled(a)

    def truncated(self, radius: float) -> "ScalarField":
        """Multiply by the indicator of fiber distance ``<= radius``."""
        if self.domain != "affine":
            raise DomainMismatch("truncation applies to fields on affine Grassmannians")
        fa = self.evaluator

        def ev(B, x):
            x = np.asarray(x)
            vals = np.asarray(fa(B, x))
            return np.where(np.sum(x * x, axis=-1) <= radius * radius, vals, 0.0)

        rad = radius if self.radius is None else min(radius, self.radius)
        src = None
        if self.source is not None and self.source[0] == "radon":
            old = self.source[3]
            src = ("radon", self.source[1], self.source[2], radius if old is None else min(old, radius))
        return ScalarField("affine", self.p, self.n, ev, "compact", rad, None, src,
                           f"{self.label}|<= {radius}", peak=self.peak)


def _kernel_concat(a, b):
    if a is None or b is None:
        return None
    return (np.concatenate([a[0], b[0]]), np.concatenate([a[1], b[1]]), np.vstack([a[2], b[2]]))


def zero_field(p: int, n: int, domain: str = "affine") -> ScalarField:
    """The identically zero field on any domain."""
    def ev(*args):
        lead = np.asarray(args[0]).shape[0]
        return np.zeros(lead)

    kern = (np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros((0, PARAM_WIDTH)))
    return ScalarField(domain, p, n, ev, "compact", 0.0, kern if domain == "affine" else None,
                       None, "zero", even=True, peak=0.0)


# ---------------------------------------------------------------------------
# Catalog profiles (NumPy side; the compiled twins live in _kernels.py)
# ---------------------------------------------------------------------------

def bump_profile(t: np.ndarray) -> np.ndarray:
    """``exp(1 - 1/(1-t²))`` for ``|t| < 1`` and exactly 0 elsewhere; peak 1 at t=0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = np.abs(t) < 1.0
    tm = t[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - tm * tm))
    return out


def shell_profile(r: np.ndarray, r0: float, r1: float) -> np.ndarray:
    """Bump in the radius, nonzero only on ``r0 < r < r1``, value 1 at the midpoint."""
    r = np.asarray(r, dtype=float)
    mid, half = 0.5 * (r0 + r1), 0.5 * (r1 - r0)
    out = bump_profile((r - mid) / half)
    return np.where((r > r0) & (r < r1), out, 0.0)


def _angular_factor(B: np.ndarray, A: np.ndarray | None) -> np.ndarray:
    if A is None:
        return 1.0
    u = B[..., 0]
    return np.einsum("...i,ij,...j->...", u, A, u)


def gaussian_field(p: int, n: int, angular: "FieldSpec | None" = None, scale: float = 1.0) -> ScalarField:
    """``f(σ, x) = g(σ) exp(-‖x‖²/scale²)``.

    ``angular`` is ``constant()`` (default) or ``quadratic(a11=..., a12=...)``
    giving ``g(σ) = <u, A u>`` for the unit direction ``u`` of a line ``σ``;
    since ``g(-u) = g(u)`` the value is well defined on lines.
    """
    if (p, n) not in SUPPORTED_PN:
        raise UnsupportedCase(f"gaussian field on G({p},{n}) is not in the supported set")
    A = None
    if angular is not None and angular.name != "constant":
        if angular.name != "quadratic":
            raise UnknownField(f"unknown angular factor {angular.name!r}")
        if p != 1:
            raise UnsupportedCase("quadratic angular factors need p = 1 (line directions)")
        A = _quadratic_matrix(angular, n)
    prm = np.zeros(PARAM_WIDTH)
    prm[0] = scale
    if A is not None:
        prm[1] = 1.0
        prm[2:2 + n * n] = A.ravel()
    s2 = scale * scale

    def ev(B, x):
        x = np.asarray(x, dtype=float)
        return _angular_factor(np.asarray(B, dtype=float), A) * np.exp(-np.sum(x * x, axis=-1) / s2)

    peak = 1.0 if A is None else float(np.max(np.abs(np.linalg.eigvalsh(A))))
    kern = (np.array([K_GAUSS], dtype=np.int64), np.ones(1), prm[None, :])
    label = f"gaussian(scale={scale})" if A is None else f"gaussian(scale={scale})*{angular.render()}"
    return ScalarField("affine", p, n, ev, "schwartz", None, kern, None, label, peak=peak)


def _quadratic_matrix(spec: "FieldSpec", n: int) -> np.ndarray:
    A = np.zeros((n, n))
    for key, val in spec.params:
        m = re.fullmatch(r"a([1-9])([1-9])", key)
        if not m:
            raise UnknownParam(f"quadratic() has no parameter {key!r}")
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        if i >= n or j >= n:
            raise UnknownParam(f"{key} exceeds dimension {n}")
        A[i, j] = A[j, i] = val
    return A


def shell_bump_field(p: int, n: int, r0: float, r1: float) -> ScalarField:
    """Smooth bump in the fiber radius supported on ``r0 < ‖x‖ < r1``."""
    if not (0 <= r0 < r1) or not (math.isfinite(r0) and math.isfinite(r1)):
        raise BadRadii(f"need 0 <= r0 < r1, got r0={r0}, r1={r1}")
    if (p, n) not in SUPPORTED_PN:
        raise UnsupportedCase(f"shell bump on G({p},{n}) is not in the supported set")
    prm = np.zeros(PARAM_WIDTH)
    prm[0], prm[1] = r0, r1

    def ev(B, x):
        x = np.asarray(x, dtype=float)
        return shell_profile(np.sqrt(np.sum(x * x, axis=-1)), r0, r1)

    kern = (np.array([K_SHELL], dtype=np.int64), np.ones(1), prm[None, :])
    return ScalarField("affine", p, n, ev, "compact", float(r1), kern, None,
                       f"shell_bump(r0={r0},r1={r1})", peak=1.0)


def ball_bump_field(n: int, radius: float, center=None) -> ScalarField:
    """Point field ``x ↦ bump(‖x - c‖/radius)`` on R^n (the p = 0 case)."""
    if not radius > 0:
        raise BadRadii("radius must be positive")
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)[:n]
    if c.shape != (n,):
        raise DomainMismatch("center has the wrong length")
    prm = np.zeros(PARAM_WIDTH)
    prm[0] = radius
    prm[1:1 + n] = c

    def ev(B, x):
        d = np.asarray(x, dtype=float) - c
        return bump_profile(np.sqrt(np.sum(d * d, axis=-1)) / radius)

    kern = (np.array([K_BALL], dtype=np.int64), np.ones(1), prm[None, :])
    return ScalarField("affine", 0, n, ev, "compact", float(np.linalg.norm(c) + radius), kern, None,
                       f"ball_bump(radius={radius},center={tuple(c.tolist())})", peak=1.0)


# ---------------------------------------------------------------------------
# Field specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    name: str
    params: tuple[tuple[str, float], ...] = field(default_factory=tuple)

    def get(self, key: str, default: float | None = None) -> float | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def render(self) -> str:
        inner = ",".join(f"{k}={v!r}" for k, v in self.params)
        return f"{self.name}({inner})"


# name -> (allowed params, required params)
CATALOG: dict[str, tuple[frozenset, frozenset]] = {
    "zero": (frozenset(), frozenset()),
    "gaussian": (frozenset({"scale"}), frozenset()),
    "shell_bump": (frozenset({"r0", "r1"}), frozenset({"r0", "r1"})),
    "ball_bump": (frozenset({"radius", "cx", "cy", "cz", "cw"}), frozenset()),
    "constant": (frozenset(), frozenset()),
    "quadratic": (frozenset(f"a{i}{j}" for i in range(1, 5) for j in range(1, 5)), frozenset()),
}

_FLOAT_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def match(self, regex: re.Pattern, what: str) -> str:
        self.skip()
        m = regex.match(self.text, self.pos)
        if not m or m.end() == self.pos:
            raise ParseError(f"expected {what}", self.pos, what)
        self.pos = m.end()
        return m.group(0)

    def expect(self, ch: str):
        self.skip()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise ParseError(f"expected {ch!r}", self.pos, repr(ch))
        self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""


def parse_field_spec(text: str, validate: bool = True) -> FieldSpec:
    """Parse ``name(key=value, ...)`` into a :class:`FieldSpec`.

    With ``validate=False`` only the grammar is checked, so the same syntax
    can describe other catalogs (the excluded domains of the support module).

    Raises
    ------
    ParseError
        Malformed text; ``position`` is the 0-based offset of the problem.
    UnknownField, UnknownParam
        Well-formed text naming something outside the catalog.
    """
    sc = _Scanner(text)
    name = sc.match(_IDENT_RE, "identifier")
    sc.expect("(")
    params: list[tuple[str, float]] = []
    if sc.peek() != ")":
        while True:
            key = sc.match(_IDENT_RE, "parameter name")
            sc.expect("=")
            val = sc.match(_FLOAT_RE, "number")
            params.append((key, float(val)))
            if sc.peek() == ",":
                sc.expect(",")
                continue
            break
    sc.expect(")")
    sc.skip()
    if sc.pos != len(text):
        raise ParseError("trailing characters", sc.pos, "end of input")
    spec = FieldSpec(name, tuple(params))
    if validate:
        validate_spec(spec)
    return spec


def validate_spec(spec: FieldSpec) -> None:
    if spec.name not in CATALOG:
        raise UnknownField(f"unknown field {spec.name!r}; catalog: {sorted(CATALOG)}")
    allowed, required = CATALOG[spec.name]
    keys = [k for k, _ in spec.params]
    for k in keys:
        if k not in allowed:
            raise UnknownParam(f"{spec.name}() has no parameter {k!r}")
    if len(set(keys)) != len(keys):
        raise UnknownParam(f"duplicate parameter in {spec.render()}")
    missing = required - set(keys)
    if missing:
        raise UnknownParam(f"{spec.name}() requires {sorted(missing)}")


def build_field(spec: FieldSpec | str, p: int, n: int, angular: FieldSpec | None = None) -> ScalarField:
    """Instantiate a catalog field on G(p, n)."""
    if isinstance(spec, str):
        spec = parse_field_spec(spec)
    validate_spec(spec)
    if spec.name == "zero":
        return zero_field(p, n)
    if spec.name == "gaussian":
        return gaussian_field(p, n, angular, scale=spec.get("scale", 1.0))
    if spec.name == "shell_bump":
        return shell_bump_field(p, n, spec.get("r0"), spec.get("r1"))
    if spec.name == "ball_bump":
        if p != 0:
            raise UnsupportedCase("ball_bump is a point field (p = 0)")
        c = [spec.get(k, 0.0) for k in ("cx", "cy", "cz", "cw")][:n]
        return ball_bump_field(n, spec.get("radius", 1.0), c)
    raise UnknownField(f"{spec.name!r} is an angular factor, not a field")
