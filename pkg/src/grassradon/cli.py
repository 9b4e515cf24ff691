"""Command-line driver: ``grassradon <command> [options]``.

Commands
--------
forward      transform values on a plane grid
slice-check  projection-slice residuals on seeded probes
moments      forward moment identity and moment-condition fits
invert       equal-rank inversion round trip (grass14)
support      Paley–Wiener, truncation and hyperplane harnesses
funk-table   Funk multipliers ``P_l(0)`` for even ``l ≤ lmax``

Exit codes: 0 success or pass, 1 tolerance fail, 2 usage or parse error,
3 unsupported case, 4 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import re
import sys
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    DomainMismatch,
    GrassRadonError,
    NotCompactlySupported,
    ParseError,
    UnsupportedCase,
    UnsupportedDimension,
)
from .fields import ScalarField, build_field, parse_field_spec
from .geometry import (
    DEFAULT_SEED,
    complete_frame,
    make_rng,
    random_subspace,
    random_unit_in,
    sphere_rule,
)
from .harmonic import funk_table
from .range import InversionConfig, forward_moment_identity_residual, invert_equal_rank, range_membership_report
from .support import (
    DomainSpec,
    parse_domain,
    pw_condition_i,
    pw_condition_ii,
    support_theorem_I_harness,
    support_theorem_II_harness,
)
from .transforms import TransformConfig, radon_field, radon_many, slice_sides

CASES = {
    "classical2d": (0, 1, 2),
    "classical3d_planes": (0, 2, 3),
    "classical3d_lines": (0, 1, 3),
    "grass14": (1, 2, 4),
}

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_IO = 0, 1, 2, 3, 4

STREAM_CLI = 31

GRID_HELP = """\
grid and mode-argument syntax:
  comma-separated name=value pairs; a value is a number or a range
  start:end:count (count evenly spaced values including both ends).
  forward grids:
    classical2d         angles=K, offsets=RANGE      (normals at angle pi*j/K)
    classical3d_planes  order=K, offsets=RANGE       (normals from a sphere rule)
    classical3d_lines   order=K, azimuths=M, offsets=RANGE
    grass14             planes=K, offsets=RANGE      (seeded random 2-planes)
  support mode arguments:
    pw          R=, imax=, N=, kmax=     (N may be a range, e.g. N=0:2:3)
    truncate    R=, probes=
    hyperplane  domain=ball|band|two_caps, r=, a=, b=, count=
"""


class UsageError(Exception):
    """Bad command-line input that is not a field-spec parse error."""


# ---------------------------------------------------------------------------
# Mini-grammar for --grid and --mode-args
# ---------------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUM_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def parse_grid(text: str) -> dict:
    """Parse ``name=value,...`` where a value is a number, ``start:end:count`` or a word.

    Ranges become ``np.linspace`` arrays, plain numbers floats and words strings.

    Raises
    ------
    ParseError
        With the 0-based offset of the first offending character.
    """
    out: dict = {}
    pos = 0
    text = text.strip()
    if not text:
        return out
    while True:
        m = _NAME_RE.match(text, pos)
        if not m:
            raise ParseError("expected a name", pos, "identifier")
        name = m.group(0)
        pos = m.end()
        if pos >= len(text) or text[pos] != "=":
            raise ParseError("expected '='", pos, "'='")
        pos += 1
        m = _NAME_RE.match(text, pos)
        if m:
            out[name] = m.group(0)
            pos = m.end()
            parts = None
        else:
            parts = []
        while parts is not None:
            m = _NUM_RE.match(text, pos)
            if not m:
                raise ParseError("expected a number", pos, "number")
            parts.append(float(m.group(0)))
            pos = m.end()
            if pos < len(text) and text[pos] == ":":
                if len(parts) == 3:
                    raise ParseError("a range has at most three parts", pos, "',' or end of input")
                pos += 1
                continue
            break
        if parts is None:
            pass
        elif len(parts) == 1:
            out[name] = parts[0]
        elif len(parts) == 3:
            cnt = parts[2]
            if cnt != int(cnt) or cnt < 1:
                raise ParseError("range count must be a positive integer", pos - 1, "count")
            out[name] = np.linspace(parts[0], parts[1], int(cnt))
        else:
            raise ParseError("a range needs start:end:count", pos, "':'")
        if pos == len(text):
            return out
        if text[pos] != ",":
            raise ParseError("expected ',' or end of input", pos, "','")
        pos += 1


def _int_arg(args: dict, key: str, default: int, minimum: int = 1) -> int:
    v = args.get(key, default)
    if isinstance(v, (np.ndarray, str)) or v != int(v) or int(v) < minimum:
        raise UsageError(f"{key} must be an integer >= {minimum}")
    return int(v)


def _range_arg(args: dict, key: str, default) -> np.ndarray:
    v = args.get(key, default)
    if isinstance(v, str):
        raise UsageError(f"{key} must be a number or a range")
    return np.atleast_1d(np.asarray(v, dtype=float))


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    case: str = "grass14"
    field: str = "gaussian()"
    angular: str | None = None
    cfg: TransformConfig = TransformConfig()
    icfg: InversionConfig = InversionConfig()
    lmax: int = 16
    seed: int = DEFAULT_SEED
    output_path: str | None = None
    format: str = "csv"
    tol: float | None = None

    @property
    def pqn(self) -> tuple[int, int, int]:
        return CASES[self.case]

    def build(self) -> ScalarField:
        p, _, n = self.pqn
        ang = parse_field_spec(self.angular) if self.angular else None
        return build_field(self.field, p, n, ang)


_CFG_KEYS = {f.name: f.type for f in fields(TransformConfig)}
_ICFG_KEYS = {"profile_points", "omega_polar", "omega_azimuth", "fd_step", "s_points", "profile_radius",
              "diagnostic_probes", "inversion_mode"}


def read_config_file(path: str) -> dict:
    """Read flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = v
    return out


def _coerce(key: str, val: str):
    try:
        if key in ("fiber_points", "circle_points", "sphere_order", "lambda_points", "lmax", "profile_points",
                   "omega_polar", "omega_azimuth", "s_points", "diagnostic_probes"):
            return int(val)
        if key == "seed":
            return int(val, 0)
        if key in ("case", "field", "angular", "format", "inversion_mode"):
            return val
        return float(val)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {val!r}") from exc


def build_run_config(ns: argparse.Namespace) -> RunConfig:
    conf: dict = {}
    if ns.config:
        try:
            conf = {k: _coerce(k, v) for k, v in read_config_file(ns.config).items()}
        except OSError as exc:
            raise IOError(str(exc)) from exc
    for key in ("case", "field", "angular", "lmax", "seed", "format", "tol"):
        v = getattr(ns, key, None)
        if v is not None:
            conf[key] = v
    unknown = set(conf) - set(_CFG_KEYS) - _ICFG_KEYS - {"case", "field", "angular", "lmax", "seed", "format", "tol"}
    if unknown:
        raise UsageError(f"unknown configuration keys: {sorted(unknown)}")
    case = conf.get("case", "grass14")
    if case not in CASES:
        raise UsageError(f"unknown case {case!r}; choose from {sorted(CASES)}")
    fmt = conf.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    try:
        cfg = TransformConfig(**{k: conf[k] for k in _CFG_KEYS if k in conf})
        ikw = {k: conf[k] for k in _ICFG_KEYS if k in conf and k != "inversion_mode"}
        if "inversion_mode" in conf:
            ikw["mode"] = conf["inversion_mode"]
        icfg = InversionConfig(**ikw)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lmax = int(conf.get("lmax", 16))
    if lmax < 0:
        raise UsageError("lmax must be non-negative")
    seed = int(conf.get("seed", DEFAULT_SEED))
    if not 0 <= seed < 2 ** 64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    return RunConfig(case, conf.get("field", "gaussian()"), conf.get("angular"), cfg, icfg, lmax, seed,
                     ns.out, fmt, conf.get("tol"))


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(columns: list[str], rows: list[tuple], summary: dict, fmt: str) -> str:
    """CSV (header, rows, then ``# key=value`` summary lines) or a JSON object."""
    if fmt == "json":
        obj = {"rows": [dict(zip(columns, (_jsonable(x) for x in r))) for r in rows],
               "summary": _jsonable(summary)}
        return json.dumps(obj, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(x) for x in r) + "\n")
    for k, v in summary.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    return buf.getvalue()


def emit(rc: RunConfig, text: str) -> None:
    if rc.output_path:
        try:
            with open(rc.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IOError(str(exc)) from exc
    else:
        sys.stdout.write(text)


def _plane_columns(n: int, q: int) -> list[str]:
    return [f"b{i + 1}{j + 1}" for i in range(n) for j in range(q)] + [f"v{i + 1}" for i in range(n)]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def forward_grid(case: str, grid: dict, seed: int):
    """Planes ``(etas, vs)`` of a forward grid."""
    p, q, n = CASES[case]
    offsets = _range_arg(grid, "offsets", np.linspace(-4.0, 4.0, 9))
    known = {"classical2d": {"angles", "offsets"}, "classical3d_planes": {"order", "offsets"},
             "classical3d_lines": {"order", "azimuths", "offsets"}, "grass14": {"planes", "offsets"}}[case]
    extra = set(grid) - known
    if extra:
        raise UsageError(f"grid keys {sorted(extra)} do not apply to {case}")
    etas, vs = [], []
    if case == "classical2d":
        K = _int_arg(grid, "angles", 16)
        for j in range(K):
            th = np.pi * j / K
            nrm = np.array([np.cos(th), np.sin(th)])
            for s in offsets:
                etas.append(np.array([[-nrm[1]], [nrm[0]]]))
                vs.append(s * nrm)
    elif case == "classical3d_planes":
        nodes = sphere_rule(3, _int_arg(grid, "order", 4)).nodes
        for nrm in nodes:
            B = complete_frame(nrm[:, None])
            for s in offsets:
                etas.append(B)
                vs.append(s * nrm)
    elif case == "classical3d_lines":
        nodes = sphere_rule(3, _int_arg(grid, "order", 4)).nodes
        M = _int_arg(grid, "azimuths", 1)
        for d in nodes:
            perp = complete_frame(d[:, None])
            for a in range(M):
                ang = 2.0 * np.pi * a / M
                w = np.cos(ang) * perp[:, 0] + np.sin(ang) * perp[:, 1]
                for s in offsets:
                    etas.append(d[:, None])
                    vs.append(s * w)
    else:
        rng = make_rng(seed, STREAM_CLI, 1)
        for _ in range(_int_arg(grid, "planes", 8)):
            eta = random_subspace(rng, 4, 2)
            w = random_unit_in(rng, complete_frame(eta.basis))
            for s in offsets:
                etas.append(eta.basis)
                vs.append(s * w)
    return np.array(etas).reshape(-1, n, q), np.array(vs).reshape(-1, n)


def cmd_forward(rc: RunConfig, grid_spec: str) -> int:
    grid = parse_grid(grid_spec)
    f = rc.build()
    p, q, n = rc.pqn
    etas, vs = forward_grid(rc.case, grid, rc.seed)
    vals = radon_many(f, etas, vs, rc.cfg)
    rows = [(i, *etas[i].ravel(), *vs[i], vals[i]) for i in range(vals.size)]
    summary = {"case": rc.case, "field": f.label, "rows": len(rows),
               "max_abs_value": float(np.max(np.abs(vals), initial=0.0))}
    emit(rc, render(["index", *_plane_columns(n, q), "value"], rows, summary, rc.format))
    return EXIT_OK


def _slice_probe(rng, case: str, max_freq: float = 3.0):
    p, q, n = CASES[case]
    eta = random_subspace(rng, n, q)
    y = float(rng.uniform(0.0, max_freq)) * random_unit_in(rng, complete_frame(eta.basis))
    return eta, y


def cmd_slice_check(rc: RunConfig, probes: int) -> int:
    if probes < 1:
        raise UsageError("probes must be positive")
    f = rc.build()
    tol = 1e-2 if rc.tol is None else rc.tol
    rng = make_rng(rc.seed, STREAM_CLI, 2)
    rows = []
    for i in range(probes):
        eta, y = _slice_probe(rng, rc.case)
        lhs, rhs = slice_sides(f, eta, y, rc.cfg)
        res = abs(lhs - rhs) / (1.0 + abs(rhs))
        rows.append((i, float(np.linalg.norm(y)), lhs.real, lhs.imag, rhs.real, rhs.imag, float(res)))
    mx = max(r[-1] for r in rows)
    ok = mx < tol
    summary = {"case": rc.case, "field": f.label, "probes": probes, "max_residual": mx, "tol": tol, "pass": ok}
    emit(rc, render(["probe", "freq_norm", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"], rows, summary,
                    rc.format))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_moments(rc: RunConfig, kmax: int, probes: int) -> int:
    if kmax < 0:
        raise UsageError("kmax must be non-negative")
    if probes < 1:
        raise UsageError("probes must be positive")
    f = rc.build()
    tol = 1e-2 if rc.tol is None else rc.tol
    p, q, n = rc.pqn
    rng = make_rng(rc.seed, STREAM_CLI, 3)
    rows = []
    worst: dict = {}
    for i in range(probes):
        eta, y = _slice_probe(rng, rc.case, 1.0)
        y = y / max(np.linalg.norm(y), 1e-300)
        for k in range(kmax + 1):
            r = forward_moment_identity_residual(f, eta, y, k, rc.cfg)
            rows.append(("forward", k, i, 0, r, 1.0))
            worst[f"forward_k{k}"] = max(worst.get(f"forward_k{k}", 0.0), r)
    if rc.case == "grass14":
        phi = radon_field(f, q, rc.cfg)
        reports = range_membership_report(phi, kmax, probes, rc.cfg, rc.lmax, rc.seed, rc.icfg)
        for rep in reports:
            conds = rep.condition_numbers
            for (probe, node), r in rep.per_probe_residuals:
                rows.append(("range", rep.k, probe, node, r, conds[probe]))
            worst[f"range_k{rep.k}"] = rep.max_residual
    mx = max(worst.values(), default=0.0)
    ok = mx < tol
    summary = {"case": rc.case, "field": f.label, "kmax": kmax, "probes": probes, **worst,
               "max_residual": mx, "tol": tol, "pass": ok}
    emit(rc, render(["kind", "k", "probe", "node", "residual", "condition_number"], rows, summary, rc.format))
    return EXIT_OK if ok else EXIT_FAIL


def invert_probe_planes(seed: int, probes: int, max_dist: float = 2.5):
    rng = make_rng(seed, STREAM_CLI, 4)
    B, X = [], []
    for j in range(probes):
        s = random_subspace(rng, 4, 1)
        d = max_dist * (j + 0.5) / probes
        B.append(s.basis)
        X.append(d * random_unit_in(rng, complete_frame(s.basis)))
    return np.array(B).reshape(-1, 4, 1), np.array(X).reshape(-1, 4)


def cmd_invert(rc: RunConfig, probes: int) -> int:
    if rc.case != "grass14":
        raise UnsupportedCase("invert is implemented for the grass14 case")
    if probes < 1:
        raise UsageError("probes must be positive")
    f = rc.build()
    tol = 5e-2 if rc.tol is None else rc.tol
    res = invert_equal_rank(radon_field(f, 2, rc.cfg), rc.cfg, rc.lmax, rc.icfg, rc.seed)
    B, X = invert_probe_planes(rc.seed, probes)
    true = f.evaluate(B, X)
    rec = res.evaluate_many(B, X)
    err = np.abs(rec - true)
    peak = f.peak if f.peak else 1.0
    rows = [(i, float(np.linalg.norm(X[i])), true[i], rec[i], err[i]) for i in range(probes)]
    rel = float(err.max() / peak)
    ok = rel < tol
    summary = {"case": rc.case, "field": f.label, "lmax": rc.lmax, "probes": probes,
               "compact_transform_gap": res.diagnostics.get("compact_transform_gap", 0.0),
               "max_abs_error": float(err.max()), "peak": peak, "max_relative_error": rel, "tol": tol, "pass": ok}
    emit(rc, render(["probe", "distance", "true", "reconstructed", "abs_error"], rows, summary, rc.format))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_support(rc: RunConfig, mode: str, mode_args: str) -> int:
    args = parse_grid(mode_args)
    f = rc.build()
    if mode == "pw":
        allowed = {"R", "imax", "N", "kmax"}
        if set(args) - allowed:
            raise UsageError(f"pw mode takes {sorted(allowed)}")
        if f.smoothness != "compact":
            raise NotCompactlySupported("pw mode needs a compactly supported field")
        R = float(_range_arg(args, "R", f.radius)[0])
        imax = float(_range_arg(args, "imax", 5.0)[0])
        Ns = [int(x) for x in _range_arg(args, "N", [0.0, 2.0])]
        kmax = _int_arg(args, "kmax", 2, 0)
        from .support import default_complex_grid

        rep = pw_condition_i(f, R, Ns, default_complex_grid(im_max=imax), cfg=rc.cfg)
        rep2 = pw_condition_ii(f, kmax, cfg=rc.cfg)
        rows = [("i", N, -1, rep.condition_i_sup[N], rep.growth_factor.get(N, 0.0)) for N in Ns]
        rows += [("ii", h["k"], h["index"], h["odd"], h["pole"]) for h in rep2.per_harmonic]
        summary = {"mode": mode, "field": f.label, "R": R, "imax": imax, "value_at_zero": rep.value_at_zero,
                   "condition_ii_evenness": rep2.condition_ii_evenness, "condition_ii_pole": rep2.condition_ii_pole}
        emit(rc, render(["condition", "order", "index", "magnitude", "ratio"], rows, summary, rc.format))
        return EXIT_OK
    if mode == "truncate":
        if rc.case != "grass14":
            raise UnsupportedCase("truncate mode is implemented for the grass14 case")
        if set(args) - {"R", "probes"}:
            raise UsageError("truncate mode takes R and probes")
        tol = 5e-3 if rc.tol is None else rc.tol
        R = float(_range_arg(args, "R", 2.0)[0])
        rep = support_theorem_I_harness(f, R, rc.cfg, rc.lmax, rc.icfg, _int_arg(args, "probes", 12), rc.seed)
        rows = [(i, d, v) for i, (d, v) in enumerate(rep.extras["rows"])]
        ok = rep.extras["relative"] < tol
        summary = {"mode": mode, "field": f.label, "R": R, "max_abs_outside": rep.max_abs_outside,
                   "peak": rep.extras["peak"], "relative": rep.extras["relative"], "tol": tol, "pass": ok}
        emit(rc, render(["probe", "distance", "reconstructed"], rows, summary, rc.format))
        return EXIT_OK if ok else EXIT_FAIL
    # hyperplane
    if rc.case != "classical3d_lines":
        raise UnsupportedCase("hyperplane mode is implemented for the classical3d_lines case")
    if set(args) - {"domain", "r", "a", "b", "count"}:
        raise UsageError("hyperplane mode takes domain, r, a, b and count")
    kind = args.get("domain", "ball")
    if kind not in ("ball", "band", "two_caps"):
        raise UsageError("domain must be ball, band or two_caps")
    dom = parse_domain(DomainSpec(kind, *(float(_range_arg(args, k, d)[0]) for k, d in
                                          (("a", -1.0), ("b", 1.0), ("r", 2.0)))))
    tol = 1e-3 if rc.tol is None else rc.tol
    rep = support_theorem_II_harness(f, dom, _int_arg(args, "count", 50), rc.cfg, rc.seed)
    rows = [(i, *off, m) for i, (off, m) in enumerate(rep.extras["per_plane"])]
    ok = rep.extras["relative"] < tol
    summary = {"mode": mode, "field": f.label, "domain": rep.extras["domain"], "planes": rep.probe_count,
               "max_abs_outside": rep.max_abs_outside, "peak": rep.extras["peak"],
               "relative": rep.extras["relative"], "restriction_gap": rep.extras.get("restriction_gap", 0.0),
               "control_relative_error": rep.extras.get("control_relative_error", 0.0), "tol": tol, "pass": ok}
    emit(rc, render(["plane", "o1", "o2", "o3", "max_abs_reconstruction"], rows, summary, rc.format))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_funk_table(rc: RunConfig) -> int:
    table = funk_table(rc.lmax)
    rows = [(int(l), float(table[int(l)])) for l in table.degrees]
    emit(rc, render(["l", "multiplier"], rows, {"lmax": rc.lmax}, rc.format))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--case", choices=sorted(CASES), help="transform family (default grass14)")
    p.add_argument("--field", help='field spec, e.g. "gaussian(scale=1)" or "shell_bump(r0=1,r1=2)"')
    p.add_argument("--angular", help='angular factor for grass14 gaussians, e.g. "quadratic(a11=1)"')
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--lmax", type=int, help="harmonic degree cutoff (default 16)")
    p.add_argument("--seed", type=lambda s: int(s, 0), help="unsigned 64-bit seed (default 0x9E3779B97F4A7C15)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
    p.add_argument("--tol", type=float, help="pass/fail tolerance of the command")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grassradon", description=__doc__.split("\n\n")[0],
                                     epilog=GRID_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter
    p = sub.add_parser("forward", help="transform values on a grid", epilog=GRID_HELP, formatter_class=fmt)
    _common(p)
    p.add_argument("--grid", default="", help="grid spec (see below)")
    p = sub.add_parser("slice-check", help="projection-slice residuals")
    _common(p)
    p.add_argument("--probes", type=int, default=20)
    p = sub.add_parser("moments", help="moment identity and moment-condition fits")
    _common(p)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--probes", type=int, default=2)
    p = sub.add_parser("invert", help="equal-rank inversion round trip")
    _common(p)
    p.add_argument("--probes", type=int, default=20)
    p = sub.add_parser("support", help="support-theorem harnesses", epilog=GRID_HELP, formatter_class=fmt)
    _common(p)
    p.add_argument("--mode", choices=["pw", "truncate", "hyperplane"], required=True)
    p.add_argument("--mode-args", default="", help="mode arguments (see below)")
    p = sub.add_parser("funk-table", help="Funk multipliers P_l(0) for even l <= lmax")
    _common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        rc = build_run_config(ns)
        if ns.command == "forward":
            return cmd_forward(rc, ns.grid)
        if ns.command == "slice-check":
            return cmd_slice_check(rc, ns.probes)
        if ns.command == "moments":
            return cmd_moments(rc, ns.kmax, ns.probes)
        if ns.command == "invert":
            return cmd_invert(rc, ns.probes)
        if ns.command == "support":
            return cmd_support(rc, ns.mode, ns.mode_args)
        return cmd_funk_table(rc)
    except (UnsupportedCase, DomainMismatch, NotCompactlySupported, UnsupportedDimension) as exc:
        print(f"grassradon: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (GrassRadonError, UsageError) as exc:
        print(f"grassradon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"grassradon: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
