"""Command line and the JSON file format for collections.

A collection file is a JSON object::

    {"kind": "Z" | "Y" | "super",
     "ambient_dim": N,
     "spaces": {name: [vector, ...]},    vector = [[re, im], ...] of length N
     "phase_order": ["P1", "P2", ...],
     "meta": {...}}

Z files hold spaces U, E, J; Y files hold E, J, V; superfunction files hold
E, J, V_in, V_out.  Each space is stored by the frame it was built with, so
operator matrices reported in that frame survive a round trip.  Floats are
written in shortest round-trip form, which reads back bit-exactly.

Exit codes: 0 success, 2 parse error, 3 realization failure, 4 solver
singularity, 5 violated condition, 6 kind mismatch, 7 hexplot precondition.
"""

from __future__ import annotations

import json
import os
import re
import sys
from pathlib import Path

import click
import numpy as np

from . import algebra, hexmap, reduction
from .collections import Superfunction, YCollection, ZCollection
from .errors import ConditionViolated, KindMismatch, PoleHit, Singular, SubalgError
from .fileio import atomic_write_text
from .numcore import DEFAULT_TOL, Tolerance
from .ratfunc.parser import parse
from .ratfunc.realize import CERTIFICATE_TOL, realize_scalar, sample_points
from .solvers import solve_superfunction, solve_y, solve_y_system, solve_z
from .spaces import Subspace

__all__ = [
    "EXIT_CODES",
    "OPS",
    "collection_to_document",
    "collection_from_document",
    "dump_collection",
    "load_collection",
    "exit_code_for",
    "format_entry",
    "format_matrix",
    "parse_z_list",
    "main",
]

EXIT_CODES = {"parse": 2, "realization": 3, "solver": 4, "condition": 5, "kind": 6, "hexplot": 7}
OP_POINTS = 10

_FIELD_NAMES = {"Z": ("U", "E", "J"), "Y": ("E", "J", "V"), "super": ("E", "J", "V_in", "V_out")}


# --- serialization --------------------------------------------------------

def _encode(frame: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in col] for col in np.asarray(frame, complex).T]


def _decode(vectors, n: int) -> Subspace:
    if not vectors:
        return Subspace.zero(n)
    cols = []
    for vec in vectors:
        if len(vec) != n:
            raise KindMismatch(f"vector of length {len(vec)} in a {n}-dimensional file")
        cols.append([complex(float(re), float(im)) for re, im in vec])
    return Subspace(np.array(cols, dtype=complex).T, ambient_dim=n)


def collection_to_document(c, meta: dict | None = None) -> dict:
    if isinstance(c, ZCollection):
        kind, fields = "Z", (c.u, c.e, c.j)
        phases = c.phases
    elif isinstance(c, YCollection):
        kind, fields = "Y", (c.e, c.j, c.v)
        phases = c.phases
    elif isinstance(c, Superfunction):
        kind, fields = "super", (c.base.e, c.base.j, c.v_in, c.v_out)
        phases = c.base.phases
    else:
        raise KindMismatch(f"cannot serialize {type(c).__name__}")
    spaces = {name: _encode(s.frame) for name, s in zip(_FIELD_NAMES[kind], fields)}
    order = [f"P{i + 1}" for i in range(len(phases))]
    spaces.update({name: _encode(p.frame) for name, p in zip(order, phases)})
    return {"kind": kind, "ambient_dim": c.ambient_dim, "spaces": spaces,
            "phase_order": order, "meta": meta or {}}


def collection_from_document(doc: dict, tol: Tolerance = DEFAULT_TOL):
    kind = doc.get("kind")
    if kind not in _FIELD_NAMES:
        raise KindMismatch(f"unknown collection kind {kind!r}")
    n = int(doc["ambient_dim"])
    spaces = doc["spaces"]
    missing = [k for k in (*_FIELD_NAMES[kind], *doc["phase_order"]) if k not in spaces]
    if missing:
        raise KindMismatch(f"{kind} file lacks spaces {missing}")
    fields = [_decode(spaces[k], n) for k in _FIELD_NAMES[kind]]
    phases = tuple(_decode(spaces[k], n) for k in doc["phase_order"])
    if kind == "Z":
        return ZCollection(*fields, phases, tol)
    if kind == "Y":
        return YCollection(*fields, phases, tol)
    e, j, v_in, v_out = fields
    return Superfunction.from_ports(e, j, v_in, v_out, phases, tol)


def dump_collection(c, path, meta: dict | None = None) -> Path:
    text = json.dumps(collection_to_document(c, meta), indent=1, allow_nan=False)
    return atomic_write_text(path, text + "\n")


def load_collection(path, tol: Tolerance = DEFAULT_TOL):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    c = collection_from_document(doc, tol)
    report = c.validate()
    if not report.ok:
        failed = "; ".join(f"{ch.name} ({ch.detail})" for ch in report.failed())
        raise ConditionViolated(f"{path} fails validation: {failed}", report.failed()[0].name)
    return c, doc.get("meta", {})


# --- text formats ---------------------------------------------------------

def format_entry(x: complex) -> str:
    """``re+imi`` with 12 significant digits."""
    x = complex(x)
    return f"{x.real:.12g}{x.imag:+.12g}i"


def format_matrix(a) -> str:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    return "\n".join(" ".join(format_entry(x) for x in row) for row in a)


def parse_z_list(text: str) -> np.ndarray:
    """Comma-separated complex numbers; ``i`` and ``j`` both mark the imaginary unit."""
    out = []
    for item in text.split(","):
        item = item.strip().replace(" ", "").replace("i", "j")
        if not item:
            raise click.BadParameter(f"empty entry in {text!r}")
        try:
            out.append(complex(item))
        except ValueError as exc:
            raise click.BadParameter(f"{item!r} is not a complex number") from exc
    return np.array(out, dtype=complex)


def _matrix_arg(text: str | None):
    if text is None:
        return None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise click.BadParameter(f"not JSON: {exc}") from exc

    def conv(x):
        return complex(x[0], x[1]) if isinstance(x, list) and len(x) == 2 and not isinstance(x[0], list) else x

    arr = [[conv(x) for x in row] for row in data] if data and isinstance(data[0], list) else data
    return np.atleast_2d(np.array(arr, dtype=complex))


def exit_code_for(exc: BaseException) -> int:
    return EXIT_CODES.get(getattr(exc, "category", ""), 1)


def _fail(exc: SubalgError, code: int | None = None):
    condition = getattr(exc, "condition", "")
    label = type(exc).__name__ + (f" [{condition}]" if condition else "")
    click.echo(f"error: {label}: {exc}", err=True)
    sys.exit(exit_code_for(exc) if code is None else code)


def _seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    return int(os.environ.get("SUBALG_SEED", "0"))


def _tol(tol_rank: float | None) -> Tolerance:
    return Tolerance(rank_rel=tol_rank) if tol_rank else DEFAULT_TOL


# --- function laws --------------------------------------------------------

def _value(c, z, method="shifted", z0=None):
    if isinstance(c, ZCollection):
        return solve_z(c, z, method=method, z0=z0).value
    if isinstance(c, YCollection):
        return solve_y(c, z, method=method, z0=z0).value
    return solve_superfunction(c, z, method=method, z0=z0).value


def _law_residual(n_vars: int, got_fn, want_fn, seed: int,
                  count: int = OP_POINTS) -> tuple[float, int, float]:
    """Largest relative gap between the two sides, points used, and the largest |entry| seen."""
    rng = np.random.default_rng(seed)
    worst, used, attempts, size = 0.0, 0, 0, 0.0
    while used < count and attempts < 20 * count:
        attempts += 1
        z = next(sample_points(rng, max(n_vars, 1), 1))[:n_vars]
        try:
            got = np.atleast_2d(got_fn(z))
            want = np.atleast_2d(want_fn(z))
        except (Singular, PoleHit):
            continue
        if got.shape != want.shape:
            return float("inf"), used, size
        size = max(size, float(np.abs(got).max(initial=0.0)))
        scale = max(1.0, float(np.abs(want).max(initial=0.0)))
        worst = max(worst, float(np.abs(got - want).max(initial=0.0)) / scale)
        used += 1
    return worst, used, size


def _y_any(c: YCollection, z):
    try:
        return solve_y(c, z).value
    except Singular:
        return solve_y_system(c, z)


def _greedy_complement(coords: np.ndarray, m: int) -> np.ndarray:
    cur = coords
    for k in range(m):
        if cur.shape[1] == m:
            break
        trial = np.hstack([cur, np.eye(m, dtype=complex)[:, [k]]])
        if np.linalg.matrix_rank(trial) == trial.shape[1]:
            cur = trial
    return cur


def _require_kind(c, kind: str, op: str, pos: int = 1):
    if getattr(c, "kind", None) != kind:
        raise KindMismatch(f"{op}: operand {pos} must be a {kind} file, got {c.kind}")


def _op_add(cs, p):
    a, b = cs
    _require_kind(a, "Y", "add", 1)
    _require_kind(b, "Y", "add", 2)
    out = algebra.add_y(a, b)
    return out, lambda z: _value(out, z), lambda z: _value(a, z[: a.n]) + _value(b, z[: b.n]), {}


def _op_mul(cs, p):
    a, b = cs
    _require_kind(a, "super", "mul", 1)
    _require_kind(b, "super", "mul", 2)
    ports = algebra.PortMaps.default(a.port_dim)
    out = algebra.multiply_superfunctions(a, b, ports)
    mid = np.block([[ports.m_e, np.zeros_like(ports.m_e)], [np.zeros_like(ports.m_j), ports.m_j]])
    return (out, lambda z: _value(out, z),
            lambda z: _value(a, z[: a.n]) @ mid @ _value(b, z[: b.n]), {})


def _op_subst(kind):
    def run(cs, p):
        host, plug = cs
        _require_kind(host, kind, f"subst-{kind.lower()}", 1)
        _require_kind(plug, "Z", f"subst-{kind.lower()}", 2)
        slot = p["slot"]
        fn = algebra.substitute_into_y if kind == "Y" else algebra.substitute_into_z
        out = fn(host, plug, slot)

        def want(z):
            inner = _value(plug, z[: plug.n])[0, 0]
            rest = list(z[plug.n:])
            return _value(host, np.array(rest[:slot] + [inner] + rest[slot:]))

        return out, lambda z: _value(out, z), want, {"slot": slot}
    return run


def _op_dual(cs, p):
    (c,) = cs
    out = algebra.duality(c)
    if isinstance(c, Superfunction):
        base, base_out = c.base, out.base
        return (out, lambda z: _value(base_out, z),
                lambda z: np.linalg.inv(_value(base, 1 / z)), {"checked": "Y of the port space"})
    return out, lambda z: _value(out, z), lambda z: np.linalg.inv(_value(c, 1 / z)), {}


def _op_merge(cs, p):
    (c,) = cs
    i, j = p["i"], p["j"]
    out = algebra.merge_phases(c, i, j)
    a, b = sorted((i, j))

    def want(z):
        full = list(z)
        full.insert(b, z[a])
        return _value(c, np.array(full))

    return out, lambda z: _value(out, z), want, {"merged": [i, j]}


def _op_extend(cs, p):
    (c,) = cs
    _require_kind(c, "Z", "extend")
    t = p["matrix"] if p["matrix"] is not None else np.eye(c.m)
    out = algebra.extension(c, t)
    return out, lambda z: _value(out, z), lambda z: _value(c, z), {"note": "Y in the frame T"}


def _op_refscale(cs, p):
    (c,) = cs
    _require_kind(c, "Y", "refscale")
    if p["c_e"] is None or p["c_j"] is None:
        raise click.UsageError("refscale needs --c-e and --c-j")
    s = algebra.ScalingVector(tuple(p["c_e"]), tuple(p["c_j"]))
    out = algebra.reference_transform(c, s)
    return (out, lambda z: _value(out, z), lambda z: _value(c, s.ratios * z),
            {"ratios": [[float(x.real), float(x.imag)] for x in s.ratios]})


def _op_addinv(cs, p):
    (c,) = cs
    _require_kind(c, "Y", "addinv")
    out = algebra.additive_inverse(c)
    return out, lambda z: _value(out, z), lambda z: -_value(c, z), {}


def _op_mulinv(cs, p):
    (c,) = cs
    _require_kind(c, "super", "mulinv")
    out = algebra.multiplicative_inverse(c)
    m = c.port_dim
    d = np.diag([1.0] * m + [-1.0] * m).astype(complex)
    return out, lambda z: _value(c, z) @ d @ _value(out, z), lambda z: d, {"checked": "F·D·F⁻ = D"}


def _op_prune(cs, p):
    (c,) = cs
    if isinstance(c, ZCollection):
        out, rep = reduction.prune_z(c)
    elif isinstance(c, YCollection):
        out, rep = reduction.prune_y(c)
    else:
        raise KindMismatch("prune needs a Z or Y file")
    meta = {"old_dims": rep.old_dims, "new_dims": rep.new_dims,
            "inequalities": {ch.name: ch.passed for ch in rep.inequalities}}
    return out, lambda z: _value(out, z), lambda z: _value(c, z), meta


def _pairs(a) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.atleast_2d(a)]


def _op_normalize(cs, p):
    (c,) = cs
    _require_kind(c, "Y", "normalize")
    out, m_mat, k_mat = reduction.normalize_y(c)
    return (out, lambda z: _value(c, z), lambda z: m_mat @ _value(out, z) @ k_mat,
            {"M": _pairs(m_mat), "K": _pairs(k_mat)})


def _op_reduce(cs, p):
    (c,) = cs
    _require_kind(c, "Z", "reduce")
    out, w = reduction.reduce_z(c)
    return (out, lambda z: reduction.reconstruct_z(w, _y_any(out, z), z), lambda z: _value(c, z),
            {"w": [_pairs(wi) for wi in w]})


def _op_cf(cs, p):
    (c,) = cs
    _require_kind(c, "Z", "cf")
    cf = reduction.continued_fraction(c, max_depth=p["depth"])
    levels = [{"index": lv.index, "dims": lv.dims,
               "M": _pairs(lv.m_mat) if lv.m_mat is not None else None,
               "w": [_pairs(wi) for wi in lv.w]} for lv in cf.levels]
    meta = {"depth": cf.depth, "stop_reason": cf.stop_reason, "levels": levels}
    return (cf.terminal, lambda z: reduction.evaluate_expansion(cf, z), lambda z: _value(c, z), meta)


def _op_project_u(cs, p):
    (c,) = cs
    _require_kind(c, "Z", "project-u")
    coords = p["matrix"]
    if coords is None:
        raise click.UsageError("project-u needs --matrix with U-frame coordinates of the subspace")
    coords = coords.reshape(c.m, -1)
    out = algebra.project_u(c, Subspace(c.u.frame @ coords, ambient_dim=c.h))
    full = _greedy_complement(coords, c.m)
    k = coords.shape[1]
    phi = np.linalg.inv(full)[:k]
    return out, lambda z: _value(out, z), lambda z: phi @ _value(c, z) @ coords, {}


def _op_embed(cs, p):
    (c,) = cs
    _require_kind(c, "Y", "embed")
    dim = p["dim"]
    if dim is None:
        raise click.UsageError("embed needs --dim")
    out = algebra.embed(c, dim)

    def want(z):
        y = np.zeros((dim, dim), complex)
        y[: c.m, : c.m] = _value(c, z)
        return y

    return out, lambda z: _value(out, z), want, {}


OPS = {
    "add": (2, _op_add),
    "mul": (2, _op_mul),
    "subst-y": (2, _op_subst("Y")),
    "subst-z": (2, _op_subst("Z")),
    "dual": (1, _op_dual),
    "merge": (1, _op_merge),
    "extend": (1, _op_extend),
    "refscale": (1, _op_refscale),
    "addinv": (1, _op_addinv),
    "mulinv": (1, _op_mulinv),
    "prune": (1, _op_prune),
    "normalize": (1, _op_normalize),
    "reduce": (1, _op_reduce),
    "cf": (1, _op_cf),
    "project-u": (1, _op_project_u),
    "embed": (1, _op_embed),
}


# --- commands -------------------------------------------------------------

def _common(f):
    f = click.option("--tol-residual", type=float, default=None,
                     help="Residual bound for certificates and law checks.")(f)
    f = click.option("--tol-rank", type=float, default=None,
                     help="Relative singular value cutoff for rank decisions.")(f)
    f = click.option("--seed", type=int, default=None,
                     help="Seed for sampled checks (default $SUBALG_SEED or 0).")(f)
    return f


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main():
    """Build subspace collections and transform them."""


@main.command("realize")
@click.argument("expr")
@click.option("--n-vars", type=int, default=None, help="Number of variables (default: highest zK used).")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Collection file to write.")
@click.option("--cert", type=click.Path(dir_okay=False), default=None,
              help="Certificate file (default: OUT with .cert.json).")
@_common
def cmd_realize(expr, n_vars, out, cert, seed, tol_rank, tol_residual):
    """Realize a scalar rational function given as text, e.g. 'z1*z2/z3'."""
    seed = _seed(seed)
    tol = tol_residual or CERTIFICATE_TOL
    if n_vars is None:
        idx = [int(k) for k in re.findall(r"z(\d+)", expr)]
        n_vars = max(idx, default=1)
    try:
        target = parse(expr, n_vars)
        result = realize_scalar(target, seed=seed, tol=tol)
    except SubalgError as exc:
        _fail(exc)
    c = result.collection
    meta = {"target": target.render(), "n_vars": n_vars, "seed": seed}
    dump_collection(c, out, meta)
    cert_path = Path(cert) if cert else Path(out).with_suffix(".cert.json")
    doc = {
        "target": target.render(), "n_vars": n_vars, "seed": seed, "tol": tol,
        "max_residual": result.max_residual, "passed": result.passed,
        "samples": [{"z": [[x.real, x.imag] for x in z], "residual": r} for z, r in result.samples],
    }
    atomic_write_text(cert_path, json.dumps(doc, indent=1) + "\n")
    dims = ",".join(str(p.dim) for p in c.phases)
    click.echo(f"realized {target.render()}")
    click.echo(f"ambient dim {c.ambient_dim}, dim E {c.e.dim}, dim J {c.j.dim}, phases {dims}")
    click.echo(f"certificate: {len(result.samples)} points, max residual {result.max_residual:.3e} "
               f"< {tol:g}, seed {seed}")


@main.command("eval")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--z", "z_text", required=True, help="Comma-separated values, e.g. '1,2+1i,0.5'.")
@click.option("--method", type=click.Choice(["direct", "shifted"]), default="shifted")
@click.option("--z0", type=str, default=None, help="Reference value for the shifted method.")
@_common
def cmd_eval(file, z_text, method, z0, seed, tol_rank, tol_residual):
    """Print the associated operator of a collection file at one point."""
    z = parse_z_list(z_text)
    z0v = parse_z_list(z0)[0] if z0 else None
    try:
        c, _ = load_collection(file, _tol(tol_rank))
        if z.size != c.n:
            raise click.BadParameter(f"{c.n} values needed, got {z.size}", param_hint="--z")
        value = _value(c, z, method=method, z0=z0v)
    except SubalgError as exc:
        _fail(exc)
    click.echo(format_matrix(value))


@main.command("op")
@click.argument("name", type=click.Choice(sorted(OPS)))
@click.argument("files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Result file to write.")
@click.option("--slot", type=int, default=0, help="Host phase replaced by substitution.")
@click.option("--i", "i_", type=int, default=0, help="First phase to merge.")
@click.option("--j", "j_", type=int, default=1, help="Second phase to merge.")
@click.option("--matrix", type=str, default=None,
              help="JSON matrix: T for extend, U-frame coordinates for project-u.")
@click.option("--c-e", type=str, default=None, help="Comma-separated E scalars for refscale.")
@click.option("--c-j", type=str, default=None, help="Comma-separated J scalars for refscale.")
@click.option("--dim", type=int, default=None, help="Target dim V for embed.")
@click.option("--depth", type=int, default=20, help="Maximum continued fraction depth.")
@_common
def cmd_op(name, files, out, slot, i_, j_, matrix, c_e, c_j, dim, depth, seed, tol_rank, tol_residual):
    """Apply an algebra or reduction operation and re-check its function law."""
    seed = _seed(seed)
    arity, run = OPS[name]
    if len(files) != arity:
        raise click.UsageError(f"{name} takes {arity} file(s), got {len(files)}")
    tol_res = tol_residual or 1e-8
    params = {"slot": slot, "i": i_, "j": j_, "matrix": _matrix_arg(matrix), "dim": dim, "depth": depth,
              "c_e": parse_z_list(c_e) if c_e else None, "c_j": parse_z_list(c_j) if c_j else None}
    try:
        operands = [load_collection(f, _tol(tol_rank))[0] for f in files]
        result, got, want, meta = run(operands, params)
        if arity == 2:
            n_law = result.n
        else:
            n_law = operands[0].n - (1 if name == "merge" else 0)
        residual, used, size = _law_residual(n_law, got, want, seed)
    except SubalgError as exc:
        _fail(exc)
    meta = {"op": name, "operands": [str(f) for f in files], "seed": seed,
            "law_residual": residual, "law_points": used, "max_entry": size, **meta}
    dump_collection(result, out, meta)
    report = result.validate()
    click.echo(f"op {name}: wrote {result.kind} collection, ambient dim {result.ambient_dim}")
    if name == "cf":
        click.echo(f"cf depth {meta['depth']}, stop: {meta['stop_reason']}")
    click.echo(f"function law residual {residual:.3e} at {used} points (seed {seed})")
    click.echo(f"largest entry of the checked function: {size:.3e}")
    click.echo(f"validate: {'ok' if report.ok else 'FAILED'}")
    if not report.ok or not residual < tol_res:
        click.echo(f"error: law residual {residual:.3e} exceeds {tol_res:g} or validation failed", err=True)
        sys.exit(EXIT_CODES["condition"])


@main.command("hexplot")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="CSV file to write.")
@click.option("--svg", type=click.Path(dir_okay=False), default=None, help="Optional SVG file.")
@click.option("--grid-lo", type=float, default=1e-2, help="Smallest ratio of the fixed variables.")
@click.option("--grid-hi", type=float, default=1e2, help="Largest ratio of the fixed variables.")
@click.option("--grid-count", type=int, default=41, help="Number of grid values.")
@_common
def cmd_hexplot(file, out, svg, grid_lo, grid_hi, grid_count, seed, tol_rank, tol_residual):
    """Pole paths of a scalar three-phase Z file on the three hexagons."""
    try:
        c, _ = load_collection(file, _tol(tol_rank))
        if not isinstance(c, ZCollection):
            raise KindMismatch(f"hexplot needs a Z file, got {c.kind}")
        points = hexmap.pole_trajectory(c, hexmap.GridSpec(grid_lo, grid_hi, grid_count))
    except SubalgError as exc:
        _fail(exc, EXIT_CODES["hexplot"])
    hexmap.write_csv(points, out)
    if svg:
        hexmap.write_svg(points, svg, title=Path(file).name)
    counts = hexmap.pole_counts(points)
    dims = [p.dim for p in c.phases]
    click.echo("pole paths per hexagon: " + ", ".join(f"{k}: {v}" for k, v in counts.items()))
    click.echo("phase dims p: " + ", ".join(str(d) for d in dims))
    click.echo(f"wrote {len(points)} points to {out}" + (f" and {svg}" if svg else ""))


if __name__ == "__main__":  # pragma: no cover
    main()
