"""Batch front end: JSON run configuration or flags, deterministic CSV and
JSON artifacts.

Every artifact write is atomic (temp file in the target directory, then
rename), numbers are serialized with 17 significant digits and LF line
endings, and identical configurations produce byte-identical files.

Exit codes: 0 success, 2 configuration or validation failure, 3 numeric
failure (root bracketing, eigensolver convergence).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import expansion, oracle
from . import spectrum as spectrum_mod
from .charconst import (
    DEFAULT_ORDER,
    build_rule,
    compute_constants,
    iterated_sin_cos,
    rule_for_lambda,
)
from .errors import NumericError, ValidationError
from .generator import (
    GeneratorFunction,
    PRESET_NAMES,
    from_descriptor,
    make_preset,
    validate,
    variance_at_one,
)

COMMANDS = ("spectrum", "eigenfunctions", "charfn", "sample", "laplace", "oracle", "verify")
ENGINES = ("auto", "general", "closed")


@dataclasses.dataclass
class RunConfig:
    command: str
    generator: object = "sine-bridge"     # preset name or descriptor dict
    K: int = 5
    n: int = 400
    grid_n: int = expansion.DEFAULT_GRID_N
    n_paths: int = expansion.DEFAULT_N_PATHS
    seed: int = 0
    c_list: tuple = (0.1, 0.5, 1.0)
    quad_order: int = DEFAULT_ORDER
    quad_panels: int = 0                  # 0 = per-lambda automatic
    fredholm_tol: float = spectrum_mod.FREDHOLM_TOL
    engine: str = "auto"
    method: str = "direct"                # sample command: 'kl' | 'direct'
    range: tuple = (0.001, 0.35)          # charfn lambda window
    points: int = 2000
    tail: str = "none"
    out_dir: str = "."

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(cls.field_names())
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "command" not in data:
            raise ValidationError("config needs a 'command'")
        cfg = cls(**{k: _coerce(k, v) for k, v in data.items()})
        cfg.check()
        return cfg

    def check(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}, expected one of {COMMANDS}")
        if self.engine not in ENGINES:
            raise ValidationError(f"unknown engine {self.engine!r}, expected one of {ENGINES}")
        if self.method not in ("kl", "direct"):
            raise ValidationError(f"unknown sample method {self.method!r}")
        if self.tail not in ("none", "geometric"):
            raise ValidationError(f"unknown tail mode {self.tail!r}")
        if self.K < 1:
            raise ValidationError(f"K must be >= 1, got {self.K}")
        if self.n < 16:
            raise ValidationError(f"n must be >= 16, got {self.n}")
        if self.grid_n < 2:
            raise ValidationError(f"grid_n must be >= 2, got {self.grid_n}")
        if self.n_paths < 1:
            raise ValidationError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.points < 2:
            raise ValidationError(f"points must be >= 2, got {self.points}")
        if len(self.range) != 2 or not (0.0 < self.range[0] < self.range[1]):
            raise ValidationError(f"charfn range must be (lo, hi) with 0 < lo < hi, got {self.range}")
        if self.quad_panels < 0:
            raise ValidationError(f"quad_panels must be >= 0, got {self.quad_panels}")
        if any(c < 0 for c in self.c_list):
            raise ValidationError(f"c values must be >= 0, got {self.c_list}")


def _coerce(key, value):
    if key in ("c_list", "range"):
        return tuple(float(v) for v in value)
    return value


# ---------------------------------------------------------------------------
# deterministic serialization


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_atomic(path: str, content: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list, rows: list):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: str, payload):
    _write_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# shared helpers


def _make_generator(cfg: RunConfig) -> GeneratorFunction:
    if isinstance(cfg.generator, str):
        if cfg.generator not in PRESET_NAMES:
            raise ValidationError(
                f"unknown preset {cfg.generator!r}, expected one of {PRESET_NAMES} "
                "or a descriptor object"
            )
        return make_preset(cfg.generator)
    if isinstance(cfg.generator, dict):
        return from_descriptor(cfg.generator)
    raise ValidationError(f"generator must be a preset name or descriptor, got {type(cfg.generator)}")


def _preset_name(cfg: RunConfig):
    return cfg.generator if isinstance(cfg.generator, str) else None


def _compute_spectrum(cfg: RunConfig, g: GeneratorFunction) -> spectrum_mod.Spectrum:
    """Engine selection: closed forms where they exist (sine-bridge and the
    two bridge presets), the general scan otherwise."""
    name = _preset_name(cfg)
    engine = cfg.engine
    if engine == "closed" and name not in ("sine-bridge", "identity", "neg-identity"):
        raise ValidationError(f"no closed-form spectrum for generator {name or 'custom'}")
    if engine == "auto":
        engine = "closed" if name in ("sine-bridge", "identity", "neg-identity") else "general"
    if engine == "closed":
        if name == "sine-bridge":
            return spectrum_mod.closed_form_sine(cfg.K, fredholm_tol=cfg.fredholm_tol)
        return spectrum_mod.closed_form_bridge(cfg.K)
    cf = spectrum_mod.characteristic_function(g, order=cfg.quad_order, min_panels=cfg.quad_panels)
    return spectrum_mod.find_eigenvalues(cf, cfg.K, fredholm_tol=cfg.fredholm_tol)


def _out(cfg: RunConfig, filename: str) -> str:
    return os.path.join(cfg.out_dir, filename)


# ---------------------------------------------------------------------------
# commands


def _cmd_spectrum(cfg: RunConfig) -> int:
    g = _make_generator(cfg)
    spec = _compute_spectrum(cfg, g)
    rows = []
    for idx, pair in enumerate(spec.root_list(), start=1):
        if pair.classification == "spurious":
            ode = float("nan")
        else:
            ode = spectrum_mod.ode_residual(g, pair).interior
        rows.append(
            (str(idx), str(pair.k_bracket), pair.lam, pair.classification,
             pair.C, pair.fredholm_residual, ode)
        )
    _write_csv(
        _out(cfg, "spectrum.csv"),
        ["index", "k_bracket", "lambda", "classification", "C", "fredholm_residual", "ode_residual"],
        rows,
    )
    return 0


def _cmd_eigenfunctions(cfg: RunConfig) -> int:
    g = _make_generator(cfg)
    spec = _compute_spectrum(cfg, g)
    t = np.linspace(0.0, 1.0, cfg.grid_n + 1)
    header = ["t"] + [f"e_{j}" for j in range(1, len(spec.pairs) + 1)]
    columns = [t] + [pair.e(t) for pair in spec.pairs]
    rows = [tuple(col[i] for col in columns) for i in range(t.size)]
    _write_csv(_out(cfg, "eigenfunctions.csv"), header, rows)
    return 0


def _cmd_charfn(cfg: RunConfig) -> int:
    g = _make_generator(cfg)
    name = _preset_name(cfg)
    use_sine = cfg.engine == "closed" or (cfg.engine == "auto" and name == "sine-bridge")
    if cfg.engine == "closed" and name != "sine-bridge":
        raise ValidationError("closed-form characteristic function exists only for sine-bridge")
    lams = np.linspace(cfg.range[0], cfg.range[1], cfg.points)
    if use_sine:
        values = [spectrum_mod.char_fn_sine(lam) for lam in lams]
    else:
        cf = spectrum_mod.characteristic_function(g, order=cfg.quad_order)
        values = [spectrum_mod.char_fn(cf, lam) for lam in lams]
    _write_csv(_out(cfg, "charfn.csv"), ["lambda", "F"], list(zip(lams, values)))
    return 0


def _cmd_sample(cfg: RunConfig) -> int:
    g = _make_generator(cfg)
    if cfg.method == "kl":
        spec = _compute_spectrum(cfg, g)
        paths = expansion.sample_kl(spec, cfg.grid_n, cfg.n_paths, cfg.seed)
    else:
        paths = expansion.sample_direct(g, cfg.grid_n, cfg.n_paths, cfg.seed)
    header = [f"t_{j}" for j in range(cfg.grid_n + 1)]
    rows = [tuple(p.values) for p in paths]
    _write_csv(_out(cfg, "paths.csv"), header, rows)
    return 0


def _cmd_laplace(cfg: RunConfig) -> int:
    g = _make_generator(cfg)
    spec = _compute_spectrum(cfg, g)
    rows = [(c, expansion.laplace_transform(spec, c, tail=cfg.tail), cfg.tail)
            for c in cfg.c_list]
    _write_csv(_out(cfg, "laplace.csv"), ["c", "value", "tail_mode"], rows)
    return 0


def _cmd_oracle(cfg: RunConfig) -> int:
    g = _make_generator(cfg)
    spec = _compute_spectrum(cfg, g)
    disc = oracle.build(g, cfg.n)
    orc = oracle.eigs(disc)
    report = oracle.compare(spec, orc)
    _write_atomic(_out(cfg, "oracle.json"), report.to_json() + "\n")
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    """Cross-module invariant sweep for one generator; exit 3 when any
    check trips.  The report always includes the oracle null-check data
    (some generators legitimately carry a zero eigenvalue)."""
    g = _make_generator(cfg)
    checks = []

    def check(name, ok, detail):
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    rep = validate(g)
    check("generator.energy", rep.ok, {"g0": rep.g0, "energy": rep.energy})
    bridge = variance_at_one(g)
    check("generator.variance_at_one", rep.ok, {"variance": bridge.variance})

    for lam in (0.9, 0.101, 0.011):
        lo = compute_constants(g, lam, rule_for_lambda(lam, 8))
        hi = compute_constants(g, lam, rule_for_lambda(lam, 16))
        drift = max(abs(lo.a_g - hi.a_g), abs(lo.b_g - hi.b_g), abs(lo.c_g - hi.c_g))
        check(f"charconst.order_stability.lam={lam}", drift <= 1e-10, {"drift": drift})
        rule = rule_for_lambda(lam, DEFAULT_ORDER)
        c_swap = iterated_sin_cos(g, lam, rule, swapped=True)
        exch = abs(lo.c_g + c_swap - lo.a_g * lo.b_g)
        check(f"charconst.exchange_identity.lam={lam}", exch <= 1e-12, {"residual": exch})

    spec = _compute_spectrum(cfg, g)
    lams = spec.lambdas
    check("spectrum.strictly_decreasing", bool(np.all(np.diff(lams) < 0)), {"lambdas": list(lams)})
    fred = max(p.fredholm_residual for p in spec.pairs)
    check("spectrum.fredholm", fred <= cfg.fredholm_tol, {"max_residual": fred})
    rule = build_rule(12, 64)
    gram = np.array([[float(rule.weights @ (p.e(rule.nodes) * q.e(rule.nodes)))
                      for q in spec.pairs] for p in spec.pairs])
    orth = float(np.abs(gram - np.eye(len(spec.pairs))).max())
    check("spectrum.orthonormal", orth <= 1e-7, {"max_defect": orth})

    disc = oracle.build(g, cfg.n)
    orc = oracle.eigs(disc)
    check("oracle.psd", bool(orc.values[-1] >= -1e-10), {"min_eig": float(orc.values[-1])})
    trace_resid = abs(float(orc.values.sum()) - float(np.trace(disc.matrix)))
    check("oracle.trace_preserved", trace_resid <= 1e-12 * max(1.0, abs(float(np.trace(disc.matrix)))),
          {"residual": trace_resid})
    nc = oracle.null_check(g, cfg.n)
    check("oracle.null_check", True,
          {"min_eig": nc.min_eig, "candidate_nullvec_corr": nc.candidate_nullvec_corr})
    report = oracle.compare(spec, orc)
    worst = max((m["rel_err"] for m in report.matches), default=1.0)
    check("oracle.agreement", len(report.matches) == len(spec.pairs) and worst <= 1e-2,
          {"matched": len(report.matches), "worst_rel_err": worst})

    tc = expansion.trace_check(g, spec)
    check("expansion.trace_gap", tc.gap >= -1e-8,
          {"trace": tc.trace, "partial_sum": tc.partial_sum, "gap": tc.gap})
    values = [expansion.laplace_transform(spec, c) for c in (0.0, 0.1, 0.5, 1.0)]
    mono = all(a >= b for a, b in zip(values, values[1:])) and values[0] == 1.0
    check("expansion.laplace_monotone", mono, {"values": values})
    paths = expansion.sample_direct(g, 32, 4000, cfg.seed)
    X = np.stack([p.values for p in paths])
    mean_max = float(np.abs(X.mean(axis=0)).max())
    band = 5.0 * float(X.std(axis=0).max()) / math.sqrt(len(paths))
    check("expansion.zero_mean", mean_max <= max(band, 1e-12), {"max_mean": mean_max, "band_5sigma": band})

    ok = all(c["ok"] for c in checks)
    _write_json(_out(cfg, "verify.json"), {"generator": cfg.generator, "ok": ok, "checks": checks})
    if not ok:
        failed = [c["name"] for c in checks if not c["ok"]]
        raise NumericError(f"verify failed: {failed}")
    return 0


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "eigenfunctions": _cmd_eigenfunctions,
    "charfn": _cmd_charfn,
    "sample": _cmd_sample,
    "laplace": _cmd_laplace,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
}


def run(cfg: RunConfig) -> int:
    return _DISPATCH[cfg.command](cfg)


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klspec",
        description="Spectral toolkit for Wiener processes with a g-weighted "
                    "stochastic-integral drift: eigenvalues, eigenfunctions, "
                    "path sampling, Laplace transforms, and a Nystrom oracle.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration; flags override its entries")
    parser.add_argument("--generator", help="preset name or inline JSON descriptor")
    parser.add_argument("--K", type=int, help="number of eigenpairs")
    parser.add_argument("--n", type=int, help="oracle discretization size")
    parser.add_argument("--grid-n", dest="grid_n", type=int, help="uniform grid cells on [0,1]")
    parser.add_argument("--n-paths", dest="n_paths", type=int, help="Monte Carlo path count")
    parser.add_argument("--seed", type=int, help="RNG seed")
    parser.add_argument("--c", dest="c_list", help="comma-separated Laplace arguments")
    parser.add_argument("--quad-order", dest="quad_order", type=int, help="per-panel quadrature order")
    parser.add_argument("--quad-panels", dest="quad_panels", type=int,
                        help="quadrature panel override (0 = automatic)")
    parser.add_argument("--engine", choices=ENGINES, help="spectrum engine")
    parser.add_argument("--method", choices=("kl", "direct"), help="sampler for the sample command")
    parser.add_argument("--range", help="charfn lambda window, e.g. 0.001,0.35")
    parser.add_argument("--points", type=int, help="charfn sample count")
    parser.add_argument("--tail", choices=("none", "geometric"), help="Laplace tail mode")
    parser.add_argument("--out-dir", dest="out_dir", help="artifact directory")
    return parser


def _config_from_args(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}")
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {args.config} is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ValidationError("config root must be a JSON object")
    data["command"] = args.command
    for key in ("generator", "K", "n", "grid_n", "n_paths", "seed", "quad_order",
                "quad_panels", "engine", "method", "points", "tail", "out_dir"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if args.c_list is not None:
        data["c_list"] = [float(v) for v in args.c_list.split(",")]
    if args.range is not None:
        parts = args.range.split(",")
        if len(parts) != 2:
            raise ValidationError(f"--range needs 'lo,hi', got {args.range!r}")
        data["range"] = [float(parts[0]), float(parts[1])]
    if isinstance(data.get("generator"), str) and data["generator"].lstrip().startswith("{"):
        data["generator"] = json.loads(data["generator"])
    return RunConfig.from_dict(data)


def _limit_threads():
    cap = os.environ.get("KLSPEC_THREADS")
    if not cap:
        return
    try:
        count = max(1, int(cap))
    except ValueError:
        raise ValidationError(f"KLSPEC_THREADS must be an integer, got {cap!r}")
    import numba

    numba.set_num_threads(min(count, numba.config.NUMBA_NUM_THREADS))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _limit_threads()
        cfg = _config_from_args(args)
        return run(cfg)
    except ValidationError as exc:
        print(f"error ({args.command}): {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure ({args.command}): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
