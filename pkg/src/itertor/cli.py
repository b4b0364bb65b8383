"""Command-line front end: ``itertor tower|thh|ramify|verify``.

Exit codes:

    0  success
    1  verify found an engine/oracle divergence
    2  invalid arguments
    3  resource limit exceeded
    4  internal invariant failure
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Callable, Sequence

from .algebra import AlgebraError, InvariantError, PoincareSeries
from .bar import Limits, ResourceLimitError
from .fpx import PolynomialSyntaxError, format_polynomial, parse_polynomial
from .oracle import predict_series
from .thh import ThhResult, hh1_dimension, ramification, thh_local, thh_z
from .tower import TowerSpec, parse_start, run_tower_full

EXIT_OK = 0
EXIT_DIVERGENCE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_INVARIANT = 4

CITE_TOWER = "B^1 = start algebra, B^(k+1) = Tor^(B^k)(k, k)"
CITE_VERIFY = "bar-complex engine vs closed-form piece calculus"
CITE_RAMIFY = "HH_1(B; B/P) = B/P if P divides the different (f'), else 0"

FORMATS = ("plain", "json", "csv")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    p: int | None = None
    n: int | None = None
    cap: int | None = None
    start: str | None = None
    iterations: int = 0
    ring: str | None = None
    poly: str | None = None
    prime_index: int | None = None
    ramified: bool = False
    q: int | None = None
    format: str = "plain"
    seed: int | None = None
    max_words: int = Limits.max_words
    out: str | None = None
    bidims: bool = False
    primes: tuple[int, ...] = (2, 3)
    max_iterations: int = 3
    method: str = "engine"
    jobs: int = 1

    def __post_init__(self):
        if self.cap is not None and self.cap < 0:
            raise UsageError("--cap must be nonnegative")
        if self.max_words <= 0:
            raise UsageError("--max-words must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")
        if self.format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")

    @property
    def limits(self) -> Limits:
        return Limits(max_words=self.max_words)


# -- rendering -------------------------------------------------------------------


def dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv_table(columns: Sequence[str], series: Sequence[Sequence[int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", *columns])
    length = max((len(s) for s in series), default=0)
    for t in range(length):
        w.writerow([t, *(s[t] if t < len(s) else "" for s in series)])
    return buf.getvalue()


def _plain_table(columns: Sequence[str], series: Sequence[Sequence[int]], header: str) -> str:
    width = max((len(c) for c in columns), default=0)
    lines = [header]
    for name, s in zip(columns, series):
        lines.append(f"{name:<{width}}  " + " ".join(str(d) for d in s))
    return "\n".join(lines) + "\n"


def render(payload: dict, fmt: str, columns: Sequence[str]) -> str:
    if fmt == "json":
        return dump_json(payload)
    series = payload.get("series", [])
    if fmt == "csv":
        return _csv_table(columns, series)
    text = _plain_table(columns, series, f"# {payload['citation']}")
    if "bidims" in payload:
        text += "bidims  " + " ".join(f"({s},{t}):{d}" for s, t, d in payload["bidims"]) + "\n"
    return text


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".itertor-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- subcommands -------------------------------------------------------------------


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError(f"{cfg.subcommand} needs {', '.join(missing)}")


def cmd_tower(cfg: RunConfig) -> tuple[int, str]:
    _require(cfg, "p", "start", "cap")
    kind, degree = parse_start(cfg.start)
    spec = TowerSpec(cfg.p, kind, degree, cfg.iterations, cfg.cap)
    result = run_tower_full(spec, limits=cfg.limits, order_seed=cfg.seed)
    payload = {
        "query": {"command": "tower", **spec.to_json()},
        "citation": CITE_TOWER,
        "series": [list(a.series().dims) for a in result.stages],
    }
    if cfg.bidims and result.tors:
        payload["bidims"] = result.tors[-1].bidims_json()
    columns = [f"B{k + 1}" for k in range(len(result.stages))]
    return EXIT_OK, render(payload, cfg.format, columns)


def _thh_result(cfg: RunConfig) -> tuple[ThhResult, dict]:
    _require(cfg, "ring", "n", "p", "cap")
    extra: dict = {}
    if cfg.ring == "Z":
        if cfg.poly is not None or cfg.ramified or cfg.q is not None or cfg.prime_index is not None:
            raise UsageError("--ring Z takes no --poly, --ramified, --q or --prime-index")
        return thh_z(cfg.n, cfg.p, cfg.cap, method=cfg.method, limits=cfg.limits), extra
    if cfg.ring != "local":
        raise UsageError(f"--ring must be Z or local, got {cfg.ring!r}")
    if cfg.poly is not None:
        if cfg.ramified or cfg.q is not None:
            raise UsageError("--poly is exclusive with --ramified and --q")
        f = parse_polynomial(cfg.poly)
        report = ramification(f, cfg.p)
        index = 0 if cfg.prime_index is None else cfg.prime_index
        if not 0 <= index < len(report.factors):
            raise UsageError(f"--prime-index {index} out of range (0..{len(report.factors) - 1})")
        prime = report.factors[index]
        ramified = prime.ramified
        q = cfg.p**prime.residue_degree
        extra["ramification"] = report.to_json()
        extra["prime"] = {"index": index, **prime.to_json(cfg.p)}
    else:
        if cfg.prime_index is not None:
            raise UsageError("--prime-index needs --poly")
        ramified = cfg.ramified
        q = cfg.p if cfg.q is None else cfg.q
    return thh_local(cfg.n, ramified, cfg.p, q, cfg.cap, method=cfg.method, limits=cfg.limits), extra


def cmd_thh(cfg: RunConfig) -> tuple[int, str]:
    result, extra = _thh_result(cfg)
    payload = {
        "query": {"command": "thh", "method": cfg.method, **result.query},
        "citation": result.citation,
        "series": [list(result.series.dims)],
        **extra,
    }
    return EXIT_OK, render(payload, cfg.format, [f"THH^[{cfg.n}]"])


def cmd_ramify(cfg: RunConfig) -> tuple[int, str]:
    _require(cfg, "poly", "p")
    f = parse_polynomial(cfg.poly)
    report = ramification(f, cfg.p)
    payload = {
        "query": {"command": "ramify", "poly": format_polynomial(f), "p": cfg.p},
        "citation": CITE_RAMIFY,
        **report.to_json(),
        "hh1_dims": [hh1_dimension(f, cfg.p, i) for i in range(len(report.factors))],
    }
    if cfg.format == "json":
        return EXIT_OK, dump_json(payload)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "factor", "multiplicity", "q", "ramified", "hh1_dim"])
        for i, pf in enumerate(report.factors):
            j = pf.to_json(cfg.p)
            w.writerow([i, j["factor"], j["multiplicity"], j["q"], j["ramified"], payload["hh1_dims"][i]])
        return EXIT_OK, buf.getvalue()
    lines = [f"# {CITE_RAMIFY}", f"f = {format_polynomial(f)} mod {cfg.p}"]
    for i, pf in enumerate(report.factors):
        j = pf.to_json(cfg.p)
        verdict = "ramified" if pf.ramified else "unramified"
        lines.append(f"[{i}] {j['factor']}  multiplicity {j['multiplicity']}  q={j['q']}  {verdict}")
    lines.append(f"note: {report.caveat}")
    return EXIT_OK, "\n".join(lines) + "\n"


def verify_specs(primes: Sequence[int], iterations: int, cap: int) -> list[TowerSpec]:
    specs = []
    for p in primes:
        starts = [("poly", 2 * p)]
        if 2 * p - 2 >= 2:
            starts.append(("poly", 2 * p - 2))
        starts += [("ext", 1), ("ext", 2 * p - 1)]
        for kind, d in dict.fromkeys(starts):
            specs.append(TowerSpec(p, kind, d, iterations, cap))
    return specs


def first_divergence(
    engine: Sequence[PoincareSeries], oracle: Sequence[PoincareSeries]
) -> tuple[int, int, int, int] | None:
    """First ``(stage, degree, engine_dim, oracle_dim)`` where the series differ; stages count from 1."""
    for k, (e, o) in enumerate(zip(engine, oracle), start=1):
        for t, (a, b) in enumerate(zip(e.dims, o.dims)):
            if a != b:
                return k, t, a, b
    if len(engine) != len(oracle):
        return min(len(engine), len(oracle)) + 1, 0, -1, -1
    return None


def _engine_series(spec: TowerSpec, limits: Limits, seed: int | None) -> list[PoincareSeries]:
    return run_tower_full(spec, limits=limits, order_seed=seed).series()


def cmd_verify(cfg: RunConfig, predict: Callable = predict_series) -> tuple[int, str]:
    _require(cfg, "cap")
    specs = verify_specs(cfg.primes, cfg.max_iterations, cfg.cap)
    if cfg.jobs > 1:
        # map preserves input order, so the report does not depend on scheduling
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            engine = list(pool.map(_engine_series, specs, repeat(cfg.limits), repeat(cfg.seed)))
    else:
        engine = (_engine_series(s, cfg.limits, cfg.seed) for s in specs)
    divergence = None
    checked = 0
    for spec, series in zip(specs, engine):
        checked += 1
        hit = first_divergence(series, predict(spec))
        if hit:
            stage, degree, e, o = hit
            divergence = {"spec": spec.to_json(), "stage": stage, "degree": degree, "engine": e, "oracle": o}
            break
    payload = {
        "query": {
            "command": "verify",
            "primes": list(cfg.primes),
            "max_iterations": cfg.max_iterations,
            "cap": cfg.cap,
            "seed": cfg.seed,
        },
        "citation": CITE_VERIFY,
        "checked": checked,
        "divergence": divergence,
    }
    code = EXIT_OK if divergence is None else EXIT_DIVERGENCE
    d = divergence
    if cfg.format == "json":
        return code, dump_json(payload)
    if cfg.format == "csv":
        text = "status,p,start,stage,degree,engine,oracle\n"
        if d is None:
            return code, text + "ok,,,,,,\n"
        s = d["spec"]
        return code, text + f"diverged,{s['p']},{s['start']},{d['stage']},{d['degree']},{d['engine']},{d['oracle']}\n"
    if d is None:
        return code, f"OK: engine and oracle agree on {checked} towers (cap {cfg.cap}, up to {cfg.max_iterations} iterations)\n"
    s = d["spec"]
    return code, (
        f"DIVERGENCE: p={s['p']} start={s['start']} stage {d['stage']} degree {d['degree']}: "
        f"engine {d['engine']} != oracle {d['oracle']}\n"
    )


COMMANDS = {"tower": cmd_tower, "thh": cmd_thh, "ramify": cmd_ramify, "verify": cmd_verify}


# -- argument parsing ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _primes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated primes, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="plain")
    common.add_argument("--out", help="write output to this path (atomically)")
    common.add_argument("--seed", type=int, help="permute bar word order with this seed")
    common.add_argument("--max-words", type=int, default=Limits.max_words, help="max bar words per bidegree")

    parser = _Parser(prog="itertor", description="Iterated Tor towers and higher THH Poincare series.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    t = sub.add_parser("tower", parents=[common], help="run an iterated Tor tower")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--start", required=True, help="poly:<d> or ext:<d>")
    t.add_argument("--iterations", type=int, default=0)
    t.add_argument("--cap", type=int, required=True)
    t.add_argument("--bidims", action="store_true", help="include bidegrees of the last Tor")

    h = sub.add_parser("thh", parents=[common], help="higher THH series with residue-field coefficients")
    h.add_argument("--ring", choices=("Z", "local"), required=True)
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--cap", type=int, required=True)
    h.add_argument("--poly", help="monic integer polynomial defining the local ring, e.g. x^2+1")
    h.add_argument("--prime-index", type=int, help="which factor of f mod p selects P")
    h.add_argument("--ramified", action="store_true")
    h.add_argument("--q", type=int, help="residue field size (a power of p)")
    h.add_argument("--method", choices=("engine", "oracle"), default="engine")

    r = sub.add_parser("ramify", parents=[common], help="ramification of the primes above p")
    r.add_argument("--poly", required=True)
    r.add_argument("--p", type=int, required=True)

    v = sub.add_parser("verify", parents=[common], help="compare engine towers with the oracle")
    v.add_argument("--primes", type=_primes, default=(2, 3))
    v.add_argument("--iterations", dest="max_iterations", type=int, default=3)
    v.add_argument("--cap", type=int, default=24)
    v.add_argument("--jobs", type=int, default=1, help="worker processes for engine runs")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    known = RunConfig.__dataclass_fields__
    kwargs = {k: v for k, v in vars(args).items() if k in known and v is not None}
    return RunConfig(**kwargs)


def main(argv: Sequence[str] | None = None, *, predict: Callable = predict_series) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.subcommand == "verify":
            code, text = cmd_verify(cfg, predict=predict)
        else:
            code, text = COMMANDS[cfg.subcommand](cfg)
    except (UsageError, AlgebraError, PolynomialSyntaxError, ValueError, IndexError) as exc:
        msg = str(exc).splitlines()[0] if not isinstance(exc, PolynomialSyntaxError) else str(exc)
        print(f"itertor {args.subcommand}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"itertor {args.subcommand}: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvariantError, AssertionError) as exc:
        print(f"itertor {args.subcommand}: invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    emit(text, cfg.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
