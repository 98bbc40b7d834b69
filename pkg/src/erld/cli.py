"""Command-line entry point: ``erld <subcommand> [flags]``.

Parameters come from an optional flat JSON file (``--config``) and are
overridden by explicit flags.  Exit status: 0 success, 1 a ``verify``
violation, 2 an invalid configuration.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import decomposition as dec
from . import graph as gc
from . import homomorphism as hm
from . import montecarlo as mc
from . import rates
from . import spectral as sp

SUBCOMMANDS = ("sample", "spectrum", "hom", "decompose", "classify", "prune",
               "rates", "tail", "conditional", "verify")
EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything a run needs.  ``None`` means "use the subcommand default"."""

    subcommand: str | None = None
    # RegimeParams fields
    n: int | None = None
    p: float | None = None
    delta: float | None = None
    delta_hat: float | None = None
    t: int | None = None
    eps: float | None = None
    eta: float | None = None
    # run control
    seed: int | None = None
    samples: int | None = None
    output: str | None = None
    format: str | None = None
    workers: int | None = None
    # subcommand extras
    graph: str | None = None
    fixture: str | None = None
    theta: float | None = None
    gamma_star: float | None = None
    statistic: str | None = None
    threshold: float | None = None
    exact: bool | None = None
    batches: int | None = None
    p_min: float | None = None
    p_max: float | None = None
    p_points: int | None = None
    regime: str | None = None
    c_bar: float | None = None
    c_star: float | None = None
    modules: list | None = None

    @classmethod
    def keys(cls) -> set[str]:
        return {f.name for f in fields(cls)}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - cls.keys()
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a flat JSON object")
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def to_file(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    def merged(self, overrides: dict) -> "ExperimentConfig":
        d = asdict(self)
        d.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig(**d)

    def get(self, key: str, default=None):
        v = getattr(self, key)
        return default if v is None else v

    def params(self, n: int | None = None) -> gc.RegimeParams:
        n = self.n if n is None else n
        if n is None or self.p is None:
            raise ConfigError("n and p are required")
        kw = {k: getattr(self, k) for k in ("delta", "delta_hat", "t", "eps", "eta") if getattr(self, k) is not None}
        try:
            return gc.RegimeParams(n=n, p=self.p, **kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


# --- output helpers -------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return "%.17g" % v
    return v


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, cfg: ExperimentConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- graph input ------------------------------------------------------------------

_FIXTURE = re.compile(r"^([KCSP])(\d+)$")


def fixture_graph(name: str) -> gc.Graph:
    """K<m>, C<k>, S<d> (star with d leaves), P<k> (path on k vertices)."""
    m = _FIXTURE.match(name)
    if not m:
        raise ConfigError(f"unknown fixture {name!r}; use K<m>, C<k>, S<d> or P<k>")
    kind, k = m.group(1), int(m.group(2))
    try:
        return {"K": gc.complete_graph, "C": gc.cycle_graph, "S": gc.star_graph, "P": gc.path_graph}[kind](k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_graph(cfg: ExperimentConfig) -> gc.Graph:
    if cfg.graph and cfg.fixture:
        raise ConfigError("give at most one of graph and fixture")
    if cfg.graph:
        try:
            return gc.read_edge_list(cfg.graph)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read graph {cfg.graph}: {exc}") from exc
    if cfg.fixture:
        return fixture_graph(cfg.fixture)
    if cfg.n is None or cfg.p is None:
        raise ConfigError("need a graph: --graph, --fixture, or --n/--p/--seed to sample one")
    if not 0 <= cfg.p <= 1:
        raise ConfigError("p must lie in [0, 1]")
    return gc.sample_er(cfg.n, cfg.p, cfg.get("seed", 0))


# --- subcommands ------------------------------------------------------------------

def cmd_sample(cfg):
    g = load_graph(cfg)
    if cfg.get("format", "edgelist") == "json":
        return _json({"n": g.n, "edges": [[u, v] for u, v in g.sorted_edges()]})
    return gc.format_edge_list(g)


def cmd_spectrum(cfg):
    rep = sp.bound_report(load_graph(cfg))
    if cfg.get("format", "csv") == "json":
        return _json(rep.to_dict())
    rows = [("lambda", "value", rep.lambda_, "")]
    rows += [(k, "lower", v, "") for k, v in rep.lower_bounds().items()]
    rows += [(k, "upper", v, "") for k, v in rep.upper_bounds().items()]
    rows += [(k, "absent", "", why) for k, why in sorted(rep.absent.items())]
    return _csv(["quantity", "kind", "value", "note"], rows)


def cmd_hom(cfg):
    g = load_graph(cfg)
    t = cfg.get("t", 3)
    total = hm.hom_cycle(g, t)
    local = hm.hom_cycle_edge_all(g, t)
    if cfg.get("format", "csv") == "json":
        return _json({"t": t, "total": str(total),
                      "per_edge": [[u, v, str(c)] for (u, v), c in sorted(local.items())]})
    rows = [("total", "", "", total)] + [("edge", u, v, c) for (u, v), c in sorted(local.items())]
    return _csv(["kind", "u", "v", "count"], rows)


def cmd_decompose(cfg):
    g = load_graph(cfg)
    d = dec.decompose(g, cfg.params(g.n))
    if cfg.get("format", "csv") == "json":
        return _json(d.to_dict())
    rows = [("vertex", cls, v, "") for cls in ("V_H", "V_M", "V_L1", "V_L2") for v in sorted(getattr(d, cls))]
    rows += [("edge", name, u, v) for name, sg in sorted(d.subgraphs.items()) for u, v in sg.sorted_edges()]
    return _csv(["kind", "name", "a", "b"], rows)


def cmd_classify(cfg):
    g = load_graph(cfg)
    rep = dec.classify(g, cfg.params(g.n), cfg.get("c_bar", dec.DEFAULT_C_BAR), cfg.c_star)
    if cfg.get("format", "csv") == "json":
        return _json(rep.to_dict())
    rows = [(k, "flag", "", v) for k, v in (("is_preseed_surrogate", rep.is_preseed_surrogate), ("is_seed", rep.is_seed),
                                             ("is_core", rep.is_core), ("is_strong_core", rep.is_strong_core))]
    rows += [(k, "condition", rep.thresholds[k], v) for k, v in rep.conditions.items() if k in rep.thresholds]
    rows += [(k, "condition", rep.thresholds["edge_cap"], v) for k, v in rep.conditions.items() if k in ("S2", "C2")]
    return _csv(["name", "kind", "threshold", "value"], rows)


def cmd_prune(cfg):
    g = load_graph(cfg)
    if (cfg.theta is None) == (cfg.gamma_star is None):
        raise ConfigError("prune needs exactly one of theta and gamma_star")
    t = cfg.get("t", 3)
    if cfg.theta is not None:
        h, removed = dec.prune_core(g, t, cfg.theta)
        info = {"mode": "core", "theta": cfg.theta, "t": t, "removed": removed,
                "hom_before": str(hm.hom_cycle(g, t)), "hom_after": str(hm.hom_cycle(h, t))}
    else:
        h = dec.gamma_prune_step(g, cfg.gamma_star, cfg.params(g.n))
        info = {"mode": "gamma", "gamma_star": cfg.gamma_star, "removed": g.num_edges - h.num_edges}
    if cfg.get("format", "edgelist") == "json":
        info["edges"] = [[u, v] for u, v in h.sorted_edges()]
        info["n"] = h.n
        return _json(info)
    return gc.format_edge_list(h)


def cmd_rates(cfg):
    if cfg.n is None:
        raise ConfigError("rates needs n")
    if cfg.p is not None:
        ps = [cfg.p]
    else:
        lo, hi, k = cfg.get("p_min", 0.002), cfg.get("p_max", 0.05), cfg.get("p_points", 50)
        if not 0 < lo < hi < 1 or k < 2:
            raise ConfigError("need 0 < p_min < p_max < 1 and p_points >= 2")
        ps = [float(x) for x in np.geomspace(lo, hi, k)]
    regime = cfg.get("regime", "intermediate")
    if regime not in ("sparse", "intermediate", "hom"):
        raise ConfigError(f"unknown regime {regime!r}")
    reports = []
    for p in ps:
        prm = cfg.merged({"p": p}).params()
        try:
            reports.append(rates.rate_report(prm, regime))
        except ValueError as exc:
            raise ConfigError(f"p={p}: {exc}") from exc
    if cfg.get("format", "csv") == "json":
        return _json([asdict(r) for r in reports])
    rows = [(r.n, r.p, r.alpha, r.clique_cost, r.hub_cost, r.dominant_structure, r.rate, r.speed) for r in reports]
    return _csv(["n", "p", "alpha", "clique_cost", "hub_cost", "dominant", "rate", "speed"], rows)


def _event(cfg) -> mc.Event:
    stat = cfg.get("statistic", "spectral_radius")
    if cfg.threshold is None:
        raise ConfigError("threshold is required")
    try:
        return mc.Event(stat, cfg.threshold, cfg.get("t", 2))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_tail(cfg):
    ev = _event(cfg)
    if cfg.n is None or cfg.p is None or not 0 <= cfg.p <= 1:
        raise ConfigError("tail needs n and p in [0, 1]")
    samples, batches, seed = cfg.get("samples", 1000), cfg.get("batches", 1), cfg.get("seed", 0)
    if samples < 1 or batches < 1 or samples % batches:
        raise ConfigError("samples must be a positive multiple of batches")
    rows, hits = [], 0
    for b in range(batches):
        est = mc.estimate_tail(cfg.n, cfg.p, ev.statistic, ev.threshold, samples // batches,
                               mc.replicate_seed(seed, b) if batches > 1 else seed, ev.t, cfg.workers)
        hits += est.hits
        rows.append((b, est.samples, est.hits, est.p_hat, *est.wilson_interval))
    exact = None
    if cfg.exact:
        if cfg.n > 5:
            raise ConfigError("exact tails need n <= 5")
        exact = mc.exhaustive_tail(cfg.n, cfg.p, ev.statistic, ev.threshold, ev.t)
    if cfg.get("format", "csv") == "json":
        out = {"event": ev.describe(), "batches": [dict(zip(("batch", "samples", "hits", "p_hat", "wilson_lo", "wilson_hi"), r)) for r in rows],
               "hits": hits, "samples": samples, "p_hat": hits / samples}
        if exact is not None:
            out["exact"] = float(exact)
            out["exact_fraction"] = str(exact)
        return _json(out)
    header = ["batch", "samples", "hits", "p_hat", "wilson_lo", "wilson_hi"]
    if exact is not None:
        header.append("exact")
        rows = [r + (float(exact),) for r in rows]
    return _csv(header, rows)


def cmd_conditional(cfg):
    if cfg.n is None or cfg.p is None:
        raise ConfigError("conditional needs n and p")
    ev = _event(cfg) if cfg.threshold is not None else None
    law = mc.conditional_max_degree(cfg.n, cfg.p, ev, cfg.get("samples", 1000), cfg.get("seed", 0))
    if cfg.get("format", "csv") == "json":
        return law.to_json() + "\n"
    rows = [(d, c, c / law.accepted) for d, c in law.histogram.items()]
    return _csv(["max_degree", "count", "fraction"], rows)


COMMANDS = {
    "sample": cmd_sample, "spectrum": cmd_spectrum, "hom": cmd_hom, "decompose": cmd_decompose,
    "classify": cmd_classify, "prune": cmd_prune, "rates": cmd_rates, "tail": cmd_tail,
    "conditional": cmd_conditional,
}


def cmd_verify(cfg) -> int:
    from .verify import MODULE_CHECKS, run_suite

    mods = cfg.modules
    if mods:
        unknown = set(mods) - set(MODULE_CHECKS)
        if unknown:
            raise ConfigError(f"unknown modules {sorted(unknown)}")
    checks = run_suite(mods, cfg.workers)
    text = "\n".join(c.line() for c in checks)
    failed = [c for c in checks if not c.ok]
    text += f"\n{len(checks) - len(failed)}/{len(checks)} checks passed\n"
    _emit(text, cfg)
    return EXIT_VIOLATION if failed else EXIT_OK


# --- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file; flags override its values")
    g = common.add_argument_group("regime")
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--delta-hat", type=float)
    g.add_argument("--t", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--eta", type=float)
    r = common.add_argument_group("run")
    r.add_argument("--seed", type=int)
    r.add_argument("--samples", type=int)
    r.add_argument("--output", "-o")
    r.add_argument("--format", choices=["csv", "json", "edgelist"])
    r.add_argument("--workers", type=int, help=f"worker processes (default ${mc.WORKERS_ENV} or 1)")
    r.add_argument("--graph", help="edge-list file (1-based 'n m' header)")
    r.add_argument("--fixture", help="K<m>, C<k>, S<d> or P<k>")

    parser = argparse.ArgumentParser(prog="erld", description="Large deviations lab for λ(G(n,p)) and Hom(C_2t, G(n,p)).")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "sample": "draw G(n,p) and emit its edge list",
        "spectrum": "λ(G) and the bound report",
        "hom": "Hom(C_2t, G) and per-edge counts",
        "decompose": "degree-class decomposition",
        "classify": "seed / core / strong-core conditions",
        "prune": "prune_core (--theta) or gamma_prune_step (--gamma-star)",
        "rates": "rate report over a p-grid",
        "tail": "Monte Carlo (and exact, n <= 5) upper-tail probability",
        "conditional": "law of the max degree given the event",
        "verify": "run the invariant suite",
    }
    ps = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    ps["classify"].add_argument("--c-bar", type=float)
    ps["classify"].add_argument("--c-star", type=float)
    ps["prune"].add_argument("--theta", type=float)
    ps["prune"].add_argument("--gamma-star", type=float)
    ps["rates"].add_argument("--p-min", type=float)
    ps["rates"].add_argument("--p-max", type=float)
    ps["rates"].add_argument("--p-points", type=int)
    ps["rates"].add_argument("--regime", choices=["sparse", "intermediate", "hom"])
    for name in ("tail", "conditional"):
        ps[name].add_argument("--statistic", choices=list(mc.STATISTICS))
        ps[name].add_argument("--threshold", type=float)
    ps["tail"].add_argument("--exact", action="store_true", default=None)
    ps["tail"].add_argument("--batches", type=int)
    ps["verify"].add_argument("--modules", nargs="+")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if cfg.subcommand not in (None, args.subcommand):
        raise ConfigError(f"config is for {cfg.subcommand!r}, not {args.subcommand!r}")
    flags = {k: v for k, v in vars(args).items() if k != "config" and k in ExperimentConfig.keys()}
    return cfg.merged(flags)


def run(cfg: ExperimentConfig) -> int:
    if cfg.subcommand == "verify":
        return cmd_verify(cfg)
    if cfg.subcommand not in COMMANDS:
        raise ConfigError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.workers is not None and cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    _emit(COMMANDS[cfg.subcommand](cfg), cfg)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(resolve_config(args))
    except (ConfigError, mc.InfeasibleEvent, hm.BudgetExceeded) as exc:
        print(f"erld: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # library precondition failures are configuration problems at this level
        print(f"erld: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def run_to_string(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
