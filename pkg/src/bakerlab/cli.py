"""Experiment driver: ``bakerlab <subcommand> [options]``.

Settings come from built-in defaults, then an optional flat ``key = value``
file given by ``--config``, then command-line flags (flags win).
"""
import argparse
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import analytic, hyper, io, validate
from .baker import BakerMap
from .perturb import (
    DEFAULT_MEMORY_BUDGET,
    MemoryBudgetError,
    PerturbationSpec,
    check_budget,
    evolve_histories,
    extend_histories,
    save_ensemble,
)
from .qcore import PureState
from .signatures import entropy_growth, fidelity_decay

SUBCOMMANDS = ("entropy", "fidelity", "tradeoff", "s-series", "analytic", "validate")
PERT_ALIASES = {
    "y-rot": "y-rotation-middle",
    "y-rotation-middle": "y-rotation-middle",
    "x-flip": "x-flip-rightmost",
    "x-flip-rightmost": "x-flip-rightmost",
}
CURVES = ("sphere-sparse", "sphere-exact", "halfspace", "product")


@dataclass
class ExperimentConfig:
    N: int = 5
    n: str = "1"
    alpha: float = 0.2
    t: int = 10
    t_min: int = 1
    seed: int = 0
    pert: str = "y-rot"
    methods: str = "temporal,genetic"
    out: str = "."
    precision: str = "double"
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    threads: int | None = None
    population: int = 64
    generations: int = 500
    curve: str = "all"
    D: int = 32
    N_vec: int = 65536
    save_ensemble: str | None = None

    @property
    def shifts(self):
        text = str(self.n).strip().lower()
        if text == "all":
            return tuple(range(1, self.N + 1))
        return tuple(int(v) for v in text.split(","))

    @property
    def method_list(self):
        return tuple(m.strip() for m in self.methods.split(",") if m.strip())

    def spec(self):
        kind = PERT_ALIASES.get(self.pert)
        if kind is None:
            raise ValueError(f"unknown perturbation {self.pert!r}; use one of {sorted(PERT_ALIASES)}")
        if kind == "y-rotation-middle":
            return PerturbationSpec.y_rotation_middle(self.alpha)
        return PerturbationSpec.x_flip_rightmost()

    def validate(self, needs_ensemble=True):
        for n in self.shifts:
            BakerMap(self.N, n)
        self.spec().target(self.N)
        if self.precision not in ("double", "single"):
            raise ValueError(f"precision must be double or single, got {self.precision!r}")
        if not 0 <= self.t_min <= self.t:
            raise ValueError(f"need 0 <= t_min <= t, got t_min={self.t_min}, t={self.t}")
        unknown = set(self.method_list) - {"temporal", "genetic", "exhaustive"}
        if unknown:
            raise ValueError(f"unknown grouping methods {sorted(unknown)}")
        if needs_ensemble:
            check_budget(self.N, self.t, self.precision, self.memory_budget)

    def metadata(self, command):
        meta = {k: v for k, v in asdict(self).items() if v is not None}
        meta["command"] = command
        return meta


_FIELD_TYPES = {"N": int, "alpha": float, "t": int, "t_min": int, "seed": int,
                "memory_budget": int, "threads": int, "population": int,
                "generations": int, "D": int, "N_vec": int}


def build_config(file_values, flag_values):
    merged = {}
    fields = ExperimentConfig.__dataclass_fields__
    for source in (file_values, flag_values):
        for key, value in source.items():
            if value is None:
                continue
            if key not in fields:
                raise ValueError(f"unknown config key {key!r}")
            merged[key] = _FIELD_TYPES[key](value) if key in _FIELD_TYPES else str(value)
    return ExperimentConfig(**merged)


def _parser():
    p = argparse.ArgumentParser(prog="bakerlab", description=__doc__.splitlines()[0],
                                allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--N", type=int, help="number of qubits")
    common.add_argument("--n", help="shift parameter(s): an integer, a comma list or 'all'")
    common.add_argument("--alpha", type=float, help="perturbation strength (rotation angle 2 pi alpha)")
    common.add_argument("--t", type=int, help="number of map iterations")
    common.add_argument("--t-min", dest="t_min", type=int, help="first iteration for s-series")
    common.add_argument("--seed", type=int)
    common.add_argument("--pert", help="perturbation: y-rot (middle qubit) or x-flip (rightmost)")
    common.add_argument("--methods", help="grouping methods, comma separated: temporal,genetic,exhaustive")
    common.add_argument("--out", help="output directory")
    common.add_argument("--precision", choices=("double", "single"))
    common.add_argument("--memory-budget", dest="memory_budget", type=int, help="bytes")
    common.add_argument("--threads", type=int, help="worker cap (default: BAKERLAB_THREADS or all cores)")
    common.add_argument("--population", type=int)
    common.add_argument("--generations", type=int)
    common.add_argument("--save-ensemble", dest="save_ensemble", help="write the ensemble as BKE1")
    common.add_argument("--curve", help=f"analytic curve: {', '.join(CURVES)} or all")
    common.add_argument("--D", type=int, help="Hilbert dimension for analytic curves")
    common.add_argument("--N-vec", dest="N_vec", type=int, help="vector count for sphere curves")
    helps = {
        "entropy": "system entropy H_S(t) for each shift parameter",
        "fidelity": "fidelity decay under the all-ones history",
        "tradeoff": "information-entropy trade-off at iteration t, with s",
        "s-series": "s against t for temporal and genetic grouping",
        "analytic": "closed-form baseline curves",
        "validate": "run the oracle checks",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], allow_abbrev=False)
    return p


def _out_dir(cfg):
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _psi0(cfg):
    return PureState.zeros(cfg.N)


def cmd_entropy(cfg, log):
    cfg.validate()
    out = _out_dir(cfg)
    series = []
    for n in cfg.shifts:
        s = entropy_growth(_psi0(cfg), BakerMap(cfg.N, n), cfg.spec(), cfg.t, cfg.precision,
                           cfg.memory_budget, cfg.threads)
        name = out / f"entropy_N{cfg.N}_n{n}.csv"
        io.write_csv(name, ["t", "H"], s.points, {**cfg.metadata("entropy"), "n": n})
        series.append((name, 1, 2, f"n={n}"))
        log(f"{name}: H({cfg.t}) = {s.values[-1]:.6f} bits")
    io.write_gnuplot(out / f"entropy_N{cfg.N}.gp", series, f"system entropy, N={cfg.N}",
                     "t", "H (bits)")
    return 0


def cmd_fidelity(cfg, log):
    cfg.validate(needs_ensemble=False)
    out = _out_dir(cfg)
    series = []
    for n in cfg.shifts:
        s = fidelity_decay(_psi0(cfg), BakerMap(cfg.N, n), cfg.spec(), cfg.t)
        name = out / f"fidelity_N{cfg.N}_n{n}.csv"
        io.write_csv(name, ["t", "F"], s.points, {**cfg.metadata("fidelity"), "n": n})
        series.append((name, 1, 2, f"n={n}"))
        log(f"{name}: F({cfg.t}) = {s.values[-1]:.6g}")
    io.write_gnuplot(out / f"fidelity_N{cfg.N}.gp", series, f"fidelity decay, N={cfg.N}",
                     "t", "F", logy=True)
    return 0


def _ga_config(cfg):
    return hyper.GAConfig(population=cfg.population, generations=cfg.generations)


def _snapshot_path(cfg, n):
    if len(cfg.shifts) == 1:
        return cfg.save_ensemble
    base = Path(cfg.save_ensemble)
    return str(base.with_name(f"{base.stem}_n{n}{base.suffix}"))


def cmd_tradeoff(cfg, log):
    cfg.validate()
    out = _out_dir(cfg)
    series = []
    for n in cfg.shifts:
        bmap = BakerMap(cfg.N, n)
        ens = evolve_histories(_psi0(cfg), bmap, cfg.spec(), cfg.t, cfg.precision,
                               cfg.memory_budget, cfg.threads)
        if cfg.save_ensemble:
            save_ensemble(_snapshot_path(cfg, n), ens)
        meta = {"N": cfg.N, "n": n, "alpha": cfg.alpha, "t": cfg.t, "seed": cfg.seed}
        curve = hyper.tradeoff_curve(ens, cfg.method_list, _ga_config(cfg), cfg.seed, meta=meta)
        stem = f"tradeoff_N{cfg.N}_n{n}_t{cfg.t}"
        io.write_curve_json(out / f"{stem}.json", curve, {**cfg.metadata("tradeoff"), "n": n})
        for method in cfg.method_list:
            pts = curve.by_method(method)
            name = out / f"{stem}_{method}.csv"
            io.write_csv(name, ["I", "H"], [(p.I, p.H) for p in pts],
                         {**cfg.metadata("tradeoff"), "n": n, "method": method, "H_S": curve.H_S})
            series.append((name, 2, 1, f"n={n} {method}"))
        s_text = "undefined" if curve.s is None else f"{curve.s:.6g} ({curve.s_method})"
        log(f"{stem}.json: H_S = {curve.H_S:.6f}, s = {s_text}")
    io.write_gnuplot(out / f"tradeoff_N{cfg.N}_t{cfg.t}.gp", series,
                     f"information-entropy trade-off, N={cfg.N}, t={cfg.t}", "H (bits)", "I (bits)")
    return 0


def _s_or_blank(h_s, h):
    try:
        return hyper.s_parameter(h_s, h)
    except hyper.UndefinedSError:
        return None


def cmd_s_series(cfg, log):
    cfg.validate()
    out = _out_dir(cfg)
    spec = cfg.spec()
    series = []
    for n in cfg.shifts:
        bmap = BakerMap(cfg.N, n)
        rows = []
        ens = evolve_histories(_psi0(cfg), bmap, spec, cfg.t_min, cfg.precision,
                               cfg.memory_budget, cfg.threads)
        for t in range(cfg.t_min, cfg.t + 1):
            if t > ens.t:
                ens = extend_histories(ens, bmap, spec, 1, cfg.memory_budget, cfg.threads)
            if t == 0:
                continue
            h_s = hyper.system_entropy(ens)
            s_temporal = _s_or_blank(h_s, hyper.temporal_grouping(ens, 1).best_H)
            rep = hyper.genetic_bipartition(ens, _ga_config(cfg), cfg.seed)
            s_genetic = None
            if hyper.ONE_BIT_BAND[0] <= rep.info <= hyper.ONE_BIT_BAND[1]:
                s_genetic = _s_or_blank(h_s, rep.avg_entropy)
            rows.append((t, s_temporal, s_genetic))
        name = out / f"sseries_N{cfg.N}_n{n}.csv"
        io.write_csv(name, ["t", "s_temporal", "s_genetic"], rows,
                     {**cfg.metadata("s-series"), "n": n})
        series += [(name, 1, 2, f"n={n} temporal"), (name, 1, 3, f"n={n} genetic")]
        log(f"{name}: {len(rows)} rows")
    io.write_gnuplot(out / f"sseries_N{cfg.N}.gp", series, f"s against t, N={cfg.N}", "t", "s")
    return 0


def cmd_analytic(cfg, log):
    out = _out_dir(cfg)
    names = CURVES if cfg.curve == "all" else tuple(c.strip() for c in cfg.curve.split(","))
    series = []
    for name in names:
        if name == "sphere-sparse":
            curve = analytic.sphere_curve(cfg.D, cfg.N_vec, "sparse")
        elif name == "sphere-exact":
            curve = analytic.sphere_curve(cfg.D, cfg.N_vec, "exact")
        elif name == "halfspace":
            curve = analytic.halfspace_curve(cfg.D)
        elif name == "product":
            curve = analytic.product_curve(cfg.N)
        else:
            raise ValueError(f"unknown curve {name!r}; use one of {CURVES} or all")
        stem = out / f"analytic_{name}"
        io.write_curve_json(stem.with_suffix(".json"), curve, cfg.metadata("analytic"))
        io.write_csv(stem.with_suffix(".csv"), ["I", "H"], [(p.I, p.H) for p in curve.points],
                     {**cfg.metadata("analytic"), "curve": name})
        series.append((stem.with_suffix(".csv"), 2, 1, name))
        log(f"{stem}.json: {len(curve.points)} points, s = {curve.s:.6g}")
    io.write_gnuplot(out / "analytic.gp", series, "baseline trade-off curves", "H (bits)", "I (bits)")
    return 0


def cmd_validate(cfg, log):
    return 0 if validate.run_all(log) else 1


COMMANDS = {
    "entropy": cmd_entropy,
    "fidelity": cmd_fidelity,
    "tradeoff": cmd_tradeoff,
    "s-series": cmd_s_series,
    "analytic": cmd_analytic,
    "validate": cmd_validate,
}


def run(command, cfg, log=print):
    threads = cfg.threads
    if threads is None and os.environ.get("BAKERLAB_THREADS"):
        threads = int(os.environ["BAKERLAB_THREADS"])
    if threads is None:
        return COMMANDS[command](cfg, log)
    cfg.threads = threads
    with threadpool_limits(limits=threads):
        return COMMANDS[command](cfg, log)


def main(argv=None):
    args = vars(_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    try:
        file_values = io.read_config(config_path) if config_path else {}
        cfg = build_config(file_values, args)
        return run(command, cfg)
    except (ValueError, MemoryBudgetError) as exc:
        print(f"bakerlab {command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
