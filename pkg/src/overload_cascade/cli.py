"""
Command-line interface.

Subcommands: gen, cascade, sweep, threshold, absorbing. Settings can come
from a flat ``key = value`` file given with ``--config``; keys are the long
flag names without the leading dashes (``k-avg = 10``), and flags given on
the command line win.

Exit codes: 0 success, 2 configuration error, 3 no threshold or
transition found, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

import numpy as np

from . import engine, experiment, netgen, theory
from .errors import ConfigError, EdgeListError, SolverDivergence, ThresholdNotFound

EXIT_OK, EXIT_CONFIG, EXIT_NOT_FOUND, EXIT_IO = 0, 2, 3, 4

# flag dest -> SweepConfig field
_FIELD = {
    "net": "net", "n": "n", "k_avg": "k_avg", "m": "m", "edge_file": "edge_file",
    "delta": "delta", "alpha": "alpha", "alpha_start": "alpha_start",
    "alpha_stop": "alpha_stop", "alpha_step": "alpha_step",
    "realizations": "realizations", "seed_count": "seed_count", "rng_seed": "rng_seed",
    "paired": "paired", "g_star": "g_star", "quantile": "quantile",
    "workers": "workers", "out": "out", "svg": "svg",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--net", choices=("er", "ba", "file"))
    p.add_argument("--n", type=int, help="node count")
    p.add_argument("--k-avg", dest="k_avg", type=float, help="target mean degree")
    p.add_argument("--m", type=int, help="BA attachment count (default round(k-avg/2))")
    p.add_argument("--edge-file", dest="edge_file", help="edge list for --net file")
    p.add_argument("--delta", type=float, help="load handed to each neighbour on failure")
    p.add_argument("--alpha", type=float, help="tolerance parameter")
    p.add_argument("--alpha-start", dest="alpha_start", type=float)
    p.add_argument("--alpha-stop", dest="alpha_stop", type=float)
    p.add_argument("--alpha-step", dest="alpha_step", type=float)
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed-count", dest="seed_count", type=int, help="initially failed nodes")
    p.add_argument("--rng-seed", dest="rng_seed", type=int)
    p.add_argument("--paired", action="store_true", default=None,
                   help="reuse one network and load draw per realization across alphas")
    p.add_argument("--g-star", dest="g_star", type=float, help="G level marking the onset")
    p.add_argument("--quantile", type=float, help="quantile of G compared with --g-star")
    p.add_argument("--out", help="output path (edge list or CSV)")
    p.add_argument("--svg", help="scatter plot path")
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="overload-cascade", description=__doc__.split("\n\n")[1])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a network and write its edge list")
    _common(p)
    p = sub.add_parser("cascade", help="run a single cascade and print the outcome")
    _common(p)
    p = sub.add_parser("sweep", help="simulate an alpha grid and write CSV/SVG")
    _common(p)
    p = sub.add_parser("threshold", help="analytic alpha_c, optionally against simulation")
    _common(p)
    p.add_argument("--simulate", action="store_true", help="also run the sweep and estimate the onset")
    p.add_argument("--poisson", action="store_true", help="use analytic Poisson p_k (ER only)")
    p.add_argument("--scan-step", dest="scan_step", type=float)
    p = sub.add_parser("absorbing", help="empirical vs analytic absorbing probabilities")
    _common(p)
    return parser


def _parse_value(key: str, raw: str):
    ftype = {f.name: f.type for f in fields(experiment.SweepConfig)}[key]
    raw = raw.strip()
    if key == "paired":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"bad boolean for paired: {raw!r}")
    try:
        if ftype.startswith("int"):
            return int(raw)
        if ftype.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            dest = key.lstrip("-").replace("-", "_")
            if dest not in _FIELD:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[_FIELD[dest]] = _parse_value(_FIELD[dest], val)
    return out


def config_from_args(args: argparse.Namespace) -> experiment.SweepConfig:
    values = read_config(args.config) if args.config else {}
    for dest, fname in _FIELD.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[fname] = v
    if values.get("edge_file") and "net" not in values:
        values["net"] = "file"
    return experiment.SweepConfig(**values)


def _network(cfg: experiment.SweepConfig) -> netgen.Network:
    return experiment.build_network(cfg, cfg.rng_seed)


def cmd_gen(cfg, args) -> int:
    if cfg.net == "file":
        raise ConfigError("gen needs --net er or --net ba")
    net = _network(cfg)
    if cfg.out:
        netgen.save_edge_list(net, cfg.out)
    else:
        sys.stdout.write(f"# nodes {net.node_count}\n")
        for u, v in net.edges():
            sys.stdout.write(f"{u} {v}\n")
    st = netgen.degree_stats(net)
    print(f"# {cfg.net}: N={net.node_count} E={net.edge_count} <k>={st.mean_degree:.4f} "
          f"k_max={st.k_max}", file=sys.stderr)
    return EXIT_OK


def cmd_cascade(cfg, args) -> int:
    if cfg.alpha is None:
        raise ConfigError("cascade needs --alpha")
    net = _network(cfg)
    seeds = np.random.SeedSequence(cfg.rng_seed & ((1 << 64) - 1)).generate_state(2, np.uint64)
    loads = engine.assign_loads(net.node_count, 0.0, 1.0, int(seeds[0]))
    out = engine.run_cascade(
        net,
        engine.LoadProfile(loads, cfg.alpha),
        engine.CascadeConfig(cfg.delta, seed_count=cfg.seed_count, rng_seed=int(seeds[1])),
    )
    print(f"nodes            {net.node_count}")
    print(f"mean_degree      {2 * net.edge_count / net.node_count:.6g}")
    print(f"alpha            {cfg.alpha:.6g}")
    print(f"delta            {cfg.delta:.6g}")
    print(f"seed_nodes       {' '.join(map(str, out.seed_nodes.tolist()))}")
    print(f"rounds           {out.rounds}")
    print(f"failed_fraction  {out.failed_fraction:.6f}")
    print(f"G                {out.giant_fraction:.6f}")
    return EXIT_OK


def _overlay_alpha_c(cfg) -> float | None:
    try:
        return theory.find_alpha_c(experiment.reference_stats(cfg), cfg.delta).alpha_c
    except (ThresholdNotFound, SolverDivergence, ConfigError):
        return None


def cmd_sweep(cfg, args) -> int:
    records = experiment.run_sweep(cfg)
    if cfg.out:
        experiment.emit_csv(records, cfg.out)
    else:
        experiment.emit_csv(records, sys.stdout)
    if cfg.svg:
        experiment.emit_svg_plot(records, cfg.svg, _overlay_alpha_c(cfg),
                                 title=f"{cfg.net.upper()} N={records[0].n}" if records else None)
    return EXIT_OK


def cmd_threshold(cfg, args) -> int:
    res = experiment.threshold_command(
        cfg, simulate=args.simulate, source="poisson" if args.poisson else "instance",
        scan_step=args.scan_step,
    )
    rep = res.report
    print(f"network          {cfg.net}")
    print(f"mean_degree      {res.stats.mean_degree:.6g}")
    print(f"excess_degree    {res.excess_degree_mean:.6g}")
    print(f"delta            {rep.delta:.6g}")
    print(f"cond1_bound      {rep.cond1_bound:.6g}")
    print(f"cond1_excess     {theory.cond1_bound_excess(res.stats, rep.delta):.6g}")
    print(f"scan_step        {rep.step:.6g}")
    print(f"alpha_c          {rep.alpha_c:.6g}")
    print(f"branching_at_ac  {rep.branching_at_alpha_c:.6g}")
    if res.marginal:
        print("marginal         yes (branching factor with all nodes absorbing is exactly 1)")
    if res.estimate is None:
        return EXIT_OK
    if cfg.out:
        experiment.emit_csv(res.records, cfg.out)
    if cfg.svg:
        experiment.emit_svg_plot(res.records, cfg.svg, rep.alpha_c)
    est = res.estimate
    if not est.found:
        print(f"alpha_sim        none (quantile {est.quantile:g} of G never stays above {est.g_star:g})")
        return EXIT_NOT_FOUND
    print(f"alpha_sim        {est.alpha_sim:.6g}")
    print(f"gap              {res.gap:+.6g}")
    return EXIT_OK


def cmd_absorbing(cfg, args) -> int:
    if cfg.alpha is None:
        raise ConfigError("absorbing needs --alpha")
    net = _network(cfg)
    stats = netgen.degree_stats(net)
    emp = engine.empirical_absorbing_fraction(
        net, cfg.alpha, cfg.delta, cfg.realizations, cfg.rng_seed, seed_count=cfg.seed_count
    )
    sol = theory.solve_sigma(stats, cfg.alpha, cfg.delta)
    counts = np.bincount(net.degrees)
    print(f"# alpha={cfg.alpha:g} delta={cfg.delta:g} sigma_a={sol.sigma_a:.6g} "
          f"converged={sol.converged} trials={cfg.realizations}")
    print(f"{'k':>4} {'nodes':>6} {'p_k':>8} {'empirical':>10} {'analytic':>10}")
    for k in np.flatnonzero(counts):
        print(f"{k:>4} {counts[k]:>6} {stats.p_k[k]:>8.4f} {emp[k]:>10.4f} {sol.a_k[k]:>10.4f}")
    return EXIT_OK


_COMMANDS = {
    "gen": cmd_gen, "cascade": cmd_cascade, "sweep": cmd_sweep,
    "threshold": cmd_threshold, "absorbing": cmd_absorbing,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, EdgeListError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ThresholdNotFound, SolverDivergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
