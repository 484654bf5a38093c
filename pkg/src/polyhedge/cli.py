"""Command line front end.

Reads a JSON run configuration, runs one command and writes a JSON report
(or an OFF mesh) to stdout.  Exit codes: 0 success, 2 invalid input,
3 arbitrage detected, 4 disagreement between independent routes.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from importlib import resources
from typing import Sequence

import jsonschema

from . import __version__, render
from .dual import dual_ask_price, lower_image_section, run_dual
from .geometry import (
    EmptySetError,
    InfeasibleError,
    Polyhedron,
    contains,
    epigraph_section,
    lp_max,
    polyfn_eval,
    supfun_of_negated_set,
    UnboundedError,
)
from .lvop import (
    LvopError,
    LvopProblem,
    coupling_phi,
    interior_check,
    lower_image,
    lower_image_via_support,
    shp_step_problem,
    support_from_lower_image,
    upper_image,
)
from .market import (
    EventLattice,
    KornMullerParams,
    MarketModel,
    ModelError,
    Payoff,
    build_korn_muller,
    check_consistent_pair,
    exchange_option_payoff,
    to_fraction,
)
from .primal import ArbitrageError, ask_price, run_primal
from .rnpricing import rn_price
from .strategy import NotSuperhedgingError, PathSpec, run_strategy

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_ARBITRAGE, EXIT_MISMATCH = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def load_config(spec: str) -> dict:
    """Read a config file, or a bundled one given as ``builtin:NAME``."""
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        try:
            text = resources.files("polyhedge").joinpath("data", f"{name}.json").read_text()
        except FileNotFoundError:
            raise ConfigError(f"no bundled config named {name!r}") from None
    else:
        try:
            with open(spec) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(str(exc)) from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    schema = json.loads(resources.files("polyhedge").joinpath("data", "config.schema.json").read_text())
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None


def _fr(x) -> Fraction:
    return to_fraction(x)


def _vec(xs) -> tuple[Fraction, ...]:
    return tuple(_fr(x) for x in xs)


def build_model(mcfg: dict) -> MarketModel:
    if mcfg["type"] == "korn_muller":
        kw = {k: v for k, v in mcfg.items() if k != "type"}
        return build_korn_muller(KornMullerParams(**kw))
    levels = mcfg["levels"]
    node_of = {}
    for t, level in enumerate(levels):
        for name in level:
            if name in node_of:
                raise ModelError(f"node name {name!r} used twice")
            node_of[name] = (t, name)
    try:
        succ = {node_of[a]: tuple(node_of[b] for b in bs) for a, bs in mcfg["successors"].items()}
        rates = {node_of[a]: tuple(_vec(row) for row in m) for a, m in mcfg["rates"].items()}
    except KeyError as exc:
        raise ModelError(f"unknown node {exc.args[0]!r}") from None
    lat = EventLattice(len(levels) - 1, tuple(tuple(node_of[n] for n in lv) for lv in levels), succ)
    return MarketModel(lat, rates, info={"kind": "explicit"})


def node_label(mu) -> str:
    if len(mu) == 2 and isinstance(mu[1], str):
        return mu[1]
    return ",".join(str(v) for v in mu)


def node_lookup(model: MarketModel) -> dict[str, tuple]:
    return {node_label(mu): mu for mu in model.lattice.all_nodes()}


def build_payoff(pcfg: dict, model: MarketModel) -> Payoff:
    kind = pcfg["type"]
    if kind == "exchange_physical":
        xi = exchange_option_payoff(model, pcfg.get("rule", "ask"))
    elif kind == "zero":
        xi = Payoff.constant(model, [0] * model.d)
    else:
        names = node_lookup(model)
        vals = {}
        for key, v in pcfg["values"].items():
            if key not in names:
                raise ModelError(f"payoff given at unknown node {key!r}")
            vals[names[key]] = _vec(v)
        xi = Payoff(vals)
    xi.check(model)
    return -xi if pcfg.get("negate") else xi


def build_lvop(cfg: dict) -> LvopProblem:
    C = Polyhedron.cone([_vec(r) for r in cfg["C"]])
    return LvopProblem(
        [_vec(r) for r in cfg["P"]], [_vec(r) for r in cfg["B"]], _vec(cfg["b"]), C, _vec(cfg["c"])
    )


def parse_c(text: str | None, cfg: dict, d: int) -> tuple[Fraction, ...]:
    if text:
        c = tuple(Fraction(s.strip()) for s in text.split(","))
    elif "c" in cfg:
        c = _vec(cfg["c"])
    else:
        c = tuple(Fraction(int(i == d - 1)) for i in range(d))
    if len(c) != d:
        raise ConfigError(f"weight vector needs {d} entries")
    if c[-1] != 1:
        raise ConfigError("weight vector needs last entry 1")
    return c


def parse_path(items: Sequence, model: MarketModel) -> PathSpec:
    names = node_lookup(model)
    nodes = []
    for t, it in enumerate(items):
        if isinstance(it, str):
            if it not in names:
                raise ModelError(f"unknown node {it!r} in path")
            nodes.append(names[it])
        else:
            nodes.append((t,) + tuple(it))
    return PathSpec(tuple(nodes))


# ---------------------------------------------------------------------------
# commands


def _market(cfg: dict) -> tuple[MarketModel, Payoff]:
    if cfg["type"] != "market":
        raise ConfigError("this command needs a market configuration")
    model = build_model(cfg["model"])
    return model, build_payoff(cfg["payoff"], model)


def _assets(args, cfg: dict, d: int) -> list[int]:
    if args.asset is not None:
        if not 1 <= args.asset <= d:
            raise ConfigError(f"asset index must lie in 1..{d}")
        return [args.asset]
    return list(range(1, d + 1))


def cmd_price(args, cfg: dict) -> tuple[dict, int]:
    model, xi = _market(cfg)
    digits = args.digits
    h_ask, h_bid = run_primal(model, xi), run_primal(model, -xi)
    s_ask, s_bid = run_dual(model, xi), run_dual(model, -xi)
    out, code = [], EXIT_OK
    for i in _assets(args, cfg, model.d):
        ask = {"primal": ask_price(h_ask, i), "dual": dual_ask_price(s_ask, i), "rn": rn_price(model, xi, i)[0]}
        neg = {"primal": ask_price(h_bid, i), "dual": dual_ask_price(s_bid, i), "rn": rn_price(model, -xi, i)[0]}
        bid = {k: -v for k, v in neg.items()}
        agree = len(set(ask.values())) == 1 and len(set(bid.values())) == 1
        if not agree:
            code = EXIT_MISMATCH
        out.append({
            "asset": i,
            "ask": {k: render.scalar(v, digits) for k, v in ask.items()},
            "bid": {k: render.scalar(v, digits) for k, v in bid.items()},
            "routes_agree": agree,
        })
    return {"command": "price", "prices": out}, code


def cmd_sets(args, cfg: dict) -> tuple[dict | str, int]:
    model, xi = _market(cfg)
    t = args.time
    if not 0 <= t <= model.horizon:
        raise ConfigError(f"time must lie in 0..{model.horizon}")
    h = run_primal(model, xi)
    level = model.lattice.nodes[t]
    if args.format == "off":
        mu = _pick_node(args, model, level)
        return render.off(h.Z[mu]), EXIT_OK
    nodes = []
    for mu in level:
        entry = {"node": node_label(mu), "Z": render.polyhedron(h.Z[mu], args.digits)}
        if mu in h.W:
            entry["W"] = render.polyhedron(h.W[mu], args.digits)
        nodes.append(entry)
    return {"command": "sets", "time": t, "nodes": nodes}, EXIT_OK


def _pick_node(args, model: MarketModel, level):
    if args.node is not None:
        names = node_lookup(model)
        if args.node not in names or names[args.node] not in level:
            raise ConfigError(f"no node {args.node!r} at this time")
        return names[args.node]
    if len(level) != 1:
        raise ConfigError("several nodes at this time: choose one with --node")
    return level[0]


def cmd_dual_image(args, cfg: dict) -> tuple[dict | str, int]:
    if cfg["type"] == "lvop":
        p = build_lvop(cfg)
        if args.c:
            p = LvopProblem(p.P, p.B, p.b, p.C, parse_c(args.c, cfg, p.q))
        image = lower_image(p) if args.route == "dual" else lower_image_via_support(p)
    else:
        model, xi = _market(cfg)
        c = parse_c(args.c, cfg, model.d)
        root = model.lattice.root
        if args.route == "lvop":
            h = run_primal(model, xi)
            image = lower_image(shp_step_problem(model, root, h.W[root], c))
        else:
            _check_interior(model, c)
            image = lower_image_section(run_dual(model, xi), c)
    if args.format == "off":
        return render.off(image), EXIT_OK
    top = lp_max(image, [0] * (image.dim - 1) + [1])
    report = {"command": "dual-image", "image": render.polyhedron(image, args.digits)}
    report["max_y"] = render.scalar(top.value, args.digits) if top.bounded else "inf"
    return report, EXIT_OK


def _check_interior(model: MarketModel, c) -> None:
    if not interior_check(c, model.cone(model.lattice.root)):
        raise ConfigError("weight vector is not interior to the solvency cone")


def cmd_strategy(args, cfg: dict) -> tuple[dict, int]:
    model, xi = _market(cfg)
    scfg = cfg.get("strategy")
    if scfg is None:
        raise ConfigError("config has no strategy section")
    h = run_primal(model, xi)
    if scfg["y0"] == "ask":
        i = args.asset or cfg.get("numeraire", model.d)
        y0 = tuple(ask_price(h, i) if k == i - 1 else Fraction(0) for k in range(model.d))
    else:
        y0 = _vec(scfg["y0"])
    path = parse_path(scfg["path"], model)
    st = run_strategy(model, xi, y0, path, h, scfg.get("rule", "min-trade"))
    rows = []
    for t, mu in enumerate(path.nodes):
        row = {"t": t, "node": node_label(mu), "y": render.vec_rat(st.portfolios[t]),
               "y_decimal": render.vec_dec(st.portfolios[t], args.digits)}
        if t < len(st.rebalance_sets):
            r = st.rebalance_sets[t]
            row["rebalance_set"] = {
                "kind": "singleton" if len(r.vertices) == 1 and not r.rays else "polytope" if not r.rays else "polyhedron",
                "vertex_count": len(r.vertices),
            }
        rows.append(row)
    report = {
        "command": "strategy",
        "steps": rows,
        "surplus": render.vec_rat(st.surplus),
        "surplus_decimal": render.vec_dec(st.surplus, args.digits),
        "surplus_solvent": contains(model.cone(path.nodes[-1]), st.surplus),
    }
    return report, EXIT_OK


def cmd_check_duality(args, cfg: dict) -> tuple[dict, int]:
    rng = random.Random(args.seed)
    if cfg["type"] == "lvop":
        p = build_lvop(cfg)
        checks = [dict(_duality_checks(p, rng, args.samples), problem="config")]
    else:
        model, xi = _market(cfg)
        t = args.time
        if not 0 <= t < model.horizon:
            raise ConfigError(f"time must lie in 0..{model.horizon - 1}")
        h = run_primal(model, xi)
        s = run_dual(model, xi)
        c = parse_c(args.c, cfg, model.d) if (args.c or "c" in cfg) else None
        checks = []
        for mu in model.lattice.nodes[t]:
            p = shp_step_problem(model, mu, h.W[mu], c)
            res = _duality_checks(p, rng, args.samples)
            res["upper_image_matches_primal"] = upper_image(p).same_set(h.Z[mu])
            res["lower_image_matches_dual"] = lower_image(p).same_set(epigraph_section(s.Z[mu], p.c))
            res["node"] = node_label(mu)
            checks.append(res)
    ok = all(all(v for k, v in c.items() if isinstance(v, bool)) for c in checks)
    report = {"command": "check-duality", "seed": args.seed, "checks": checks, "pass": ok}
    return report, EXIT_OK if ok else EXIT_MISMATCH


def _duality_checks(p: LvopProblem, rng: random.Random, samples: int) -> dict:
    lo = lower_image(p)
    via = lower_image_via_support(p)
    up = upper_image(p)
    Z = supfun_of_negated_set(up)
    roundtrip = True
    for _ in range(samples):
        w = _random_weight(rng, p.c)
        if support_from_lower_image(lo, p.c, w) != polyfn_eval(Z, w):
            roundtrip = False
    weak = all(coupling_phi(y, w, p.c) >= 0 for y in up.vertices for w in lo.vertices)
    return {
        "lower_image_equals_support_route": lo.same_set(via),
        "support_round_trip": roundtrip,
        "weak_duality": weak,
    }


def _random_weight(rng: random.Random, c) -> tuple[Fraction, ...]:
    while True:
        w = tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 10)) for _ in c)
        if sum(a * b for a, b in zip(c, w)) > 0:
            return w


def cmd_check_arbitrage(args, cfg: dict) -> tuple[dict, int]:
    model, _ = _market(cfg)
    res = check_consistent_pair(model)
    report = {
        "command": "check-arbitrage",
        "consistent_pair_exists": res.exists,
        "slack": render.rat(res.slack),
        "reference_weights": "uniform over successors",
    }
    return report, EXIT_OK if res.exists else EXIT_ARBITRAGE


COMMANDS = {
    "price": cmd_price,
    "sets": cmd_sets,
    "dual-image": cmd_dual_image,
    "strategy": cmd_strategy,
    "check-duality": cmd_check_duality,
    "check-arbitrage": cmd_check_arbitrage,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyhedge", description="Exact superhedging under proportional transaction costs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config path, or builtin:NAME for a bundled one")
        sp.add_argument("--asset", type=int, help="1-based asset index")
        sp.add_argument("--time", type=int, default=0)
        sp.add_argument("--node", help="node label (for OFF export when a time level has several nodes)")
        sp.add_argument("--c", help='weight vector, e.g. "0,0,1"')
        sp.add_argument("--digits", type=int, help="decimal places in rendered output")
        sp.add_argument("--format", choices=("json", "off"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=20, help="sampled weights for the round trip check")
        sp.add_argument("--route", choices=("dual", "lvop"), default="dual",
                        help="dual-image: 'dual' maps the dual feasible set (lvop configs) or sections the "
                             "dual recursion (market configs); 'lvop' goes through the upper image")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.digits is None:
            args.digits = cfg.get("output_digits", 3)
        report, code = COMMANDS[args.command](args, cfg)
    except (ArbitrageError, InfeasibleError, UnboundedError) as exc:
        print(f"arbitrage: {exc}", file=sys.stderr)
        return EXIT_ARBITRAGE
    except (ConfigError, ModelError, LvopError, NotSuperhedgingError, EmptySetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(report, str):
        text = report
    else:
        text = json.dumps({"schema_version": SCHEMA_VERSION, **report}, indent=2, sort_keys=True) + "\n"
    try:
        sys.stdout.write(text)
        sys.stdout.flush()
    except BrokenPipeError:
        pass
    return code


if __name__ == "__main__":
    sys.exit(main())
