"""Command-line interface: one binary, a subcommand tree, deterministic output.

Exit codes: 0 success, 1 domain error (machine-readable error object),
2 usage error. Identical invocation + seed gives byte-identical JSON.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import bounds as B
from . import verify as V
from .analysis import analysis_dict, analyze_chain
from .chain import estimate_kernel, sample_trajectory, Trajectory
from .deepnet import capacity, network_margins, tabulate
from .empirical import (
    FunctionClass,
    covering_number,
    gaussian_complexity,
    rademacher_complexity,
)
from .errors import GenboundError
from .io import (
    SCHEMA,
    chain_doc,
    function_class_doc,
    load_cdf,
    load_chain_file,
    load_function_class,
    load_network,
    render_json,
    render_text,
)
from .mixing import GUARDED
from .reduce import (
    affine_lift,
    arma_lift,
    companion_lift,
    discretization_tv,
    discretize_ar1,
    mixture_lift,
)
from .rng import DEFAULT_REPLICAS, DEFAULT_SEED

ENV_SEED = "GENBOUND_SEED"


def _floats(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip() != ""]


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help=f"master seed (default env {ENV_SEED}, then 0xC0FFEE)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--replicas", type=int, default=DEFAULT_REPLICAS)
    p.add_argument("--workers", type=int, default=1,
                   help="replica chunks run on this many threads; results are "
                        "reduced in replica order, so output never depends on it")
    return p


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(ENV_SEED)
    if env is not None:
        return int(env, 0)
    return DEFAULT_SEED


def _emit(args, command: str, payload: dict) -> None:
    doc = {"schema": SCHEMA, "command": command}
    doc.update(payload)
    if args.format == "json":
        text = render_json(doc) + "\n"
    else:
        text = render_text(doc) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _traj(args, chain, seed) -> Trajectory:
    if getattr(args, "trajectory_file", None):
        import json as _json

        with open(args.trajectory_file, "r", encoding="utf-8") as fh:
            indices = _json.load(fh)
        return Trajectory(chain=chain, indices=np.asarray(indices, dtype=np.int64), seed=seed)
    return sample_trajectory(chain, args.n, seed)


def _phi(name: str) -> B.MarginLoss:
    if name == "ramp-upper":
        return B.MarginLoss.ramp_upper()
    if name == "ramp-lower":
        return B.MarginLoss.ramp_lower()
    if name == "indicator":
        return B.MarginLoss.indicator()
    raise GenboundError(f"unknown phi {name!r}")


def _grid(args):
    if getattr(args, "deltas", None):
        return _floats(args.deltas)
    return None


# ----------------------------------------------------------------- chain ----

def cmd_chain_analyze(args):
    doc = load_chain_file(args.chain)
    a = analyze_chain(doc["chain"], T_max=args.t_max, convention=args.convention)
    _emit(args, "chain analyze", analysis_dict(a))


def cmd_chain_sample(args):
    doc = load_chain_file(args.chain)
    seed = _resolve_seed(args)
    traj = sample_trajectory(doc["chain"], args.n, seed)
    _emit(args, "chain sample", {
        "seed": seed,
        "n": args.n,
        "indices": [int(i) for i in traj.indices],
        "states": [str(doc["chain"].states[i]) for i in traj.indices],
    })


def cmd_chain_estimate(args):
    doc = load_chain_file(args.chain)
    seed = _resolve_seed(args)
    traj = _traj(args, doc["chain"], seed)
    est = estimate_kernel(traj, smoothing=args.smoothing)
    _emit(args, "chain estimate", {
        "seed": seed,
        "smoothing": args.smoothing,
        "unvisited_rows": list(est.unvisited_rows),
        "estimate": chain_doc(est.chain),
        "max_abs_error": float(np.abs(est.chain.Q - doc["chain"].Q).max()),
    })


# ------------------------------------------------------------ complexity ----

def cmd_complexity(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    if args.kind == "rademacher":
        est = rademacher_complexity(
            fc, doc["chain"], args.n, args.replicas, seed,
            exact=args.exact, stationary_start=args.stationary_start,
            workers=args.workers,
        )
    else:
        est = gaussian_complexity(
            fc, doc["chain"], args.n, args.replicas, seed,
            stationary_start=args.stationary_start, workers=args.workers,
        )
    _emit(args, f"complexity {args.kind}", {
        "seed": seed,
        "kind": est.kind,
        "value": est.value,
        "stderr": est.stderr,
        "replicas": est.replicas,
        "n": est.n,
        "method": est.method,
    })


# ----------------------------------------------------------------- bound ----

def _bound_payload(report: B.BoundReport, seed: int) -> dict:
    out = {"seed": seed}
    out.update(report.to_dict())
    return out


def cmd_bound_thm1(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    traj = _traj(args, doc["chain"], seed)
    report = B.bound_thm1(
        fc, a, traj, _phi(args.phi), args.t, delta_grid=_grid(args),
        flavor=args.flavor, replicas=args.replicas, seed=seed, workers=args.workers,
    )
    _emit(args, "bound thm1", _bound_payload(report, seed))


def cmd_bound_family(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    traj = _traj(args, doc["chain"], seed)
    phis = B.dyadic_family(_phi(args.phi), args.members)
    report = B.bound_family(
        fc, a, traj, phis, args.t, replicas=args.replicas, seed=seed, workers=args.workers
    )
    _emit(args, "bound family", _bound_payload(report, seed))


def cmd_bound_two_sided(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    traj = _traj(args, doc["chain"], seed)
    report = B.bound_two_sided(
        fc, a, traj, args.t, delta_grid=_grid(args), replicas=args.replicas,
        seed=seed, workers=args.workers, band=args.band,
    )
    _emit(args, "bound two-sided", _bound_payload(report, seed))


def cmd_bound_pac_vc(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    traj = _traj(args, doc["chain"], seed)
    margins = fc.values[args.f_index][traj.indices]
    report = B.bound_pac_vc(
        args.vc, args.C, args.alpha, a, margins, delta_grid=_grid(args), n=args.n
    )
    _emit(args, "bound pac-vc", _bound_payload(report, seed))


def _network_margin_samples(args, chain, net, seed):
    if args.labels:
        labels = np.asarray(_floats(args.labels))
    else:
        labels = np.ones(chain.n_states)
    fc = network_margins(net, labels)
    traj = _traj(args, chain, seed)
    return fc.values[0][traj.indices]


def cmd_bound_deep_layered(args):
    doc = load_chain_file(args.chain)
    net = load_network(args.network)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    gn = gaussian_complexity(
        net.base, doc["chain"], args.n, args.replicas, B.complexity_seed(seed),
        workers=args.workers,
    )
    margins = _network_margin_samples(args, doc["chain"], net, seed)
    L_js = [layer.L for layer in net.layers]
    b_js = [layer.budget if layer.budget is not None else 0.0 for layer in net.layers]
    report = B.bound_deep_layered(
        L_js, b_js, gn, _phi(args.phi), args.t, a, margins,
        delta_grid=_grid(args), n=args.n,
    )
    _emit(args, "bound deep-layered", _bound_payload(report, seed))


def cmd_bound_deep_adaptive(args):
    doc = load_chain_file(args.chain)
    net = load_network(args.network)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    gn = gaussian_complexity(
        net.base, doc["chain"], args.n, args.replicas, B.complexity_seed(seed),
        workers=args.workers,
    )
    margins = _network_margin_samples(args, doc["chain"], net, seed)
    report = B.bound_deep_adaptive(
        net, args.alpha, gn, _phi(args.phi), args.t, a, margins,
        delta_grid=_grid(args), n=args.n,
    )
    cap = capacity(net, args.alpha)
    payload = _bound_payload(report, seed)
    payload["capacity"] = {
        "depth": cap.l_f,
        "W_k": list(cap.W_k),
        "Lambda": cap.Lambda,
        "Gamma_alpha": cap.Gamma_alpha,
        "gamma_floored": cap.gamma_floored,
    }
    _emit(args, "bound deep-adaptive", payload)


def cmd_bound_bayes(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    traj = _traj(args, doc["chain"], seed)
    report = B.bound_bayes(
        fc, doc["chain"], np.asarray(_floats(args.prior)), traj, _phi(args.phi),
        args.t, delta_grid=_grid(args),
        W_samples=args.w_samples, seed=seed, flavor=args.flavor,
        replicas=args.replicas, workers=args.workers,
    )
    _emit(args, "bound bayes", _bound_payload(report, seed))


def cmd_bound_levy(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    est = rademacher_complexity(
        fc, doc["chain"], args.n, args.replicas, B.complexity_seed(seed),
        workers=args.workers,
    )
    report = B.bound_levy(a, args.n, fc.M, args.t, est.value)
    payload = {"seed": seed, "e_pn0_stderr": est.stderr}
    payload.update(report.to_dict())
    _emit(args, "bound levy", payload)


def cmd_bound_sup_cdf(args):
    doc = load_chain_file(args.chain)
    a = analyze_chain(doc["chain"])
    report = B.bound_sup_cdf(a, args.n, args.t)
    payload = {"seed": _resolve_seed(args)}
    payload.update(report.to_dict())
    _emit(args, "bound sup-cdf", payload)


def cmd_bound_gamma_margin(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    traj = _traj(args, doc["chain"], seed)
    values = fc.values[args.f_index]
    pop_weights = a.stationary.pi
    emp_weights = np.bincount(traj.indices, minlength=doc["chain"].n_states) / len(traj)
    pop = B.gamma_margin(values, pop_weights, args.gamma, args.n)
    emp = B.gamma_margin(values, emp_weights, args.gamma, args.n)
    ratio = math.inf if pop == 0 else emp / pop
    _emit(args, "bound gamma-margin", {
        "seed": seed,
        "gamma": args.gamma,
        "n": args.n,
        "function": fc.names[args.f_index],
        "gamma_margin_population": pop,
        "gamma_margin_empirical": emp,
        "ratio_empirical_over_population": ratio,
    })


# --------------------------------------------------------------- margins ----

def cmd_margins_levy(args):
    F = load_cdf(args.cdf_a)
    G = load_cdf(args.cdf_b)
    _emit(args, "margins levy-distance", {
        "levy_distance": B.levy_distance(F, G),
        "tolerance": 1e-9,
    })


def cmd_margins_distribution(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    a = analyze_chain(doc["chain"])
    if args.weighting == "population":
        weights = a.stationary.pi
    else:
        traj = _traj(args, doc["chain"], seed)
        weights = np.bincount(traj.indices, minlength=doc["chain"].n_states) / len(traj)
    values = fc.values[args.f_index]
    cdf = B.StepCDF.from_samples(values, weights)
    _emit(args, "margins distribution", {
        "seed": seed,
        "function": fc.names[args.f_index],
        "weighting": args.weighting,
        "points": [float(x) for x in cdf.xs],
        "cdf": [float(p) for p in cdf.ps],
    })


# ---------------------------------------------------------------- reduce ----

def _maybe_discretize(args, payload):
    if args.discretize:
        lo, hi = _floats(args.range)
        spec = discretize_ar1(args.phi_coeff, args.sigma, lo, hi, args.discretize, args.const)
        payload["discretized"] = chain_doc(spec)
        payload["discretization_tv"] = discretization_tv(
            args.phi_coeff, args.sigma, lo, hi, args.discretize, args.const
        )
    return payload


def cmd_reduce_companion(args):
    a = _floats(args.a)
    lift = companion_lift(a)
    payload = {
        "order": lift.order,
        "G": [[float(x) for x in row] for row in lift.G],
        "u": lift.offset,
        "noise_positions": [],
    }
    if args.steps:
        hist = _floats(args.history) if args.history else [1.0] * lift.order
        payload["simulation"] = [float(x) for x in lift.simulate(hist, args.steps)]
    if len(a) == 1 and args.discretize:
        args.phi_coeff = a[0]
        args.const = 0.0
        payload = _maybe_discretize(args, payload)
    _emit(args, "reduce companion", payload)


def cmd_reduce_affine(args):
    a = _floats(args.a)
    lift = affine_lift(a, args.const)
    payload = {
        "order": lift.order,
        "G": [[float(x) for x in row] for row in lift.G],
        "u": lift.offset,
        "noise_positions": [],
    }
    if args.steps:
        hist = _floats(args.history) if args.history else [lift.offset] * lift.order
        payload["simulation"] = [float(x) for x in lift.simulate(hist, args.steps)]
    if len(a) == 1 and args.discretize:
        args.phi_coeff = a[0]
        payload = _maybe_discretize(args, payload)
    _emit(args, "reduce affine", payload)


def cmd_reduce_arma(args):
    lift = arma_lift(args.c, _floats(args.a), _floats(args.theta), sigma=args.sigma)
    seed = _resolve_seed(args)
    payload = {
        "seed": seed,
        "m": lift.m,
        "q": lift.q,
        "u": lift.u,
        "G": [[float(x) for x in row] for row in lift.G],
        "noise_positions": list(lift.noise_positions),
    }
    if args.steps:
        noise = lift.gaussian_noise(args.steps, seed)
        sim = lift.simulate(noise)
        direct = lift.simulate_direct(noise)
        payload["simulation"] = [float(x) for x in sim]
        payload["dual_max_deviation"] = float(np.abs(sim - direct).max())
    _emit(args, "reduce arma", payload)


def cmd_reduce_mixture(args):
    chains = [load_chain_file(p)["chain"] for p in args.chains.split(",")]
    lift = mixture_lift(chains, _floats(args.alphas))
    payload = {
        "components": len(chains),
        "G": [[float(x) for x in row] for row in lift.G],
        "det_G": lift.det,
        "product_states": len(lift.product_chain.states),
        "product_chain": chain_doc(lift.product_chain),
    }
    _emit(args, "reduce mixture", payload)


# ---------------------------------------------------------------- verify ----

def _verify_payload(report: V.VerifyReport) -> dict:
    return report.to_dict()


def cmd_verify_symmetrization(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    report = V.verify_symmetrization(
        doc["chain"], fc, args.n, args.replicas, seed, start=args.start,
        workers=args.workers,
    )
    _emit(args, "verify symmetrization", _verify_payload(report))


def cmd_verify_variance(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    report = V.verify_variance(
        doc["chain"], fc, args.n, n0=args.n0, replicas=args.replicas, seed=seed,
        f_index=args.f_index, workers=args.workers,
    )
    _emit(args, "verify variance", _verify_payload(report))


def cmd_verify_mcdiarmid(args):
    doc = load_chain_file(args.chain)
    chain = doc["chain"]
    seed = _resolve_seed(args)
    # built-in statistic: mean of +-1 labels (even-index states -> +1)
    labels = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(chain.n_states)])

    def statistic(path):
        return labels[path].mean()

    c = np.full(args.n, 2.0 / args.n)
    report = V.verify_mcdiarmid(
        chain, c, statistic, _floats(args.t_grid), args.n,
        replicas=args.replicas, seed=seed, guard_mode=args.tau_mode,
    )
    _emit(args, "verify mcdiarmid", _verify_payload(report))


def cmd_verify_tail(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    seed = _resolve_seed(args)
    report = V.verify_theorem_tail(
        args.target, doc["chain"], fc, args.n, args.t,
        replicas=args.replicas, seed=seed, workers=args.workers,
    )
    _emit(args, "verify tail", _verify_payload(report))


def cmd_verify_replica_identity(args):
    doc = load_chain_file(args.chain)
    fc = load_function_class(args.cls)
    report = V.verify_replica_identity(doc["chain"], fc, args.n, seed=_resolve_seed(args))
    _emit(args, "verify replica-identity", _verify_payload(report))


# ----------------------------------------------------------------- wiring ---

def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    root = argparse.ArgumentParser(prog="genbound", description=__doc__)
    top = root.add_subparsers(dest="group", required=True)

    chain = top.add_parser("chain").add_subparsers(dest="sub", required=True)
    p = chain.add_parser("analyze", parents=[common])
    p.add_argument("chain")
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--convention", choices=("pi-weighted", "unweighted"),
                   default="pi-weighted")
    p.set_defaults(fn=cmd_chain_analyze)
    p = chain.add_parser("sample", parents=[common])
    p.add_argument("chain")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_chain_sample)
    p = chain.add_parser("estimate", parents=[common])
    p.add_argument("chain")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--trajectory-file", default=None)
    p.add_argument("--smoothing", type=float, default=0.0)
    p.set_defaults(fn=cmd_chain_estimate)

    comp = top.add_parser("complexity").add_subparsers(dest="sub", required=True)
    for kind in ("rademacher", "gaussian"):
        p = comp.add_parser(kind, parents=[common])
        p.add_argument("--chain", required=True)
        p.add_argument("--class", dest="cls", required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--stationary-start", action="store_true")
        if kind == "rademacher":
            p.add_argument("--exact", action="store_true")
        p.set_defaults(fn=cmd_complexity, kind=kind)

    bound = top.add_parser("bound").add_subparsers(dest="sub", required=True)

    def bound_parser(name, fn, needs_class=True, needs_t=True):
        p = bound.add_parser(name, parents=[common])
        p.add_argument("--chain", required=True)
        if needs_class:
            p.add_argument("--class", dest="cls", required=True)
        p.add_argument("--n", type=int, required=True)
        if needs_t:
            p.add_argument("--t", type=float, required=True)
        p.add_argument("--deltas", default=None, help="comma list, default dyadic")
        p.add_argument("--trajectory-file", default=None)
        p.set_defaults(fn=fn)
        return p

    p = bound_parser("thm1", cmd_bound_thm1)
    p.add_argument("--phi", default="ramp-upper")
    p.add_argument("--flavor", choices=("rademacher", "gaussian"), default="rademacher")
    p = bound_parser("family", cmd_bound_family)
    p.add_argument("--phi", default="ramp-upper")
    p.add_argument("--members", type=int, default=12)
    p = bound_parser("two-sided", cmd_bound_two_sided)
    p.add_argument("--band", choices=("empirical", "population"), default="empirical")
    p = bound_parser("pac-vc", cmd_bound_pac_vc, needs_t=False)
    p.add_argument("--vc", type=int, required=True)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--f-index", type=int, default=0)
    for name, fn in (("deep-layered", cmd_bound_deep_layered),
                     ("deep-adaptive", cmd_bound_deep_adaptive)):
        p = bound_parser(name, fn, needs_class=False)
        p.add_argument("--network", required=True)
        p.add_argument("--phi", default="ramp-upper")
        p.add_argument("--labels", default=None, help="comma list of +-1 per state")
        if name == "deep-adaptive":
            p.add_argument("--alpha", type=float, required=True)
    p = bound_parser("bayes", cmd_bound_bayes)
    p.add_argument("--prior", required=True, help="comma list over W")
    p.add_argument("--phi", default="ramp-upper")
    p.add_argument("--flavor", choices=("rademacher", "gaussian"), default="rademacher")
    p.add_argument("--w-samples", type=int, default=None)
    p = bound_parser("levy", cmd_bound_levy)
    p = bound_parser("sup-cdf", cmd_bound_sup_cdf, needs_class=False)
    p = bound_parser("gamma-margin", cmd_bound_gamma_margin, needs_t=False)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--f-index", type=int, default=0)

    margins = top.add_parser("margins").add_subparsers(dest="sub", required=True)
    p = margins.add_parser("levy-distance", parents=[common])
    p.add_argument("--cdf-a", required=True)
    p.add_argument("--cdf-b", required=True)
    p.set_defaults(fn=cmd_margins_levy)
    p = margins.add_parser("distribution", parents=[common])
    p.add_argument("--chain", required=True)
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--f-index", type=int, default=0)
    p.add_argument("--weighting", choices=("empirical", "population"), default="empirical")
    p.add_argument("--trajectory-file", default=None)
    p.set_defaults(fn=cmd_margins_distribution)

    reduce_ = top.add_parser("reduce").add_subparsers(dest="sub", required=True)
    p = reduce_.add_parser("companion", parents=[common])
    p.add_argument("--a", required=True, help="comma list a_1..a_m")
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--history", default=None)
    p.add_argument("--discretize", type=int, default=0)
    p.add_argument("--range", default="-5,5")
    p.add_argument("--sigma", type=float, default=1.0)
    p.set_defaults(fn=cmd_reduce_companion, const=0.0)
    p = reduce_.add_parser("affine", parents=[common])
    p.add_argument("--a", required=True)
    p.add_argument("--const", type=float, required=True)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--history", default=None)
    p.add_argument("--discretize", type=int, default=0)
    p.add_argument("--range", default="-5,5")
    p.add_argument("--sigma", type=float, default=1.0)
    p.set_defaults(fn=cmd_reduce_affine)
    p = reduce_.add_parser("arma", parents=[common])
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--a", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=0)
    p.set_defaults(fn=cmd_reduce_arma)
    p = reduce_.add_parser("mixture", parents=[common])
    p.add_argument("--chains", required=True, help="comma list of chain files")
    p.add_argument("--alphas", required=True)
    p.set_defaults(fn=cmd_reduce_mixture)

    verify = top.add_parser("verify").add_subparsers(dest="sub", required=True)

    def verify_parser(name, fn, needs_class=True):
        p = verify.add_parser(name, parents=[common])
        p.add_argument("--chain", required=True)
        if needs_class:
            p.add_argument("--class", dest="cls", required=True)
        p.add_argument("--n", type=int, required=True)
        p.set_defaults(fn=fn)
        return p

    p = verify_parser("symmetrization", cmd_verify_symmetrization)
    p.add_argument("--start", choices=("nu", "pi"), default="nu")
    p = verify_parser("variance", cmd_verify_variance)
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--f-index", type=int, default=0)
    p = verify_parser("mcdiarmid", cmd_verify_mcdiarmid, needs_class=False)
    p.add_argument("--t-grid", default="0.2,0.4,0.8")
    p.add_argument("--tau-mode", choices=("guarded", "literal"), default=GUARDED)
    p = verify_parser("tail", cmd_verify_tail)
    p.add_argument("--target", choices=V.TAIL_TARGETS, required=True)
    p.add_argument("--t", type=float, required=True)
    p = verify_parser("replica-identity", cmd_verify_replica_identity)

    return root


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except GenboundError as e:
        doc = {"schema": SCHEMA, "error": e.payload()}
        if getattr(args, "format", "text") == "json":
            sys.stdout.write(render_json(doc) + "\n")
        else:
            sys.stdout.write(render_text(doc) + "\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
