"""Command-line front end: ``python -m alphaprod.cli <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 contract violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import bp as bpmod
from . import leakage as lk
from . import reductions as red
from . import verify as vf
from .errors import AlphaProdError
from .perm import (
    Permutation,
    commutator,
    conjugate,
    conjugator_in_A,
    decompose,
    format_cycles,
    format_image,
    inverse,
    moved_points,
    parity,
    parse,
    product,
)
from .transform import TransformScript, apply_script, convert
from .vectors import VectorMap, apply_vector_map, build_alpha_to_beta, dump_vectors, load_vectors


class UsageError(Exception):
    pass


class ContractViolation(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CommandConfig:
    command: str
    t: int | None
    seed: int
    workers: int
    style: str
    out: Path | None

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError(f"--workers must be positive, got {self.workers}")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--t", type=_positive, help="degree (never inferred)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--format", dest="style", choices=("cycles", "images"), default="cycles")
    common.add_argument("--out", type=Path, help="output file (default stdout)")

    p = _Parser(prog="alphaprod", description="permutation product toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("perm", parents=[common], help="algebra calculator")
    s.add_argument("op", choices=("compose", "inverse", "parity", "cycles", "commutator", "conjugate", "conjugator", "moved"))
    s.add_argument("perms", nargs="+")

    s = sub.add_parser("convert", parents=[common], help="script turning one element into another")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)

    s = sub.add_parser("map", parents=[common], help="build or apply an alpha -> beta vector map")
    s.add_argument("--alpha")
    s.add_argument("--beta")
    s.add_argument("--m", type=_positive)
    s.add_argument("--map", dest="map_file", type=Path, help="load a map instead of building one")
    s.add_argument("--apply", type=Path, help="vector file to push through the map")

    s = sub.add_parser("compile-bp", parents=[common], help="encode a branching program run as one permutation")
    s.add_argument("--bp", type=Path, required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--check", action="store_true")

    s = sub.add_parser("reduce-id", parents=[common], help="program run -> vectors, one folds to id iff accept")
    s.add_argument("--bp", type=Path, required=True)
    s.add_argument("--x", required=True)

    s = sub.add_parser("reduce-single", parents=[common], help="decide fold != id via (1 2)(3 4) queries")
    s.add_argument("--vector", type=Path, help="vector file (first vector is used)")
    s.add_argument("--alpha", help="sample a random vector with this fold instead")
    s.add_argument("--enumerate", action="store_true", help="stream the full candidate list after the constructive query")
    s.add_argument("--budget", type=_positive)

    s = sub.add_parser("sample", parents=[common], help="draw vectors from a product class")
    s.add_argument("--alpha", required=True)
    s.add_argument("--count", type=_positive, default=1)
    s.add_argument("--length", type=_positive)

    s = sub.add_parser("tvd", parents=[common], help="statistical distance of a leakage between classes")
    s.add_argument("--alpha", required=True)
    s.add_argument("--leak", required=True)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--n", type=_positive, default=10_000)
    s.add_argument("--delta", type=float, default=0.01)
    s.add_argument("--length", type=_positive)
    s.add_argument("--report", type=Path)

    s = sub.add_parser("amplify", parents=[common], help="threshold amplifier error rate")
    s.add_argument("--alpha", required=True)
    s.add_argument("--leak", default="planted:0.3")
    s.add_argument("--m", type=_positive, default=1000)
    s.add_argument("--k", type=_positive, default=1)
    s.add_argument("--trials", type=_positive, default=1000)
    s.add_argument("--eps", type=float, help="Pr[C'=1] on the alpha class; estimated if omitted")
    s.add_argument("--calib-n", type=_positive, default=100_000)

    s = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return p


# -- helpers ---------------------------------------------------------------------

def _need_t(cfg: CommandConfig) -> int:
    if cfg.t is None:
        raise UsageError(f"{cfg.command} needs --t")
    return cfg.t


def _perm(text: str | None, t: int, flag: str) -> Permutation:
    if text is None:
        raise UsageError(f"missing {flag}")
    return parse(text, t)


def _fmt(p: Permutation, cfg: CommandConfig) -> str:
    return format_image(p) if cfg.style == "images" else format_cycles(p)


def _emit(text: str, cfg: CommandConfig) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)
        print(f"wrote {cfg.out}")


def _header(cfg: CommandConfig) -> str:
    return f"# alphaprod {__version__} {cfg.command} seed={cfg.seed}\n"


# -- commands --------------------------------------------------------------------

def cmd_perm(a, cfg):
    t = _need_t(cfg)
    ps = [parse(s, t) for s in a.perms]
    arity = {"compose": None, "inverse": 1, "parity": 1, "cycles": 1, "moved": 1, "commutator": 2, "conjugate": 2, "conjugator": 2}
    n = arity[a.op]
    if n is not None and len(ps) != n:
        raise UsageError(f"{a.op} takes {n} permutation(s), got {len(ps)}")
    if a.op == "compose":
        print(_fmt(product(ps, t), cfg))
    elif a.op == "inverse":
        print(_fmt(inverse(ps[0]), cfg))
    elif a.op == "parity":
        print(parity(ps[0]))
    elif a.op == "cycles":
        d = decompose(ps[0])
        print(format_cycles(ps[0]), "type", list(d.full_cycle_type))
    elif a.op == "moved":
        print(" ".join(map(str, sorted(moved_points(ps[0])))) or "-")
    elif a.op == "commutator":
        print(_fmt(commutator(*ps), cfg))
    elif a.op == "conjugate":
        print(_fmt(conjugate(*ps), cfg))
    else:
        print(_fmt(conjugator_in_A(*ps), cfg))
    return 0


def cmd_convert(a, cfg):
    t = _need_t(cfg)
    src, dst = _perm(a.source, t, "--from"), _perm(a.target, t, "--to")
    script = convert(src, dst)
    text = _header(cfg) + script.dumps()
    # re-application check on the serialized form
    again = TransformScript.loads(text)
    if apply_script(src, again) != dst:
        raise ContractViolation("re-applying the written script does not reach the target")
    _emit(text, cfg)
    print(f"check: ok ({len(script)} steps, {script.comm_count} commutators)", file=sys.stderr)
    return 0


def cmd_map(a, cfg):
    if a.map_file is not None:
        f = VectorMap.loads(a.map_file.read_text())
    else:
        t = _need_t(cfg)
        if a.m is None:
            raise UsageError("map needs --m (or --map FILE)")
        f = build_alpha_to_beta(_perm(a.alpha, t, "--alpha"), _perm(a.beta, t, "--beta"), a.m)
    if a.apply is None:
        _emit(_header(cfg) + f.dumps(), cfg)
        print(f"output length {f.output_length}", file=sys.stderr)
        return 0
    manifest, vecs = load_vectors(a.apply.read_text())
    outs = [apply_vector_map(f, v) for v in vecs]
    for v, y in zip(vecs, outs):
        want = f.beta if v.fold() == f.alpha else (Permutation.identity(f.degree) if v.fold().is_identity() else None)
        if want is not None and y.fold() != want:
            raise ContractViolation(f"map sent fold {v.fold()} to {y.fold()}")
    _emit(dump_vectors(outs, {**manifest, "stage": "map", "seed": cfg.seed}, cfg.style), cfg)
    return 0


def _load_bp(a):
    return bpmod.BranchingProgram.loads(a.bp.read_text())


def cmd_compile_bp(a, cfg):
    B = _load_bp(a)
    inst = bpmod.encode(B, a.x)
    ev, sc = bpmod.eval_bp(B, a.x), inst.accepts()
    word = {True: "ACCEPT", False: "REJECT"}
    print(f"evaluator:  {word[ev]}")
    print(f"same-cycle: {word[sc]}")
    print(f"degree {inst.degree} (bound {2 * (B.size + 2)})")
    if cfg.out is not None:
        cfg.out.write_text(_header(cfg) + f"# bp={B.digest()} x={a.x}\n" + _fmt(inst.sigma, cfg) + "\n")
    if ev != sc:
        raise ContractViolation("evaluator and same-cycle test disagree")
    return 0


def cmd_reduce_id(a, cfg):
    B = _load_bp(a)
    vecs = red.bp_to_id_instances(B, a.x)
    hits = [i for i, v in enumerate(vecs) if v.fold().is_identity()]
    manifest = {"bp": B.digest(), "x": a.x, "stage": "bp_to_id", "seed": cfg.seed}
    if cfg.out is not None:
        _emit(dump_vectors(vecs, manifest, cfg.style), cfg)
    print(f"{len(vecs)} vectors over A_{vecs[0].degree}; folds to id at {hits or 'none'}")
    print("ACCEPT" if hits else "REJECT")
    if bool(hits) != bpmod.eval_bp(B, a.x):
        raise ContractViolation("instances disagree with direct evaluation")
    return 0


def cmd_reduce_single(a, cfg):
    if a.vector is not None:
        _, vecs = load_vectors(a.vector.read_text())
        if not vecs:
            raise UsageError(f"no vector in {a.vector}")
        x = vecs[0]
    else:
        t = _need_t(cfg)
        x = lk.sample_class(_perm(a.alpha, t, "--alpha or --vector"), rng=np.random.default_rng(cfg.seed))
    r = red.reduce_id_to_single(x, enumerate_candidates=a.enumerate, budget=a.budget)
    print(f"seed {cfg.seed}")
    print(f"fold != id: {str(r.answer).lower()}  (queries {r.queries}, path {r.path})")
    if r.witness is not None:
        w = red.resolve_candidate(x, r.witness)
        print(f"witness ({_fmt(w.gamma1, cfg)}, {_fmt(w.gamma2, cfg)}, {_fmt(w.gamma3, cfg)})")
    return 0


def cmd_sample(a, cfg):
    t = _need_t(cfg)
    alpha = _perm(a.alpha, t, "--alpha")
    rng = np.random.default_rng(cfg.seed)
    vecs = [lk.sample_class(alpha, rng=rng, length=a.length) for _ in range(a.count)]
    _emit(dump_vectors(vecs, {"alpha": format_cycles(alpha).replace(" ", ","), "seed": cfg.seed}, cfg.style), cfg)
    return 0


def cmd_tvd(a, cfg):
    t = _need_t(cfg)
    alpha = _perm(a.alpha, t, "--alpha")
    leak = lk.make_leakage(a.leak, t, alpha)
    if a.exact:
        print(lk.tvd_exact(leak, alpha, length=a.length))
        return 0
    est = lk.tvd_monte_carlo(leak, alpha, n=a.n, rng=cfg.seed, length=a.length, workers=cfg.workers, delta=a.delta)
    print(f"{est.estimate:.6f} +- {est.radius:.6f}  (n={est.n}, delta={est.delta}, seed={cfg.seed}, workers={cfg.workers})")
    if a.report is not None:
        lk.write_report([{
            "leakage": leak.name, "alpha": format_cycles(alpha), "t": t, "n": est.n,
            "estimate": est.estimate, "radius": est.radius, "delta": est.delta,
            "seconds": round(est.seconds, 3), "seed": cfg.seed, "workers": cfg.workers,
        }], a.report)
    return 0


def cmd_amplify(a, cfg):
    t = _need_t(cfg)
    alpha = _perm(a.alpha, t, "--alpha")
    c_prime = lk.make_leakage(a.leak, t, alpha)
    seeds = np.random.SeedSequence(cfg.seed).spawn(2)
    eps = a.eps if a.eps is not None else lk.calibrate_eps(c_prime, alpha, a.calib_n, np.random.default_rng(seeds[0]))
    p = lk.AmplifierParams(k=a.k, m=a.m, eps_alpha=eps, t=t)
    err = lk.amplifier_error_rate(alpha, c_prime, p, a.trials, np.random.default_rng(seeds[1]))
    print(f"eps_alpha {eps:.5f}  window [{p.low:.2f}, {p.high:.2f}]  m={a.m} k={a.k}")
    print(f"error {err:.4f} over {a.trials} trials (seed {cfg.seed})")
    return 0


def cmd_verify(a, cfg):
    nums = None
    if a.only:
        try:
            nums = [int(s) for s in a.only.split(",")]
        except ValueError:
            raise UsageError(f"bad --only list {a.only!r}") from None
        known = {c[0] for c in vf.CRITERIA}
        for n in nums:
            if n not in known:
                raise UsageError(f"unknown criterion {n}")
    failed = 0
    for r in vf.run_all(nums):
        print(r.line(), flush=True)
        failed += not (r.passed and r.within_time)
    return 2 if failed else 0


COMMANDS = {
    "perm": cmd_perm,
    "convert": cmd_convert,
    "map": cmd_map,
    "compile-bp": cmd_compile_bp,
    "reduce-id": cmd_reduce_id,
    "reduce-single": cmd_reduce_single,
    "sample": cmd_sample,
    "tvd": cmd_tvd,
    "amplify": cmd_amplify,
    "verify": cmd_verify,
}


def run(argv=None) -> int:
    try:
        a = build_parser().parse_args(argv)
        cfg = CommandConfig(a.command, a.t, a.seed, a.workers, a.style, a.out)
        return COMMANDS[a.command](a, cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except ContractViolation as e:
        print(f"contract violation: {e}", file=sys.stderr)
        return 2
    except (AlphaProdError, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
