"""Command-line interface.

Subsystem indices on the command line and in JSON output are 1-based.
Exit codes for ``check``: 0 equivalent, 1 inequivalent, 2 undetermined;
3 and above are errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .equivalence import CheckConfig, Verdict, check_equivalence, verify_witness
from .gauge_search import SearchConfig
from .realign_factor import RankError, factor_local_unitary, rank_one_deficiency
from .spectral import TOL_CLUSTER, eig_hermitian, group_spectrum
from .tensor_core import (
    DimensionError,
    MultipartiteState,
    StateValidationError,
    check_dims,
    partial_transpose,
    realign_bipartition,
)

EXIT_CODES = {Verdict.EQUIVALENT: 0, Verdict.INEQUIVALENT: 1, Verdict.UNDETERMINED: 2}
EXIT_ERROR = 3
EXIT_USAGE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _matrix_json(m: np.ndarray, dims) -> dict:
    doc = io.state_to_dict(m, dims, "hermitian")
    doc.pop("mode")
    return doc


def _print_matrix(name, m, out):
    print(f"{name} =", file=out)
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        print(np.array2string(np.asarray(m)), file=out)


def _dims_arg(text) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _cmd_check(args, out) -> int:
    S1, S2 = io.parse_state(args.a), io.parse_state(args.b)
    if args.pt == ["auto"]:
        pt = "auto"
    elif args.pt == ["none"]:
        pt = None
    else:
        pt = [int(k) - 1 for k in args.pt]
    search = SearchConfig(
        tol_rank=args.tol_rank,
        max_restarts=args.restarts,
        seed=args.seed,
        discrete_phase_grid=not args.no_grid,
        **({"workers": args.threads} if args.threads else {}),
    )
    cfg = CheckConfig(tol_cluster=args.tol_cluster, tol_verify=args.tol_verify, pt=pt, search=search)
    v = check_equivalence(S1, S2, cfg)
    pt_subset = [k + 1 for k in v.pt_subset]
    if args.witness_dir and v.witness is not None:
        d = Path(args.witness_dir)
        d.mkdir(parents=True, exist_ok=True)
        for k, u in enumerate(v.witness.factors, 1):
            io.write_matrix(u, [u.shape[0]], d / f"u{k}.json", mode="hermitian")
    if args.json:
        doc = {
            "verdict": v.kind.value,
            "residual": v.residual,
            "witness": None if v.witness is None else [_matrix_json(u, [u.shape[0]]) for u in v.witness.factors],
            "pt_subset": pt_subset,
            "search": {
                "restarts": v.reason.get("restarts"),
                "best_objective": v.reason.get("best_objective"),
                "seconds": v.reason.get("seconds"),
            },
            "reason": v.reason if v.kind is not Verdict.EQUIVALENT else None,
        }
        json.dump(doc, out, indent=2, default=float)
        out.write("\n")
    else:
        print(f"verdict: {v.kind.value}", file=out)
        if v.kind is Verdict.INEQUIVALENT:
            print(f"reason: {v.reason['condition']}", file=out)
            for key, val in v.reason.items():
                if key != "condition":
                    print(f"  {key}: {val}", file=out)
        else:
            print(f"pt subset: {pt_subset or 'none'}", file=out)
            print(
                "search: stage={stage} restarts={restarts} best_objective={best_objective:.3e} "
                "seconds={seconds:.3f}".format(**v.reason),
                file=out,
            )
        if v.witness is not None:
            print(f"residual: {v.residual:.3e}", file=out)
            for k, u in enumerate(v.witness.factors, 1):
                _print_matrix(f"u{k}", u, out)
    return EXIT_CODES[v.kind]


def _load_hermitian(path) -> MultipartiteState:
    mat, dims, mode = io.read_matrix(path)
    return MultipartiteState(mat, dims, mode)


def _cmd_spectrum(args, out) -> int:
    S = _load_hermitian(args.a)
    sp = eig_hermitian(S)
    st = group_spectrum(sp, args.tol_cluster)
    if args.json:
        json.dump({"values": sp.values.tolist(), "blocks": [list(b) for b in st.blocks]}, out, indent=2)
        out.write("\n")
    else:
        print("eigenvalues: " + " ".join(f"{x:.12g}" for x in sp.values), file=out)
        print(f"blocks (r={st.r}, s={st.s}): " + ", ".join(f"{v:.6g} x{m}" for v, m in st.blocks), file=out)
    return 0


def _cmd_realign(args, out) -> int:
    mat, dims, _ = io.read_matrix(args.a)
    cut = args.cut - 1
    R = realign_bipartition(mat, dims, cut)
    s = np.linalg.svd(R, compute_uv=False)
    if args.json:
        doc = {"cut": args.cut, "singular_values": s.tolist(), "deficiency": rank_one_deficiency(s)}
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        print(f"cut {args.cut}|rest: {R.shape[0]}x{R.shape[1]} realignment", file=out)
        print("singular values: " + " ".join(f"{x:.12g}" for x in s), file=out)
        print(f"rank-one deficiency: {rank_one_deficiency(s):.3e}", file=out)
    return 0


def _cmd_factor(args, out) -> int:
    mat, dims, _ = io.read_matrix(args.w)
    if args.dims:
        dims = check_dims(_dims_arg(args.dims))
    try:
        fac = factor_local_unitary(mat, dims, args.tol_rank)
    except RankError as err:
        cut = "" if err.cut is None else f" at cut {err.cut + 1}|rest"
        print(f"not a product of local unitaries{cut}: deficiency {err.deficiency:.3e}", file=sys.stderr)
        return 1
    if args.json:
        json.dump({"residual": fac.residual, "factors": [_matrix_json(u, [u.shape[0]]) for u in fac.factors]}, out, indent=2)
        out.write("\n")
    else:
        print(f"residual: {fac.residual:.3e}", file=out)
        for k, u in enumerate(fac.factors, 1):
            _print_matrix(f"u{k}", u, out)
    return 0


def _cmd_ptranspose(args, out) -> int:
    S = _load_hermitian(args.a)
    T = partial_transpose(S, [k - 1 for k in args.k])
    io.write_state(T, args.output)
    return 0


def _cmd_random_pair(args, out) -> int:
    dims = _dims_arg(args.dims)
    profile = _dims_arg(args.profile) if args.profile else None
    S1, S2, factors = io.random_pair(dims, args.seed, profile, shift=args.shift)
    io.write_state(S1, args.o1)
    io.write_state(S2, args.o2)
    if args.factors_dir:
        d = Path(args.factors_dir)
        d.mkdir(parents=True, exist_ok=True)
        for k, u in enumerate(factors, 1):
            io.write_matrix(u, [u.shape[0]], d / f"u{k}.json", mode="hermitian")
    return 0


def _cmd_verify(args, out) -> int:
    S1, S2 = _load_hermitian(args.a), _load_hermitian(args.b)
    factors = [io.read_matrix(p)[0] for p in args.witness]
    r = verify_witness(S1, S2, factors)
    ok = r <= args.tol_verify
    if args.json:
        json.dump({"residual": r, "ok": ok}, out)
        out.write("\n")
    else:
        print(f"residual: {r:.3e} ({'ok' if ok else 'FAILED'})", file=out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lueq", description="Local unitary equivalence of multipartite states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide equivalence of two state files")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--tol-cluster", type=float, default=TOL_CLUSTER, help="eigenvalue degeneracy tolerance")
    c.add_argument("--tol-rank", type=float, default=SearchConfig.tol_rank)
    c.add_argument("--tol-verify", type=float, default=CheckConfig.tol_verify)
    c.add_argument("--restarts", type=int, default=SearchConfig.max_restarts)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--pt", nargs="+", default=["auto"], help="auto, none, or subsystems to transpose")
    c.add_argument("--no-grid", action="store_true", help="skip the discrete phase grid")
    c.add_argument("--threads", type=int, default=None)
    c.add_argument("--witness-dir", help="write witness factors u1.json, u2.json, ... here")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=_cmd_check)

    s = sub.add_parser("spectrum", help="eigenvalues and degeneracy blocks")
    s.add_argument("a")
    s.add_argument("--tol-cluster", type=float, default=TOL_CLUSTER)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_spectrum)

    r = sub.add_parser("realign", help="singular values of the realignment across a cut")
    r.add_argument("a")
    r.add_argument("--cut", type=int, required=True)
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=_cmd_realign)

    f = sub.add_parser("factor", help="factor a unitary into local unitaries")
    f.add_argument("w")
    f.add_argument("--dims", help="override the file's dims, e.g. 2,2,2")
    f.add_argument("--tol-rank", type=float, default=SearchConfig.tol_rank)
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=_cmd_factor)

    t = sub.add_parser("ptranspose", help="partial transpose of a state file")
    t.add_argument("a")
    t.add_argument("--k", type=int, nargs="+", required=True)
    t.add_argument("-o", "--output", required=True)
    t.set_defaults(func=_cmd_ptranspose)

    g = sub.add_parser("random-pair", help="write a seeded locally equivalent pair")
    g.add_argument("--dims", required=True)
    g.add_argument("--profile", help="eigenvalue multiplicities, e.g. 2,2")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--shift", type=float, default=0.0, help="perturb the second spectrum by this much")
    g.add_argument("-o1", required=True)
    g.add_argument("-o2", required=True)
    g.add_argument("--factors-dir")
    g.set_defaults(func=_cmd_random_pair)

    v = sub.add_parser("verify", help="check a witness on a pair of states")
    v.add_argument("a")
    v.add_argument("b")
    v.add_argument("--witness", nargs="+", required=True)
    v.add_argument("--tol-verify", type=float, default=CheckConfig.tol_verify)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=_cmd_verify)
    return p


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (io.StateFileError, DimensionError, StateValidationError, OSError, ValueError) as err:
        print(f"lueq {args.command}: error: {err}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
