"""Command-line reports over the exact tower pipeline.

Every subcommand produces one canonical JSON document (sorted keys,
two-space indent, integers and fraction strings only, never floats) so
that repeated runs, cached runs, and multi-threaded runs are byte
identical.  Timing chatter goes to stderr.  Exit codes: 0 success,
1 integrity failure, 2 usage or parameter error, 3 audit found
mismatching rows.
"""

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Tuple

from . import __version__
from .errors import IntegrityError, ParameterError, UnsupportedError
from .ff import Params, basis_and_reps
from .genus import (_CLASS_ORDER, audit_closed_forms, base_floor_genus,
                    class_conductor, cover_classes, genus_of_F,
                    ree_aggregate, ree_line_groups, rh_genus,
                    verify_big_action)
from .local import conductor_of_cover
from .rng import SplitMix64
from .tower import (check_endo, commutator, compose_endo,
                    extension_multiplicity, identity_endo, invert_endo,
                    presentation, prolong_translation, sigma_shift,
                    tau_shift)

ONE_MONO = (0, 0, 0, 0, 0, 0)


def _enc(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return int(v)
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, str):
        return v
    if isinstance(v, dict):
        return {str(k): _enc(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    raise ParameterError(f"cannot encode {type(v).__name__} into a report")


def _params_payload(params: Params) -> Dict[str, int]:
    return {"p": params.p, "s": params.s, "q0": params.q0,
            "q": params.q, "n": params.n}


def _map_jobs(threads: int, fn, items: list) -> list:
    """Run fn over items, preserving input order in the results."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as ex:
        return list(ex.map(fn, items))


def _classes(params: Params, args):
    if args.threads <= 1:
        return cover_classes(params, samples=args.samples, seed=args.seed)
    ms = _map_jobs(
        args.threads,
        lambda label: class_conductor(params, label, samples=args.samples,
                                      seed=args.seed),
        list(_CLASS_ORDER))
    return cover_classes(params, conductors=dict(zip(_CLASS_ORDER, ms)))


def _class_rows(classes) -> List[Dict[str, int]]:
    return [{"label": c.label, "count": c.count, "conductor": c.conductor,
             "genus": c.genus} for c in classes]


# ------------------------------------------------------------ commands


def cmd_verify(params: Params, args) -> dict:
    rep = verify_big_action(params, samples=args.samples, seed=args.seed,
                            classes=_classes(params, args))
    return {
        "command": "verify",
        "params": _params_payload(params),
        "group_order": rep.group_order,
        "genus": rep.genus,
        "genus_printed": rep.genus_printed,
        "bound": _enc(rep.bound),
        "bound_printed": _enc(rep.bound_printed),
        "is_big": rep.is_big,
        "is_big_printed": rep.is_big_printed,
        "readings_agree": rep.readings_agree,
    }


def cmd_genus(params: Params, args) -> dict:
    rep = genus_of_F(params, samples=args.samples, seed=args.seed,
                     classes=_classes(params, args))
    return {
        "command": "genus",
        "params": _params_payload(params),
        "base_genus": rep.base_genus,
        "classes": _class_rows(rep.classes),
        "weighted_sum": rep.weighted_sum,
        "gs_subtraction": rep.gs_subtraction,
        "genus": rep.genus,
        "printed_subtraction": rep.printed_subtraction,
        "genus_printed": rep.genus_printed,
    }


def cmd_conductor(params: Params, args) -> dict:
    classes = _classes(params, args)
    first = conductor_of_cover(params, "y1", base="rational")
    lines = (params.q - 1) // (params.p - 1)
    payload = {
        "command": "conductor",
        "params": _params_payload(params),
        "base_floor": {
            "conductor": first.m,
            "line_genus": rh_genus(params.p, 0, first.m),
            "lines": lines,
            "genus": base_floor_genus(params),
        },
        "classes": _class_rows(classes),
    }
    if params.p == 3:
        groups = ree_line_groups(params)
        payload["two_floor_groups"] = {str(m): c
                                       for m, c in sorted(groups.items())}
        payload["two_floor_genus"] = ree_aggregate(params)
    return payload


def cmd_audit(params: Params, args) -> dict:
    rows = audit_closed_forms(params, samples=args.samples, seed=args.seed,
                              classes=_classes(params, args))
    encoded = [{
        "label": r.label,
        "closed": _enc(r.closed),
        "pipeline": r.pipeline,
        "match": r.match,
        "difference": _enc(r.difference),
    } for r in rows]
    return {
        "command": "audit",
        "params": _params_payload(params),
        "rows": encoded,
        "mismatches": sum(1 for r in rows if not r.match),
    }


def cmd_commutators(params: Params, args) -> dict:
    pres = presentation(params, "mixed")
    ctx = params.field()
    basis, _ = basis_and_reps(ctx)
    n = params.n
    two = 2 % ctx.p

    def pair_job(ij: Tuple[int, int]) -> Dict[str, int]:
        i, j = ij
        gi, gj = basis[i], basis[j]
        com = commutator(sigma_shift(pres, gi), tau_shift(pres, gj))
        shift = (com.images["w"] - pres.gen("w")).d.get(ONE_MONO, 0)
        expected = ctx.neg(ctx.mul(two, ctx.mul(gi, gj)))
        want = identity_endo(pres).replace(
            w=pres.gen("w") + pres.const(expected))
        if com != want:
            raise IntegrityError(
                f"commutator at basis pair ({i}, {j}) is not the expected "
                "central shift")
        rev = commutator(tau_shift(pres, gj), sigma_shift(pres, gi))
        rev_shift = (rev.images["w"] - pres.gen("w")).d.get(ONE_MONO, 0)
        if rev_shift != ctx.neg(expected):
            raise IntegrityError(
                f"reverse commutator at ({i}, {j}) has the wrong sign")
        return {"i": i, "j": j, "gamma_i": gi, "gamma_j": gj,
                "w_shift": shift, "reverse_w_shift": rev_shift}

    pairs = _map_jobs(args.threads, pair_job,
                      [(i, j) for i in range(n) for j in range(n)])

    ident = identity_endo(pres)
    same_kind = all(
        commutator(sigma_shift(pres, basis[i]), sigma_shift(pres, basis[j]))
        == ident
        and commutator(tau_shift(pres, basis[i]), tau_shift(pres, basis[j]))
        == ident
        for i in range(n) for j in range(i + 1, n))
    return {
        "command": "commutators",
        "params": _params_payload(params),
        "pairs": pairs,
        "sigma_pairs_commute": same_kind,
    }


def cmd_prolong(params: Params, args) -> dict:
    pres = presentation(params, "mixed")
    ctx = params.field()
    q = params.q
    ident = identity_endo(pres)
    exhaustive = q <= 128
    if exhaustive:
        avals = list(range(q))
    else:
        gen = SplitMix64(args.seed)
        avals = sorted({0, 1} | {gen.randbelow(q)
                                 for _ in range(max(args.samples, 2))})

    def cert(a: int) -> Tuple[bool, bool, bool]:
        endo = prolong_translation(pres, a)
        ok = check_endo(pres, endo).ok
        xok = endo.images["x"] == pres.x() + pres.const(a)
        iok = compose_endo(endo, invert_endo(endo)) == ident
        return ok, xok, iok

    results = _map_jobs(args.threads, cert, avals)
    if not all(ok for ok, _, _ in results):
        raise IntegrityError("a prolongation failed its relation check")

    basis, _ = basis_and_reps(ctx)

    def cocycle(ij: Tuple[int, int]) -> bool:
        a, b = basis[ij[0]], basis[ij[1]]
        delta = compose_endo(
            compose_endo(prolong_translation(pres, a),
                         prolong_translation(pres, b)),
            invert_endo(prolong_translation(pres, ctx.add(a, b))))
        return (delta.images["x"] == pres.x()
                and check_endo(pres, delta).ok)

    pairs = [(i, j) for i in range(params.n) for j in range(params.n)]
    vertical = _map_jobs(args.threads, cocycle, pairs)
    if not all(vertical):
        raise IntegrityError("a prolongation cocycle left the vertical group")

    return {
        "command": "prolong",
        "params": _params_payload(params),
        "translations_certified": len(avals),
        "exhaustive": exhaustive,
        "restriction_ok": all(x for _, x, _ in results),
        "inverses_ok": all(i for _, _, i in results),
        "cocycle_pairs": len(pairs),
        "cocycles_vertical": True,
        "multiplicity": extension_multiplicity(pres),
        "total_order": q ** 6,
    }


_COMMANDS = {
    "verify": cmd_verify,
    "conductor": cmd_conductor,
    "genus": cmd_genus,
    "commutators": cmd_commutators,
    "prolong": cmd_prolong,
    "audit": cmd_audit,
}


# ------------------------------------------------------------ plumbing


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cache_path(args) -> str:
    key = json.dumps({
        "command": args.command, "p": args.p, "s": args.s,
        "samples": args.samples, "seed": args.seed,
        "version": __version__,
    }, sort_keys=True)
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
    return os.path.join(args.cache_dir, f"{digest}.json")


def _obtain(args) -> Tuple[str, dict]:
    cache_file = _cache_path(args) if args.cache_dir else None
    if cache_file and os.path.exists(cache_file):
        with open(cache_file, "r", encoding="utf-8") as handle:
            text = handle.read()
        return text, json.loads(text)
    params = Params(args.p, args.s)
    payload = _COMMANDS[args.command](params, args)
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if cache_file:
        os.makedirs(args.cache_dir, exist_ok=True)
        _atomic_write(cache_file, text)
    return text, payload


def _exit_code(command: str, payload: dict) -> int:
    if command == "audit" and payload.get("mismatches"):
        return 3
    return 0


def _render_md(payload: dict) -> str:
    lines = [f"# astower {payload['command']}", ""]
    for k, v in sorted(payload.items()):
        if k != "command" and not isinstance(v, (list, dict)):
            lines.append(f"- {k}: {v}")
    for k, v in sorted(payload.items()):
        if isinstance(v, list) and v and isinstance(v[0], dict):
            cols = sorted(v[0])
            lines += ["", f"## {k}", "",
                      "| " + " | ".join(cols) + " |",
                      "| " + " | ".join("---" for _ in cols) + " |"]
            lines += ["| " + " | ".join(str(row.get(c, "")) for c in cols)
                      + " |" for row in v]
        elif isinstance(v, dict):
            lines += ["", f"## {k}", ""]
            lines += [f"- {kk}: {vv}" for kk, vv in sorted(v.items())]
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="astower",
        description="exact conductor, genus, and automorphism reports for "
                    "the five-step tower")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")
    helps = {
        "verify": "evaluate the big-action inequality under both readings",
        "conductor": "certified conductors for floors and cover classes",
        "genus": "full genus pipeline report",
        "commutators": "shift commutators acting on the last generator",
        "prolong": "certify prolongations of the x-translations",
        "audit": "compare pipeline genera with closed forms (exit 3 on "
                 "mismatch)",
    }
    for name, help_text in helps.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--p", type=int, required=True,
                        help="odd prime characteristic")
        sp.add_argument("--s", type=int, required=True,
                        help="tower parameter: q0 = p^s, q = p^(2s+1)")
        sp.add_argument("--samples", type=int, default=2,
                        help="random representatives per certified claim")
        sp.add_argument("--seed", type=int, default=0,
                        help="seed for all sampling (reports are "
                             "reproducible bit for bit)")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads; output bytes do not depend "
                             "on this")
        sp.add_argument("--cache-dir", default=None,
                        help="directory for keyed report caching")
        sp.add_argument("--out", default=None,
                        help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "md"), default="json")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        text, payload = _obtain(args)
        code = _exit_code(args.command, payload)
    except IntegrityError as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return 1
    except (ParameterError, UnsupportedError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    rendered = text if args.format == "json" else _render_md(payload)
    if args.out:
        _atomic_write(args.out, rendered)
    else:
        print(rendered, end="")
    elapsed = time.perf_counter() - started
    print(f"{args.command} elapsed {elapsed:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
