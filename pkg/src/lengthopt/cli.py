"""Command-line front end.

Exit codes: 0 on success, 2 on input errors, 3 when every requested score is
degenerate.  One language per input file; its label is the file stem.
"""

from __future__ import annotations

import argparse
import json
import math
import secrets
import sys
from pathlib import Path

from . import __version__
from .analysis import law_battery, recoding_comparison
from .core import FrequencyLengthTable, affine, apply_length_transform, power
from .errors import LengthOptError
from .ingest import (
    DEFAULT_VOWELS,
    _is_cjk,
    aggregate,
    apply_alphabet_filter,
    character_frequencies,
    cjk_filter,
    convergence_curve,
    drop_vowels,
    load_vowels,
    mandatory_filter,
    read_table,
    working_alphabet,
)
from .nullmodel import monte_carlo_null, permutation_test_L
from .scores import SCORE_FIELDS, score_report

EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class InputError(Exception):
    pass


# -- loading -----------------------------------------------------------------

def _filtered_tokens(path, args) -> list:
    tokens = list(read_table(path, args.format))
    if args.filter in ("mandatory", "full"):
        tokens = list(mandatory_filter(tokens, strip=args.strip))
    if args.filter == "full":
        if args.cjk_mode:
            tokens = list(cjk_filter(tokens))
        else:
            tokens = list(apply_alphabet_filter(tokens, working_alphabet(tokens)))
    return tokens


def _resolve_filter(args) -> None:
    if args.filter is None:
        args.filter = "none" if args.format == "fl" else "mandatory"
    elif args.format == "fl" and args.filter != "none":
        raise InputError("token filters need token input; use --filter none with --format fl")


def load_table(path, args) -> FrequencyLengthTable:
    if not Path(path).is_file():
        raise InputError(f"no such file: {path}")
    if args.format == "fl":
        return read_table(path, "fl")
    if args.format == "tokens" and args.length != "chars":
        raise InputError("duration lengths need --format aligned")
    return aggregate(_filtered_tokens(path, args), args.length)


def _inputs(args) -> list[Path]:
    paths = []
    for item in args.input:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(q for q in p.iterdir() if q.is_file() and not q.name.startswith(".")))
        else:
            paths.append(p)
    if not paths:
        raise InputError("no input files")
    labels = [p.stem for p in paths]
    if len(set(labels)) != len(labels):
        raise InputError("input files must have distinct stems")
    return sorted(paths, key=lambda p: p.stem)


def _single_input(args) -> Path:
    paths = _inputs(args)
    if len(paths) != 1:
        raise InputError(f"this command takes exactly one input, got {len(paths)}")
    return paths[0]


# -- output ------------------------------------------------------------------

def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _emit_json(obj, out) -> None:
    # floats use repr(), the shortest string that round-trips exactly
    out.write(json.dumps(_clean(obj), ensure_ascii=False, indent=2))
    out.write("\n")


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else "NA"
    return str(value)


def _emit_tsv(header, rows, out) -> None:
    out.write("\t".join(header) + "\n")
    for row in rows:
        out.write("\t".join(_cell(v) for v in row) + "\n")


def _report_fields(args) -> list[str]:
    fields = ["L_min", "L", "L_r", "tau", "tau_min", "eta", "psi", "omega", "pearson_r"]
    if args.with_rho:
        fields += ["rho", "rho_min", "omega_rho"]
    if args.with_gamma:
        fields += ["gamma"]
    return fields


def _report(table, args):
    return score_report(table, with_rho=args.with_rho, with_gamma=args.with_gamma)


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(64)


# -- commands ----------------------------------------------------------------

def cmd_score(args, out) -> int:
    path = _single_input(args)
    report = _report(load_table(path, args), args)
    if args.json:
        _emit_json({"command": "score", "label": path.stem, "length": args.length,
                    "report": report.as_dict()}, out)
    else:
        fields = _report_fields(args)
        _emit_tsv(["label", "n", "T"] + fields,
                  [[path.stem, report.n, report.T] + [getattr(report, f) for f in fields]], out)
    return EXIT_DEGENERATE if report.all_scores_absent else 0


def cmd_law(args, out) -> int:
    paths = _inputs(args)
    tables = {p.stem: load_table(p, args) for p in paths}
    battery, results = law_battery(tables, args.method, workers=args.workers)
    rows = []
    for res, (label, raw, adj, mark) in zip(results, battery.rows()):
        test = res.tests.get(args.method)
        rows.append({
            "label": label,
            "n": res.n,
            "T": res.T,
            "coefficient": test.coefficient if test else None,
            "p_raw": raw,
            "p_adjusted": adj,
            "mark": mark,
            "reason": res.failures.get(args.method),
        })
    if args.json:
        _emit_json({"command": "law", "method": args.method, "rows": rows}, out)
    else:
        header = ["label", "n", "T", "coefficient", "p_raw", "p_adjusted", "mark", "reason"]
        _emit_tsv(header, [[r[h] for h in header] for r in rows], out)
    return EXIT_DEGENERATE if all(r["p_raw"] is None for r in rows) else 0


def cmd_null(args, out) -> int:
    seed = _seed(args)
    rows = []
    for path in _inputs(args):
        table = load_table(path, args)
        est = monte_carlo_null(table, args.randomizations, seed, workers=args.workers)
        row = {
            "label": path.stem,
            "L_min": est.L_min,
            "L_r": est.L_r,
            "eta_bound": est.eta_bound,
            "eta": {"mean": est.mean_eta, "sd": est.sd_eta, "valid": est.valid_eta},
            "psi": {"mean": est.mean_psi, "sd": est.sd_psi, "valid": est.valid_psi},
            "omega": {"mean": est.mean_omega, "sd": est.sd_omega, "valid": est.valid_omega},
        }
        if args.permutation_test:
            row["p_L"] = permutation_test_L(table, args.randomizations, seed, workers=args.workers).p_value
        rows.append(row)
    if args.json:
        _emit_json({"command": "null", "seed": seed, "R": args.randomizations, "rows": rows}, out)
    else:
        header = ["label", "seed", "R", "L_min", "L_r", "eta_bound"]
        for s in ("eta", "psi", "omega"):
            header += [f"mean_{s}", f"sd_{s}", f"valid_{s}"]
        if args.permutation_test:
            header.append("p_L")
        table_rows = []
        for r in rows:
            line = [r["label"], seed, args.randomizations, r["L_min"], r["L_r"], r["eta_bound"]]
            for s in ("eta", "psi", "omega"):
                line += [r[s]["mean"], r[s]["sd"], r[s]["valid"]]
            if args.permutation_test:
                line.append(r["p_L"])
            table_rows.append(line)
        _emit_tsv(header, table_rows, out)
    degenerate = all(r["eta"]["valid"] == r["psi"]["valid"] == r["omega"]["valid"] == 0 for r in rows)
    return EXIT_DEGENERATE if degenerate else 0


def cmd_converge(args, out) -> int:
    if args.format == "fl":
        raise InputError("convergence needs token input (--format tokens or aligned)")
    if args.format == "tokens" and args.length != "chars":
        raise InputError("duration lengths need --format aligned")
    path = _single_input(args)
    seed = _seed(args)
    tokens = _filtered_tokens(path, args)
    curve = convergence_curve(tokens, args.reps, seed, args.length, workers=args.workers)
    rows = []
    for j, t in enumerate(curve.t):
        row = {"t": t}
        for s in ("eta", "psi", "omega"):
            row[s] = curve.mean[s][j]
        for s in ("eta", "psi", "omega"):
            row[f"valid_{s}"] = curve.valid[s][j]
        rows.append(row)
    if args.json:
        _emit_json({"command": "converge", "label": path.stem, "seed": seed,
                    "reps": args.reps, "rows": rows}, out)
    else:
        header = ["t", "eta", "psi", "omega", "valid_eta", "valid_psi", "valid_omega"]
        _emit_tsv(["label", "seed", "reps"] + header,
                  [[path.stem, seed, args.reps] + [r[h] for h in header] for r in rows], out)
    return 0


def _length_table(path) -> dict[float, float]:
    mapping = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        try:
            mapping[float(cols[0])] = float(cols[1])
        except (ValueError, IndexError):
            raise InputError(f"{path}: line {lineno}: expected 'old<TAB>new' lengths") from None
    return mapping


def _recoder(op: str, args):
    if op == "drop-vowels":
        vowels = load_vowels(args.vowels) if args.vowels else DEFAULT_VOWELS
        return lambda table: drop_vowels(table, vowels)
    kind, _, spec = op.partition(":")
    try:
        if kind == "affine":
            a, b = (float(v) for v in spec.split(","))
            if a <= 0:
                raise InputError("affine recoding needs a > 0")
            return lambda table: apply_length_transform(table, affine(a, b))
        if kind == "pow":
            base = float(spec)
            return lambda table: apply_length_transform(table, power(base))
    except ValueError:
        raise InputError(f"cannot parse recoding {op!r}") from None
    if kind == "table":
        mapping = _length_table(spec)

        def recode(table):
            missing = sorted({l for l in table.lengths.tolist() if l not in mapping})
            if missing:
                raise InputError(f"length table has no entry for {missing[:5]}")
            return apply_length_transform(table, mapping.__getitem__)
        return recode
    raise InputError(f"unknown recoding {op!r}")


def cmd_recode(args, out) -> int:
    recode = _recoder(args.op, args)
    rows = []
    for path in _inputs(args):
        table = load_table(path, args)
        rows.append({
            "label": path.stem,
            "before": _report(table, args),
            "after": _report(recode(table), args),
        })
    fits = None
    if len(rows) >= 3:
        try:
            fits = recoding_comparison(
                {r["label"]: r["before"] for r in rows}, {r["label"]: r["after"] for r in rows}
            )
        except LengthOptError:
            fits = None
    if args.json:
        obj = {
            "command": "recode",
            "op": args.op,
            "rows": [{"label": r["label"], "before": r["before"].as_dict(),
                      "after": r["after"].as_dict()} for r in rows],
        }
        if fits:
            obj["fits"] = {k: vars(v) for k, v in fits.items()}
        _emit_json(obj, out)
    else:
        fields = _report_fields(args)
        lines = []
        for r in rows:
            for stage in ("before", "after"):
                rep = r[stage]
                lines.append([r["label"], stage, rep.n, rep.T] + [getattr(rep, f) for f in fields])
        _emit_tsv(["label", "stage", "n", "T"] + fields, lines, out)
    degenerate = all(r["before"].all_scores_absent and r["after"].all_scores_absent for r in rows)
    return EXIT_DEGENERATE if degenerate else 0


def cmd_alphabet(args, out) -> int:
    path = _single_input(args)
    if args.format == "fl":
        source = read_table(path, "fl")
    else:
        source = list(mandatory_filter(read_table(path, args.format), strip=args.strip))
    counts = character_frequencies(source)
    if args.cjk_mode:
        kept = {c for c in counts if _is_cjk(c)}
        mode, threshold, sse = "cjk", None, (0.0, 0.0)
    else:
        alpha = working_alphabet(source)
        kept, mode, threshold, sse = alpha.kept, "frequency", alpha.threshold, alpha.sse
    order = sorted(counts, key=lambda c: (-counts[c], c))

    def entry(c):
        return {"char": c, "count": counts[c], "log_frequency": math.log(counts[c])}

    if args.json:
        _emit_json({
            "command": "alphabet",
            "label": path.stem,
            "mode": mode,
            "kept": [entry(c) for c in order if c in kept],
            "excluded": [entry(c) for c in order if c not in kept],
            "threshold": threshold,
            "sse": list(sse),
            "A_before": len(counts),
            "A_after": len(kept),
        }, out)
    else:
        _emit_tsv(["char", "count", "log_frequency", "cluster"],
                  [[c, counts[c], math.log(counts[c]), "kept" if c in kept else "excluded"]
                   for c in order], out)
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", action="append", required=True,
                        help="input file or directory (repeatable)")
    common.add_argument("--format", choices=("fl", "tokens", "aligned"), default="fl")
    common.add_argument("--filter", choices=("none", "mandatory", "full"), default=None,
                        help="token filtering (default: mandatory for token input, none for fl)")
    common.add_argument("--length", choices=("chars", "duration-median", "duration-mean"), default="chars")
    common.add_argument("--strip", default="=", help="characters removed from every token (default '=')")
    common.add_argument("--cjk-mode", action="store_true",
                        help="optional filter keeps only CJK characters instead of the frequency split")
    common.add_argument("--json", action="store_true", help="emit JSON instead of TSV")
    common.add_argument("--with-rho", action="store_true", help="add Spearman rho, rho_min and omega_rho")
    common.add_argument("--with-gamma", action="store_true", help="add Goodman-Kruskal gamma")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=1, help="worker threads")
    common.add_argument("--vowels", default=None, help="file listing the vowel characters")

    parser = argparse.ArgumentParser(prog="lengthopt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("score", parents=[common], help="optimality scores of one table")
    p = sub.add_parser("law", parents=[common], help="law-of-abbreviation battery")
    p.add_argument("--method", choices=("kendall", "pearson"), default="kendall")
    p = sub.add_parser("null", parents=[common], help="Monte Carlo null expectations")
    p.add_argument("--randomizations", type=int, default=10_000)
    p.add_argument("--permutation-test", action="store_true",
                   help="also report the permutation p-value of L")
    p = sub.add_parser("converge", parents=[common], help="scores over random sub-samples")
    p.add_argument("--reps", type=int, default=100)
    p = sub.add_parser("recode", parents=[common], help="scores before/after a weak recoding")
    p.add_argument("--op", required=True,
                   help="drop-vowels | affine:A,B | pow:BASE | table:PATH")
    sub.add_parser("alphabet", parents=[common], help="working alphabet of a corpus")
    return parser


COMMANDS = {
    "score": cmd_score,
    "law": cmd_law,
    "null": cmd_null,
    "converge": cmd_converge,
    "recode": cmd_recode,
    "alphabet": cmd_alphabet,
}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command != "alphabet":
            _resolve_filter(args)
        if getattr(args, "randomizations", 1) < 1 or getattr(args, "reps", 1) < 1:
            raise InputError("--randomizations and --reps must be positive")
        return COMMANDS[args.command](args, out)
    except (InputError, LengthOptError, OSError) as exc:
        print(f"lengthopt: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
