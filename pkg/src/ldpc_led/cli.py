"""Command-line entry point: ``ldpc-led <subcommand> ...``.

Exit status 0 on success, 1 on usage or input errors, 2 on numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import bounds, codes, spectra
from .bpled import BpLedParams
from .sim import format_fer_csv, run_fer


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    """'1,2,3' or '1:6:1' (start:stop:step, inclusive)."""
    text = text.strip()
    if ":" in text:
        a, b, s = (float(x) for x in text.split(":"))
        if s <= 0:
            raise argparse.ArgumentTypeError("step must be positive")
        out, k = [], 0
        while a + k * s <= b + 1e-9:
            out.append(round(a + k * s, 10))
            k += 1
        return out
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def read_config(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected 'key = value'")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _apply_config(sub: argparse.ArgumentParser, args, cfg: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None or key in ("help", "config"):
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            val = raw.lower() in ("1", "true", "yes", "on")
        elif act.nargs not in (None, "?"):
            conv = act.type or str
            val = [conv(x) for x in raw.split()]
        else:
            try:
                val = act.type(raw) if act.type else raw
            except (ValueError, argparse.ArgumentTypeError) as e:
                raise UsageError(f"bad value for {key}: {e}") from None
        setattr(args, key, val)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--config", help="key = value file; its entries override flags")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="ldpc-led", description="BP and BP-LED decoding of LDPC codes")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    table = {}

    p = subs.add_parser("simulate", help="Monte-Carlo FER of BP and BP-LED")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--code", help="degree-matrix file (or name of a bundled file)")
    src.add_argument("--gallager", type=int, nargs=3, metavar=("J", "K", "N"),
                     help="sample a Gallager ensemble member instead")
    p.add_argument("--code-seed", type=int, default=0)
    p.add_argument("--snr", type=_floats, default=[3.0], help="Eb/N0 grid in dB")
    p.add_argument("--rate", type=float, help="rate for Eb/N0 (default: design rate)")
    p.add_argument("--stop-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=1_000_000)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.16)
    p.add_argument("--masks", type=int, default=10)
    p.add_argument("--jmax", type=int, default=256)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--mask-kind", choices=("rm", "random"), default="rm")
    p.add_argument("--no-timing", action="store_true",
                   help="write wall_seconds as 0 so reruns are byte-identical")
    _add_common(p)
    table["simulate"] = p

    p = subs.add_parser("bounds", help="sphere-packing and tangential sphere bounds")
    p.add_argument("--n", type=int)
    p.add_argument("--rate", type=float)
    p.add_argument("--spectrum", help="spectrum file (default: random linear code)")
    p.add_argument("--snr", type=_floats, default=_floats("1:6:1"))
    _add_common(p)
    table["bounds"] = p

    p = subs.add_parser("spectrum", help="ensemble-average weight spectrum")
    p.add_argument("J", type=int)
    p.add_argument("K", type=int)
    p.add_argument("n", type=int)
    p.add_argument("m", type=int, nargs="?", default=1, help="field GF(2^m), default binary")
    _add_common(p)
    table["spectrum"] = p

    p = subs.add_parser("analyze", help="list-size analysis")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--critical-alpha", type=int, nargs=2, metavar=("J", "K"))
    grp.add_argument("--list-bound", type=int, nargs=4, metavar=("NU", "N", "R", "K"))
    _add_common(p)
    table["analyze"] = p

    p = subs.add_parser("girth", help="Tanner-graph girth of a code file")
    p.add_argument("code")
    _add_common(p)
    table["girth"] = p
    return parser, table


def _load_code(name: str) -> codes.ParityCheck:
    path = Path(name)
    if not path.exists():
        path = codes.bundled_code_path(name)
    return codes.load_qc_code(path)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(a) -> None:
    if a.gallager:
        j, k, n = a.gallager
        h = codes.sample_gallager(j, k, n, a.code_seed)
    elif a.code:
        h = _load_code(a.code)
    else:
        raise UsageError("simulate needs --code or --gallager")
    params = BpLedParams(alpha=a.alpha, beta=a.beta, n_masks=a.masks, j_max=a.jmax,
                         max_iter=a.max_iter, mask_kind=a.mask_kind)
    recs = run_fer(h, params, a.snr, stop_errors=a.stop_errors, max_trials=a.max_trials,
                   master_seed=a.seed, rate=a.rate, threads=a.threads)
    _emit(format_fer_csv(recs, timing=not a.no_timing), a.out)


def _cmd_bounds(a) -> None:
    if a.spectrum:
        table = spectra.read_spectrum(a.spectrum)
        n = table.n
        rate = a.rate
        if rate is None:
            p = table.params or {}
            if "J" not in p or "K" not in p:
                raise UsageError("--rate is required for this spectrum file")
            rate = 1.0 - p["J"] / p["K"]
    else:
        if a.n is None or a.rate is None:
            raise UsageError("bounds needs --n and --rate, or --spectrum")
        n, rate = a.n, a.rate
        table = spectra.random_code_spectrum(n, rate)
    if not 0 < rate < 1:
        raise UsageError("rate must lie in (0, 1)")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["snr_db", "sigma", "shannon_lower", "tsb_upper"])
    for snr in a.snr:
        s = bounds.sigma_from_ebn0(snr, rate)
        w.writerow([snr, repr(s), repr(bounds.shannon_lower(n, rate, s)),
                    repr(bounds.tsb_upper(n, table, s, verify=True))])
    _emit(buf.getvalue(), a.out)


def _cmd_spectrum(a) -> None:
    if a.m == 1:
        table = spectra.gallager_avg_spectrum(a.J, a.K, a.n)
    else:
        table = spectra.nb_image_avg_spectrum(a.J, a.K, a.n, a.m)
    _emit(spectra.format_spectrum(table), a.out)


def _cmd_analyze(a) -> None:
    if a.critical_alpha:
        _emit(f"{bounds.critical_alpha(*a.critical_alpha):.6f}\n", a.out)
    elif a.list_bound:
        _emit(f"{bounds.avg_list_bound(*a.list_bound)!r}\n", a.out)
    else:
        raise UsageError("analyze needs --critical-alpha J K or --list-bound NU N R K")


def _cmd_girth(a) -> None:
    _emit(f"{codes.girth(_load_code(a.code))}\n", a.out)


COMMANDS = {"simulate": _cmd_simulate, "bounds": _cmd_bounds, "spectrum": _cmd_spectrum,
            "analyze": _cmd_analyze, "girth": _cmd_girth}


def main(argv=None) -> int:
    parser, table = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.config:
            _apply_config(table[args.command], args, read_config(args.config))
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        COMMANDS[args.command](args)
    except (bounds.NumericalError, bounds.DegenerateSpectrumError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
