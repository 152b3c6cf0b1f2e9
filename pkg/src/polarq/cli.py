"""Command-line interface chaining the library into complete workflows.

Subcommands: ``construct`` (code construction), ``channel-info`` (quantizer
and capacity report), ``de design`` / ``de rates`` (density-evolution code
design and achievable-rate curves), ``epmu build`` (EPMU table), ``sim run``
(FER sweep), and ``gap`` (dB distance between two FER curves at a target).

Every artifact is written atomically (temp file + rename), accompanied by a
manifest recording the command, inputs, and content hashes. Existing outputs
are never overwritten without --force. Exit codes: 1 for configuration
errors, 2 for runtime failures.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import subprocess
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .channel import (BiAwgnParams, beec_capacity, beec_from,
                      beec_llr_reconstruction, biawgn_capacity, optimize_delta)
from .de import (RATE_CSV_COLUMNS, GridRep, LlrGrid, TernaryRep, design_code,
                 rate_curve)
from .epmu import build_table_for, code_hash
from .polar import CodeSpec, construct_rm
from .sim import (RunConfig, gap_db, interpolate_ebn0_at_fer, read_fer_csv,
                  run_sweep, write_fer_csv)


class ConfigError(Exception):
    pass


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _git_describe() -> str | None:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        return out.stdout.strip() or None
    except Exception:
        return None


def _write_atomic(path: str, text: str, force: bool):
    if os.path.exists(path) and not force:
        raise ConfigError(f"refusing to overwrite {path} (use --force)")
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(command: str, args_doc: dict, outputs: list[str], force: bool,
                    extra: dict | None = None):
    main_out = outputs[0]
    doc = {
        "command": command,
        "args": args_doc,
        "outputs": {p: _sha256(p) for p in outputs},
        "version": __version__,
        "git_describe": _git_describe(),
        "timestamp_unix": int(time.time()),
    }
    if extra:
        doc.update(extra)
    _write_atomic(main_out + ".manifest.json", json.dumps(doc, indent=2) + "\n", force)


def _emit(text: str, out: str | None, force: bool):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        _write_atomic(out, text if text.endswith("\n") else text + "\n", force)


def _load_code(path: str) -> CodeSpec:
    try:
        with open(path) as fh:
            return CodeSpec.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad code spec {path}: {exc}") from exc


def _cmd_construct(args) -> int:
    if args.rm is not None:
        m, r = args.rm
        spec = construct_rm(m, r)
    else:
        if args.de is None:
            raise ConfigError("choose a construction: --rm M R or --de M K")
        if args.design_ebn0_db is None:
            raise ConfigError("--de needs --design-ebn0-db")
        m, k = args.de
        spec = _design_de(m, k, args.design_ebn0_db,
                          channel=args.design_channel, algebra=args.design_algebra)
    _emit(spec.to_json(), args.out, args.force)
    if args.out:
        _write_manifest("construct", vars_doc(args), [args.out], args.force)
    return 0


def _design_de(m: int, k: int, design_ebn0_db: float, channel: str = "3q",
               algebra: str = "l3") -> CodeSpec:
    """DE code design. The default ranks synthetic channels with ternary DE
    over the quantized channel, matching the decoders the code is meant
    for; "awgn"/"linf" selects unquantized min-sum DE on the BiAWGN."""
    from .channel import beec_from, optimize_delta
    params = BiAwgnParams.from_ebn0_db(design_ebn0_db, rate=k / 2**m)
    if channel == "awgn":
        rep = GridRep(LlrGrid(), cn_kernel="minsum")
        pmf = rep.biawgn_channel_pmf(params)
    elif algebra == "l3":
        rep = TernaryRep()
        delta, _ = optimize_delta(params)
        pmf = rep.channel_pmf(beec_from(params, delta))
    else:
        from .channel import beec_llr_reconstruction
        rep = GridRep(LlrGrid(), cn_kernel="minsum")
        delta, _ = optimize_delta(params)
        beec = beec_from(params, delta)
        pmf = rep.beec_channel_pmf(beec, beec_llr_reconstruction(beec))
    return design_code(m, k, pmf, rep, design_snr_db=design_ebn0_db)


def _cmd_channel_info(args) -> int:
    params = BiAwgnParams.from_ebn0_db(args.ebn0_db, args.rate)
    delta, cap3 = optimize_delta(params)
    beec = beec_from(params, delta)
    doc = {
        "ebn0_db": args.ebn0_db,
        "rate": args.rate,
        "sigma2": params.sigma2,
        "esn0_db": 10 * np.log10(params.esn0),
        "delta_star": delta,
        "beec": {"p_correct": beec.p_correct, "p_erase": beec.p_erase,
                 "p_error": beec.p_error},
        "recon_llr_unq": beec_llr_reconstruction(beec),
        "capacity_biawgn_bits": biawgn_capacity(params),
        "capacity_beec_bits": beec_capacity(beec),
    }
    _emit(json.dumps(doc, indent=2), args.out, args.force)
    return 0


def _cmd_de_design(args) -> int:
    spec = _design_de(args.m, args.k, args.design_ebn0_db,
                      channel=args.design_channel, algebra=args.design_algebra)
    _emit(spec.to_json(), args.out, args.force)
    if args.out:
        _write_manifest("de design", vars_doc(args), [args.out], args.force)
    return 0


def _cmd_de_rates(args) -> int:
    esn0_points = np.linspace(args.esn0_db_min, args.esn0_db_max, args.points)
    grid = LlrGrid(spacing=args.grid_spacing, half_extent=args.grid_extent)
    rows = rate_curve(esn0_points, m_eval=args.m_eval, grid=grid)
    lines = [",".join(RATE_CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(f"{row[c]:.8g}" for c in RATE_CSV_COLUMNS))
    _emit("\n".join(lines), args.out, args.force)
    if args.out:
        _write_manifest("de rates", vars_doc(args), [args.out], args.force)
    return 0


def _cmd_epmu_build(args) -> int:
    spec = _load_code(args.code)
    table = build_table_for(spec, args.ebn0_db)
    _emit(table.to_json(), args.out, args.force)
    if args.out:
        _write_manifest("epmu build", vars_doc(args), [args.out], args.force,
                        extra={"code_hash": table.code_hash})
    return 0


def _cmd_sim_run(args) -> int:
    try:
        with open(args.config) as fh:
            config = RunConfig.from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad run config {args.config}: {exc}") from exc
    if os.path.exists(args.out) and not args.force:
        raise ConfigError(f"refusing to overwrite {args.out} (use --force)")
    threads = args.threads or int(os.environ.get("POLARQ_THREADS", "1"))
    records = run_sweep(config, out_csv=None, threads=threads)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(args.out)),
                               prefix=".tmp-")
    os.close(fd)
    try:
        write_fer_csv(records, tmp)
        os.replace(tmp, args.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    extra = {"code_hash": code_hash(config.code), "config": json.loads(config.to_json())}
    _write_manifest("sim run", vars_doc(args), [args.out], True, extra=extra)
    return 0


def _cmd_gap(args) -> int:
    rec_a = read_fer_csv(args.csv_a)
    rec_b = read_fer_csv(args.csv_b)
    g = gap_db(rec_a, rec_b, args.fer, metric_a=args.metric_a,
               metric_b=args.metric_b or args.metric_a)
    xa = interpolate_ebn0_at_fer(rec_a, args.fer, args.metric_a)
    xb = interpolate_ebn0_at_fer(rec_b, args.fer, args.metric_b or args.metric_a)
    print(json.dumps({"target_fer": args.fer, "ebn0_a_db": xa, "ebn0_b_db": xb,
                      "gap_db": g}))
    return 0


def vars_doc(args) -> dict:
    doc = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in doc.items()}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polarq")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="emit a code spec as JSON")
    c.add_argument("--rm", nargs=2, type=int, metavar=("M", "R"),
                   help="Reed-Muller code of depth M and order R")
    c.add_argument("--de", nargs=2, type=int, metavar=("M", "K"))
    c.add_argument("--design-ebn0-db", type=float)
    c.add_argument("--design-channel", choices=["3q", "awgn"], default="3q")
    c.add_argument("--design-algebra", choices=["l3", "linf"], default="l3")
    c.add_argument("--out")
    c.add_argument("--force", action="store_true")
    c.set_defaults(func=_cmd_construct)

    ci = sub.add_parser("channel-info", help="quantizer and capacity report")
    ci.add_argument("--ebn0-db", type=float, required=True)
    ci.add_argument("--rate", type=float, required=True)
    ci.add_argument("--out")
    ci.add_argument("--force", action="store_true")
    ci.set_defaults(func=_cmd_channel_info)

    de = sub.add_parser("de", help="density evolution workflows")
    de_sub = de.add_subparsers(dest="de_command", required=True)
    dd = de_sub.add_parser("design", help="DE code design")
    dd.add_argument("--m", type=int, required=True)
    dd.add_argument("--k", type=int, required=True)
    dd.add_argument("--design-ebn0-db", type=float, required=True)
    dd.add_argument("--design-channel", choices=["3q", "awgn"], default="3q")
    dd.add_argument("--design-algebra", choices=["l3", "linf"], default="l3")
    dd.add_argument("--out")
    dd.add_argument("--force", action="store_true")
    dd.set_defaults(func=_cmd_de_design)
    dr = de_sub.add_parser("rates", help="achievable-rate curves CSV")
    dr.add_argument("--esn0-db-min", type=float, default=-10.0)
    dr.add_argument("--esn0-db-max", type=float, default=3.0)
    dr.add_argument("--points", type=int, default=14)
    dr.add_argument("--m-eval", type=int, default=12)
    dr.add_argument("--grid-spacing", type=float, default=1.0 / 32.0)
    dr.add_argument("--grid-extent", type=float, default=60.0)
    dr.add_argument("--out")
    dr.add_argument("--force", action="store_true")
    dr.set_defaults(func=_cmd_de_rates)

    ep = sub.add_parser("epmu", help="EPMU table workflows")
    ep_sub = ep.add_subparsers(dest="epmu_command", required=True)
    eb = ep_sub.add_parser("build", help="build a table for a code and SNR")
    eb.add_argument("--code", required=True, help="code spec JSON path")
    eb.add_argument("--ebn0-db", type=float, required=True)
    eb.add_argument("--out")
    eb.add_argument("--force", action="store_true")
    eb.set_defaults(func=_cmd_epmu_build)

    sm = sub.add_parser("sim", help="Monte-Carlo simulation")
    sm_sub = sm.add_subparsers(dest="sim_command", required=True)
    sr = sm_sub.add_parser("run", help="run an FER sweep from a JSON config")
    sr.add_argument("--config", required=True)
    sr.add_argument("--out", required=True)
    sr.add_argument("--threads", type=int, default=0,
                    help="0 = use POLARQ_THREADS or 1")
    sr.add_argument("--force", action="store_true")
    sr.set_defaults(func=_cmd_sim_run)

    g = sub.add_parser("gap", help="dB gap between two FER curves")
    g.add_argument("csv_a")
    g.add_argument("csv_b")
    g.add_argument("--fer", type=float, default=1e-3)
    g.add_argument("--metric-a", default="pm", choices=["pm", "lml", "list", "mllb"])
    g.add_argument("--metric-b", default=None, choices=["pm", "lml", "list", "mllb"])
    g.set_defaults(func=_cmd_gap)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
