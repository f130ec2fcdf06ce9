"""Command-line front door: live console tests, batch replay, simulation,
confidence tables, plot export, undo and resume.

Exit codes: 0 success, 2 bad arguments, 3 suspended by the operator,
4 suspended by data degeneracy, 1 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import confidence, plotdata, simulate
from .numerics import OverlapStatus
from .phase1 import Phase1Config, Procedure
from .session import (PromptKind, SessionConfig, SuspendedError, TestSession,
                      fmt, run_batch)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BAD_ARGS = 2
EXIT_SUSPENDED_USER = 3
EXIT_SUSPENDED_DEGENERATE = 4


def _parse_numbers(text):
    if text is None:
        return []
    p = Path(text)
    if p.exists():
        text = p.read_text()
    raw = text.replace(",", " ").split()
    return [float(v) for v in raw]


def _session_config(args) -> SessionConfig:
    bl = tuple(int(v) for v in args.BL.split(",")) if getattr(args, "BL", None) else None
    p1 = Phase1Config(Procedure(args.test), args.mlo, args.mhi, args.sg,
                      term1=not getattr(args, "no_term1", False), bl=bl)
    return SessionConfig(phase1=p1, reso=args.reso, log_scale=args.ln)


def _add_test_args(sp, sim=False):
    sp.add_argument("mlo", type=float)
    sp.add_argument("mhi", type=float)
    sp.add_argument("sg", type=float)
    sp.add_argument("--test", type=int, default=1, choices=[1, 2, 3, 4],
                    help="1=3pod 2=Neyer 3=Bruceton 4=Langlie")
    sp.add_argument("--reso", type=float, default=0.0)
    sp.add_argument("--ln", action="store_true", help="run on the log scale")
    sp.add_argument("--BL", help="nRev,i1,i2 for Bruceton/Langlie, e.g. 4,1,0")
    sp.add_argument("--no-term1", action="store_true",
                    help="force stage I2 to continue until interval overlap")
    sp.add_argument("--n2", type=int, default=None)
    sp.add_argument("--n3", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--lam", type=float, default=None)
    sp.add_argument("--title", default="")
    sp.add_argument("--units", default="X")
    sp.add_argument("-o", "--out", default="session.json",
                    help="session log file to write")
    sp.add_argument("--export", default="gonogo.txt",
                    help="run-table text file to write")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="quantal",
                                 description="sequential go/no-go sensitivity testing")
    sub = ap.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="interactive console test")
    _add_test_args(run)

    batch = sub.add_parser("batch", help="replay a test from a response vector")
    _add_test_args(batch)
    batch.add_argument("--Y", required=True, help="responses (file or comma list)")
    batch.add_argument("--X", help="stress override prefix (file or comma list)")

    sim = sub.add_parser("sim", help="simulate a test from a latent distribution")
    _add_test_args(sim)
    sim.add_argument("--dm", type=float, default=0.0)
    sim.add_argument("--ds", type=float, default=0.0)
    sim.add_argument("--iseed", type=int, default=-1)
    sim.add_argument("--M", type=float, default=1.0)
    sim.add_argument("--no-llgo", action="store_true")
    sim.add_argument("--sweep", type=int, default=0, help="number of sweep trials")
    sim.add_argument("--seed0", type=int, default=1)

    lims = sub.add_parser("lims", help="confidence table for a saved session")
    lims.add_argument("session")
    lims.add_argument("--method", default="FM", choices=["FM", "LR", "GLM"])
    lims.add_argument("--conf", type=float, required=True)
    lims.add_argument("--P", help="probabilities (comma list, or al15/al49)")
    lims.add_argument("--Q", help="quantiles (comma list)")

    plot = sub.add_parser("plot", help="render a plot of a saved session to SVG")
    plot.add_argument("session")
    plot.add_argument("--kind", type=int, required=True, choices=range(1, 9))
    plot.add_argument("--conf", type=float)
    plot.add_argument("--jconf", type=float,
                      help="joint-region confidence (alternative to --conf)")
    plot.add_argument("--J", type=int)
    plot.add_argument("--p", type=float)
    plot.add_argument("--q", type=float)
    plot.add_argument("--confs", help="comma list for the joint plots")
    plot.add_argument("-o", "--out", default="plot.svg")

    fix = sub.add_parser("fix", help="drop the last k console reads of a session")
    fix.add_argument("session")
    fix.add_argument("k", type=int)
    fix.add_argument("-o", "--out", help="output file (defaults to in place)")

    resume = sub.add_parser("resume", help="continue a suspended console session")
    resume.add_argument("session")
    resume.add_argument("--export", default="gonogo.txt")

    export = sub.add_parser("export", help="write the run table of a saved session")
    export.add_argument("session")
    export.add_argument("-o", "--out", default="gonogo.txt")

    serve = sub.add_parser("serve", help="local JSON service + operator console")
    serve.add_argument("--port", type=int, default=8717)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--sessions-dir", default="./quantal-sessions")

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except SuspendedError as e:
        print(f"Test Suspended ({e.reason})")
        return EXIT_SUSPENDED_USER
    except (ValueError, confidence.ConfidenceUnavailable) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_ARGS


def _dispatch(args) -> int:
    if args.cmd == "run":
        return _cmd_run(args)
    if args.cmd == "batch":
        return _cmd_batch(args)
    if args.cmd == "sim":
        return _cmd_sim(args)
    if args.cmd == "lims":
        return _cmd_lims(args)
    if args.cmd == "plot":
        return _cmd_plot(args)
    if args.cmd == "fix":
        return _cmd_fix(args)
    if args.cmd == "resume":
        return _cmd_resume(args)
    if args.cmd == "export":
        return _cmd_export(args)
    if args.cmd == "serve":
        from .service import serve_forever
        serve_forever(args.host, args.port, args.sessions_dir)
        return EXIT_OK
    raise ValueError(f"unknown command {args.cmd}")


def _finalize(session, args):
    session.save(args.out)
    Path(args.export).write_text(session.export_text())
    print(f"session saved to {args.out}; run table in {args.export}")
    if session.suspended:
        return EXIT_SUSPENDED_DEGENERATE
    return EXIT_OK


def _cmd_run(args) -> int:
    s = TestSession(_session_config(args))
    return _console_loop(s, args)


def _console_loop(s, args) -> int:
    notices_seen = 0
    try:
        while not s.finished:
            for n in s.notices[notices_seen:]:
                print(n)
            notices_seen = len(s.notices)
            kind = s.prompt
            if kind is PromptKind.TITLE:
                s.submit("title", input("Enter title (without quotes): "))
            elif kind is PromptKind.UNITS:
                s.submit("units", input("Enter units (without quotes): "))
            elif kind is PromptKind.BL:
                raw = input("Enter BL (nRev and two I's (one 0 is OK)): ").split()
                s.submit("bl", *[int(v) for v in raw])
            elif kind is PromptKind.TRIAL:
                _, rx, _ = s.recommended()
                n = len(s.trials.live_rows()) + 1
                raw = input(f"{n}. Test at X ~ {fmt(rx)}. Enter X & R: ").split()
                if len(raw) != 2:
                    raise SuspendedError("invalid response")
                x = float(raw[0])
                y = int(raw[1]) if raw[1] in ("0", "1") else -1
                s.submit("sr", x, y)
            elif kind is PromptKind.N2:
                s.submit("n2", int(input("Enter Phase II (D-Optimal) size n2: ")))
            elif kind is PromptKind.N3:
                s.submit("n3", int(input("Enter Phase III (S-RMJ) size n3: ")))
            elif kind is PromptKind.PLAM:
                raw = input("Enter p lam: ").split()
                s.submit("plam", float(raw[0]), float(raw[1]))
    except SuspendedError as e:
        for n in s.notices[notices_seen:]:
            print(n)
        print("Test Suspended")
        s.suspended = e.reason
        s.save(args.out)
        Path(args.export).write_text(s.export_text())
        return EXIT_SUSPENDED_USER
    except (EOFError, KeyboardInterrupt):
        print("\nTest Suspended")
        s.save(args.out)
        return EXIT_SUSPENDED_USER
    for n in s.notices[notices_seen:]:
        print(n)
    return _finalize(s, args)


def _cmd_batch(args) -> int:
    Y = [int(v) for v in _parse_numbers(args.Y)]
    X = _parse_numbers(args.X) if args.X else None
    s = run_batch(_session_config(args), Y, X=X, n2=args.n2, n3=args.n3,
                  p=args.p, lam=args.lam, title=args.title, units=args.units)
    for n in s.notices:
        print(n)
    if s.meta.get("surplus_y"):
        print(f"note: {s.meta['surplus_y']} responses were not consumed")
    return _finalize(s, args)


def _cmd_sim(args) -> int:
    cfg = simulate.SimConfig(
        args.mlo, args.mhi, args.sg, n2=args.n2 or 0, n3=args.n3 or 0,
        p=args.p or 0.0, lam=args.lam or 0.0, dm=args.dm, ds=args.ds,
        reso=args.reso, log_scale=args.ln, iseed=args.iseed,
        llgo=not args.no_llgo, M=args.M, procedure=Procedure(args.test),
        bl=tuple(int(v) for v in args.BL.split(",")) if args.BL else (4, 1, 0),
    )
    if args.sweep:
        result = simulate.sweep(cfg, args.sweep, args.seed0)
        out = Path(args.out).with_suffix(".csv")
        out.write_text(simulate.sweep_to_text(result))
        print(json.dumps(result.summary(), indent=2))
        print(f"sweep rows in {out}")
        return EXIT_OK
    s = simulate.simulate_test(cfg, title=args.title, units=args.units)
    for n in s.notices:
        print(n)
    return _finalize(s, args)


def _grid(text):
    if text is None:
        return []
    if text.strip().lower() == "al15":
        return list(confidence.AL15)
    if text.strip().lower() == "al49":
        return list(confidence.AL49)
    return _parse_numbers(text)


def _cmd_lims(args) -> int:
    s = TestSession.load(args.session)
    rows = confidence.lims(args.method, s.trials, args.conf,
                           P=_grid(args.P), Q=_grid(args.Q))
    print("q_l, q, q_u, p_l, p, p_u")
    for r in rows:
        print(", ".join(f"{v:.6f}" for v in r.astuple()))
    return EXIT_OK


def _cmd_plot(args) -> int:
    s = TestSession.load(args.session)
    confs = [float(v) for v in args.confs.split(",")] if args.confs else None
    ps = plotdata.series(s, args.kind, conf=args.conf, J=args.J, p=args.p,
                         q=args.q, conf_list=confs, jconf=args.jconf)
    Path(args.out).write_bytes(plotdata.render_svg(ps))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_fix(args) -> int:
    s = TestSession.load(args.session)
    s2 = s.fixw(args.k)
    out = args.out or args.session
    s2.save(out)
    print(f"dropped last {args.k} reads; {len(s2.trials.live_rows())} runs remain; saved {out}")
    return EXIT_OK


def _cmd_resume(args) -> int:
    s = TestSession.load(args.session)
    if s.finished:
        print("session already complete")
        return EXIT_OK

    class A:
        out = args.session
        export = args.export
    return _console_loop(s, A)


def _cmd_export(args) -> int:
    s = TestSession.load(args.session)
    Path(args.out).write_text(s.export_text())
    print(f"wrote {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
