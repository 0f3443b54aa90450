"""Command-line entry point: ``dflow validate|codegen|chat|merge|serve``.

Exit codes are shared by every command: 0 success, 1 a problem with the
model (invalid, conflicting), 2 a problem with the environment (missing
file, occupied port, refused overwrite).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
from pathlib import Path

from .diagnostics import Diagnostic
from .lexer import line_count
from .merger import MergeError, merge
from .printer import print_model
from .validator import ValidationReport, check_source

EXIT_OK, EXIT_DOMAIN, EXIT_ENV = 0, 1, 2
DEFAULT_ADDR = "127.0.0.1:8000"
DEFAULT_DB = "dflow.db"


class EnvError(Exception):
    """Raised for I/O and environment failures (exit code 2)."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise EnvError(f"cannot read {path}: {exc}") from None


def _print_diagnostics(diagnostics: list[Diagnostic], stream) -> None:
    for d in diagnostics:
        print(d.format(), file=stream)


def _load_valid(path: str):
    """Parse and validate *path*; returns (model, report), model None if invalid."""
    model, report = check_source(_read(path), path)
    return (model if report.valid else None), report


# -- commands -------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    model, report = _load_valid(args.path)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        _print_diagnostics(report.diagnostics, sys.stdout)
        errors, warnings = len(report.errors), len(report.diagnostics) - len(report.errors)
        status = "valid" if report.valid else "invalid"
        print(f"{args.path}: {status} ({errors} error(s), {warnings} warning(s))")
    return EXIT_OK if report.valid else EXIT_DOMAIN


def cmd_codegen(args: argparse.Namespace) -> int:
    from .codegen import OverwriteRefused, generate, write_project

    model, report = _load_valid(args.path)
    if model is None:
        _print_diagnostics(report.errors, sys.stderr)
        print(f"{args.path}: invalid model, nothing generated", file=sys.stderr)
        return EXIT_DOMAIN
    project = generate(model)
    try:
        written = write_project(project, args.out, overwrite=args.force)
    except OverwriteRefused as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except OSError as exc:
        raise EnvError(f"cannot write project: {exc}") from None
    counts = project.line_counts()
    width = max(len(p) for p in counts)
    print(f"{'file':<{width}}  LoC")
    for rel, path in zip(project.files, written):
        print(f"{rel:<{width}}  {counts[rel]:>3}")
    print(f"{'total':<{width}}  {project.total_lines():>3}")
    print(f"dFlow source: {line_count(_read(args.path))} LoC; {len(written)} files written to {args.out}")
    return EXIT_OK


def _build_session(args: argparse.Namespace, model):
    from .runtime import DialogueSession, HttpEnv, StubTable, UserProfile

    try:
        env = StubTable.load(args.stubs) if args.stubs else HttpEnv(timeout=args.timeout)
        profile = UserProfile.from_dict(json.loads(_read(args.profile))) if args.profile else None
    except (ValueError, KeyError, TypeError) as exc:
        raise EnvError(f"bad stubs or profile file: {exc}") from None
    return DialogueSession(model, env, seed=args.seed, profile=profile)


def cmd_chat(args: argparse.Namespace) -> int:
    model, report = _load_valid(args.path)
    if model is None:
        _print_diagnostics(report.errors, sys.stderr)
        return EXIT_DOMAIN
    session = _build_session(args, model)

    def turn(line: str) -> bool:
        line = line.strip()
        if not line:
            return True
        if line == "/quit":
            return False
        if line == "/reset":
            session.reset()
            print("(session reset)")
            return True
        if args.script:
            print(f"user: {line}")
        for text in session.handle_message(line).texts:
            print(f"bot: {text}")
        return True

    if args.script:
        for line in _read(args.script).splitlines():
            if not turn(line):
                break
        return EXIT_OK
    interactive = sys.stdin.isatty()
    while True:
        try:
            line = input("you> " if interactive else "")
        except EOFError:
            break
        if not turn(line):
            break
    return EXIT_OK


def cmd_merge(args: argparse.Namespace) -> int:
    models = []
    for path in args.paths:
        model, report = _load_valid(path)
        if model is None:
            _print_diagnostics(report.errors, sys.stderr)
            print(f"{path}: invalid model", file=sys.stderr)
            return EXIT_DOMAIN
        models.append(model)
    try:
        merged = merge(models)
    except MergeError as exc:
        for conflict in exc.conflicts:
            print(conflict.to_diagnostic().format(), file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(print_model(merged))
    return EXIT_OK


def parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise EnvError(f"address must look like HOST:PORT, got {addr!r}")
    return host or "127.0.0.1", int(port)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ModelStore, create_app

    host, port = parse_addr(args.addr)
    sock = socket.socket(socket.AF_INET6 if ":" in host else socket.AF_INET, socket.SOCK_STREAM)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        raise EnvError(f"cannot bind {host}:{port}: {exc.strerror or exc}") from None
    try:
        store = ModelStore(args.db)
    except Exception as exc:  # sqlite3 errors vary by cause
        sock.close()
        raise EnvError(f"cannot open store {args.db}: {exc}") from None
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    print(f"serving on http://{host}:{sock.getsockname()[1]} (store: {args.db})", flush=True)
    config = uvicorn.Config(create_app(store), log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run(sockets=[sock])
    finally:
        store.close()
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dflow", description="Toolchain for dFlow dialogue models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model and print diagnostics")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="print the machine-readable report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("codegen", help="generate a Rasa project")
    p.add_argument("path")
    p.add_argument("--out", required=True, help="target directory")
    p.add_argument("--force", action="store_true", help="overwrite existing files")
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("chat", help="talk to the model in the terminal")
    p.add_argument("path")
    p.add_argument("--stubs", help="JSON stub table answering service calls")
    p.add_argument("--seed", type=int, default=0, help="seed for RANDOM_INT/RANDOM_FLOAT")
    p.add_argument("--profile", help="JSON file with user properties")
    p.add_argument("--script", help="replay utterances from a file and print the transcript")
    p.add_argument("--timeout", type=float, default=10.0, help="HTTP timeout in seconds (live mode)")
    p.set_defaults(func=cmd_chat)

    p = sub.add_parser("merge", help="merge several models and print the result")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("serve", help="run the REST service")
    p.add_argument("--addr", default=os.environ.get("DFLOW_ADDR", DEFAULT_ADDR))
    p.add_argument("--db", default=os.environ.get("DFLOW_DB", DEFAULT_DB))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
