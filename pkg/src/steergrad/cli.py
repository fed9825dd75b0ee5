"""Command line interface.

train    headless run with an optional scripted annotation file
compare  control (lambda = 0) vs annotated runs over a block of seeds
serve    the HTTP service plus the optional web UI bundle
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import socket
import sys
from datetime import datetime, timezone
from pathlib import Path

from steergrad.data import DatasetSpec, evaluate_grid
from steergrad.errors import InputError, SteergradError
from steergrad.losses import LossConfig
from steergrad.model import ModelConfig, params_to_text
from steergrad.serialize import canonical, grid_to_payload, metrics_to_payload, script_from_payload
from steergrad.session import AddAnnotation, Phase, SessionConfig, Start, replay
from steergrad.store import record_from_state, record_to_payload

METRICS_FILE = "metrics.json"
PARAMS_FILE = "params.txt"
GRID_FILE = "grid.json"
RECORD_FILE = "record.json"
COMPARISON_FILE = "comparison.json"


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--shape", choices=("blobs", "moons", "circles"), default="blobs")
    parser.add_argument("--n-train", type=int, default=9, help="training points (default 9)")
    parser.add_argument("--n-test", type=int, default=200, help="test points (default 200)")
    parser.add_argument(
        "--noise", type=float, default=None, help="jitter scale (default: per-shape)"
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for data and init (default 0)")
    parser.add_argument(
        "--hidden", default="16,16", help="hidden layer widths, comma separated (default 16,16)"
    )
    parser.add_argument("--epochs", type=int, default=2000, help="epochs to train (default 2000)")
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=1.0,
        help="direction loss weight (default 1.0; 0 disables it)",
    )
    parser.add_argument(
        "--steepness", type=float, default=20.0, help="sign approximation steepness (default 20)"
    )
    parser.add_argument(
        "--annotations", default=None, help="annotation script file (steergrad/annotation-script)"
    )


def _session_config(args, lam: float, seed: int) -> SessionConfig:
    hidden = tuple(int(w) for w in str(args.hidden).split(",") if w.strip())
    return SessionConfig(
        dataset=DatasetSpec(
            shape=args.shape,
            n_train=args.n_train,
            n_test=args.n_test,
            noise=args.noise,
            seed=seed,
        ),
        model=ModelConfig(hidden_layers=hidden, seed=seed),
        loss=LossConfig(steepness=args.steepness, lam=lam),
        max_epochs=args.epochs,
    )


def _load_script(path: str) -> list[tuple[int, int, tuple[float, float]]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return script_from_payload(payload)


def _script_commands(steps):
    return [(epoch, AddAnnotation(example_index=index, direction=d)) for epoch, index, d in steps]


def _deterministic_created_at() -> str:
    # honors SOURCE_DATE_EPOCH so identical flags give identical bytes
    stamp = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(stamp, tz=timezone.utc).isoformat()


def _run_scripted(config: SessionConfig, steps):
    commands = _script_commands([s for s in steps if s[0] == 0])
    commands.append((0, Start()))
    commands.extend(_script_commands([s for s in steps if s[0] > 0]))
    return replay(config, commands)


def cmd_train(args) -> int:
    steps = _load_script(args.annotations) if args.annotations else []
    config = _session_config(args, lam=args.lam, seed=args.seed)
    state = _run_scripted(config, steps)
    if state.phase is Phase.FAULTED:
        print(f"training faulted: {state.fault}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / METRICS_FILE).write_text(canonical(metrics_to_payload(state.history)))
    (out / PARAMS_FILE).write_text(params_to_text(state.params))
    grid = evaluate_grid(state.params, state.dataset)
    (out / GRID_FILE).write_text(canonical(grid_to_payload(grid)))
    record = record_from_state(state, args.name, created_at=_deterministic_created_at())
    (out / RECORD_FILE).write_text(canonical(record_to_payload(record)))
    last = state.history[-1]
    print(
        f"{state.phase.value} after {state.epoch} epochs: "
        f"train accuracy {last.train_accuracy:.4f}, test accuracy {last.test_accuracy:.4f}"
    )
    return 0


def cmd_compare(args) -> int:
    if args.n_seeds < 1:
        print("--n-seeds must be >= 1", file=sys.stderr)
        return 2
    steps = _load_script(args.annotations) if args.annotations else []
    rows = []
    for offset in range(args.n_seeds):
        seed = args.seed + offset
        control = replay(_session_config(args, lam=0.0, seed=seed), [(0, Start())])
        annotated = _run_scripted(_session_config(args, lam=args.lam, seed=seed), steps)
        for name, state in (("control", control), ("annotated", annotated)):
            if state.phase is Phase.FAULTED:
                print(f"seed {seed} {name} run faulted: {state.fault}", file=sys.stderr)
                return 1
        rows.append(
            {
                "seed": seed,
                "control_accuracy": control.history[-1].test_accuracy,
                "annotated_accuracy": annotated.history[-1].test_accuracy,
            }
        )
    control_mean = sum(r["control_accuracy"] for r in rows) / len(rows)
    annotated_mean = sum(r["annotated_accuracy"] for r in rows) / len(rows)
    print(f"{'seed':>6}  {'control':>9}  {'annotated':>9}")
    for r in rows:
        print(f"{r['seed']:>6}  {r['control_accuracy']:>9.4f}  {r['annotated_accuracy']:>9.4f}")
    print(f"{'mean':>6}  {control_mean:>9.4f}  {annotated_mean:>9.4f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        payload = {
            "format": "steergrad/comparison",
            "version": 1,
            "n_seeds": args.n_seeds,
            "rows": rows,
            "control_mean": control_mean,
            "annotated_mean": annotated_mean,
        }
        (out / COMPARISON_FILE).write_text(canonical(payload))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from steergrad.service import create_app

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc.strerror}", file=sys.stderr)
        return 1
    host, port = sock.getsockname()[:2]
    print(f"listening on http://{host}:{port}", flush=True)
    app = create_app(args.store_dir, args.ui_dir)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    try:
        server.run(sockets=[sock])
    except KeyboardInterrupt:
        pass  # uvicorn re-raises the signal after its graceful shutdown
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="steergrad",
        description="train 2-D classifiers steered by counterfactual direction annotations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="headless training run")
    _add_run_flags(p_train)
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.add_argument("--name", default="train", help="experiment record name")
    p_train.set_defaults(func=cmd_train)

    p_compare = sub.add_parser("compare", help="control vs annotated comparison over seeds")
    _add_run_flags(p_compare)
    p_compare.add_argument("--n-seeds", type=int, default=20, help="seeds to run (default 20)")
    p_compare.add_argument("--out", default=None, help="directory for comparison.json")
    p_compare.set_defaults(func=cmd_compare)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default=os.environ.get("STEERGRAD_HOST", "127.0.0.1"))
    p_serve.add_argument(
        "--port", type=int, default=int(os.environ.get("STEERGRAD_PORT", "8414"))
    )
    p_serve.add_argument(
        "--ui-dir",
        default=os.environ.get("STEERGRAD_UI_DIR"),
        help="directory with the built UI bundle (API only if missing)",
    )
    p_serve.add_argument(
        "--store-dir",
        default=os.environ.get("STEERGRAD_STORE_DIR", "experiments"),
        help="experiment store directory (default ./experiments)",
    )
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except SteergradError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
