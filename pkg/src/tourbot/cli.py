"""Command line entry points: serve, seed, run-tour, export, import, stats.

Exit codes: 0 success, 1 domain error (unknown tour, bad file, busy port),
2 usage error (argparse).
"""

from __future__ import annotations

import argparse
import logging
import random
import socket
import sys
import threading
import time
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Optional

from . import analytics
from .config import AppConfig, load_config
from .errors import TourbotError
from .model import Pose2D, SimClock, TourRun, new_id
from .store import TourStore, canonical_json, load_store, loads_store, save_store
from .world import World

log = logging.getLogger("tourbot")

SEED_RANDOM = 20260814  # fixed so repeated seeds produce comparable shapes


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--store", metavar="PATH", help="tour file path (default ./data/store.json)")
    common.add_argument("--config", metavar="PATH", help="JSON config file")

    parser = argparse.ArgumentParser(prog="tourbot", description="Tour-guide robot platform.")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", parents=[common], help="run bridge + HTTP gateway + simulator")
    serve.add_argument("--host", help="bind address")
    serve.add_argument("--http-port", type=int, help="gateway port (default 8080)")
    serve.add_argument("--bridge-port", type=int, help="bridge port (default 9090)")
    serve.add_argument("--static", metavar="DIR", help="built console to serve at /")
    serve.add_argument("--time-scale", type=float, help="simulated seconds per wall second")

    seed = sub.add_parser("seed", parents=[common], help="write a demo store")
    seed.add_argument("--force", action="store_true", help="overwrite an existing store")

    run = sub.add_parser("run-tour", parents=[common], help="execute one tour headless")
    run.add_argument("name", help="tour name (case-insensitive)")
    run.add_argument(
        "--max-sim-seconds", type=float, default=10_000.0, help="simulated-time safety cap"
    )

    export = sub.add_parser("export", parents=[common], help="write the store as a tour file")
    export.add_argument("file", help="output path, or - for stdout")

    imp = sub.add_parser("import", parents=[common], help="validate a tour file and adopt it")
    imp.add_argument("file", help="tour file to import")

    stats = sub.add_parser("stats", parents=[common], help="print usage statistics")
    stats.add_argument("--months", type=int, default=analytics.DEFAULT_WINDOW_MONTHS)

    return parser


def _config_for(args) -> AppConfig:
    cfg = load_config(args.config)
    changes = {}
    if args.store:
        changes["store_path"] = args.store
    for attr, key in (
        ("host", "host"),
        ("http_port", "http_port"),
        ("bridge_port", "bridge_port"),
        ("static", "static_dir"),
        ("time_scale", "time_scale"),
    ):
        if getattr(args, attr, None) is not None:
            changes[key] = getattr(args, attr)
    if changes:
        from dataclasses import replace

        cfg = replace(cfg, **changes)
    return cfg


# -- seed fixture -------------------------------------------------------------


def _month_start(now: datetime, months_back: int) -> datetime:
    index = now.year * 12 + (now.month - 1) - months_back
    return datetime(index // 12, index % 12 + 1, 1, tzinfo=timezone.utc)


def build_demo_store(now: Optional[datetime] = None) -> TourStore:
    """A populated store: named demo locations/tours plus 7 months of runs."""
    now = now or datetime.now(timezone.utc)
    rng = random.Random(SEED_RANDOM)
    store = TourStore()

    def loc(name, x, y, theta, description):
        return store.add_location(name, Pose2D(x, y, theta), description)

    entrance = loc("entrance", 0.0, 0.0, 0.0, "Welcome to the exhibit hall. Tours start here.")
    occulus = loc(
        "occulus",
        1.0,
        2.0,
        0.5,
        "The occulus viewing dome gives a full view of the main enclosure.",
    )
    penguins = loc(
        "penguin pool", 3.5, 1.0, 1.2, "Our penguin colony is fed twice a day at this pool."
    )
    reptiles = loc(
        "reptile house", 2.0, 4.0, -0.8, "The reptile house keeps a constant tropical climate."
    )
    aviary = loc("aviary", 4.5, 3.0, 2.4, "The walk-through aviary hosts forty bird species.")

    zoo = store.create_tour(
        "Zoo",
        "exhibition",
        [entrance.id, penguins.id, reptiles.id, occulus.id],
        expected_duration=15,
    )
    safari = store.create_tour(
        "Night Safari", "exhibition", [aviary.id, reptiles.id, penguins.id], expected_duration=20
    )
    lab = store.create_tour("Lab Circuit", "lab", [occulus.id, entrance.id], expected_duration=10)
    peek = store.create_tour("Quick Peek", "demo", [entrance.id], expected_duration=5)

    # Synthetic history: seven calendar months, oldest month outside the
    # default six-month window; Zoo is deliberately the most-run tour.
    per_month = (6, 7, 5, 4, 6, 3, 3)
    weights = [(zoo, 5), (safari, 3), (lab, 2), (peek, 1)]
    pool = [tour for tour, weight in weights for _ in range(weight)]
    for months_back, count in enumerate(per_month):
        start = _month_start(now, months_back)
        for i in range(count):
            tour = pool[rng.randrange(len(pool))]
            if months_back == 0:
                # current month: history must not postdate "now"
                span = max(0.0, (now - start).total_seconds())
                began = (start + timedelta(seconds=rng.uniform(0, span))).replace(microsecond=0)
            else:
                began = start + timedelta(days=rng.randrange(26), hours=9 + i, minutes=rng.randrange(50))
            duration = rng.randrange(240, 1500)
            roll = rng.random()
            outcome = "completed" if roll < 0.8 else ("aborted" if roll < 0.93 else "failed")
            visited = len(tour.stops) if outcome == "completed" else rng.randrange(len(tour.stops))
            store.append_run(
                TourRun(
                    run_id=new_id(),
                    tour_id=tour.id,
                    started_at=began,
                    ended_at=began + timedelta(seconds=duration),
                    outcome=outcome,
                    stops_visited=visited,
                )
            )
    return store


# -- subcommands -----------------------------------------------------------


def do_seed(args) -> int:
    cfg = _config_for(args)
    path = Path(cfg.store_path)
    if path.exists() and not args.force:
        raise TourbotError(f"store already exists at {path} (use --force to overwrite)")
    store = build_demo_store()
    save_store(store, path)
    print(
        f"seeded {path}: {len(store.locations)} locations, "
        f"{len(store.tours)} tours, {len(store.runs)} runs"
    )
    return 0


def do_run_tour(args) -> int:
    cfg = _config_for(args)
    if not Path(cfg.store_path).exists():
        raise TourbotError(f"no store at {cfg.store_path} (run 'tourbot seed' first)")
    clock = SimClock()
    store = load_store(cfg.store_path, clock=clock)
    tour = store.find_tour_by_name(args.name)

    world = World(cfg=cfg, clock=clock, store=store, autosave=True)
    world.executor.on_event = lambda name, index: print(
        f"t={world.sim.time_s:8.1f}s  {name}({index})"
    )
    print(f"executing {tour.name!r}: {len(tour.stops)} stops")
    world.executor.execute(tour.id)
    world.run_until_idle(max_sim_seconds=args.max_sim_seconds)
    if world.executor.is_running():
        world.executor.abort()
        world.autosave_if_due()
    run = world.executor.last_run
    print(f"outcome={run.outcome}")
    return 0 if run.outcome == "completed" else 1


def do_export(args) -> int:
    cfg = _config_for(args)
    store = load_store(cfg.store_path)
    text = canonical_json(store)
    if args.file == "-":
        sys.stdout.write(text)
    else:
        out = Path(args.file)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        print(f"exported {len(store.tours)} tours to {out}")
    return 0


def do_import(args) -> int:
    cfg = _config_for(args)
    source = Path(args.file)
    if not source.exists():
        raise TourbotError(f"no such file: {source}")
    store = loads_store(source.read_text(encoding="utf-8"))  # validate fully first
    save_store(store, cfg.store_path)
    print(
        f"imported {len(store.locations)} locations, {len(store.tours)} tours, "
        f"{len(store.runs)} runs into {cfg.store_path}"
    )
    return 0


def do_stats(args) -> int:
    cfg = _config_for(args)
    store = load_store(cfg.store_path)
    now = datetime.now(timezone.utc)
    monthly = analytics.monthly_counts(store.runs_snapshot(), now, args.months)
    types = analytics.type_distribution(store.runs_snapshot(), store.list_tours(), now, args.months)

    print(f"runs per month (last {args.months} months)")
    width = max(len("month"), *(len(m) for m, _ in monthly.months))
    print(f"  {'month':<{width}}  runs")
    for month, count in monthly.months:
        print(f"  {month:<{width}}  {count:4d}")
    print(f"  {'total':<{width}}  {monthly.total:4d}")

    print()
    print(f"runs by tour type (last {args.months} months)")
    rows = sorted(types.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    width = max(len("type"), *(len(t) for t, _ in rows)) if rows else len("type")
    print(f"  {'type':<{width}}  runs")
    for tour_type, count in rows:
        print(f"  {tour_type:<{width}}  {count:4d}")
    print(f"  {'total':<{width}}  {types.total:4d}")
    return 0


def _check_port_free(host: str, port: int) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            probe.bind((host, port))
        except OSError as exc:
            raise TourbotError(f"cannot bind {host}:{port}: {exc}") from exc


def do_serve(args) -> int:
    import uvicorn

    from .gateway import create_app, create_bridge_app
    from .world import world_from_store_path

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    cfg = _config_for(args)
    _check_port_free(cfg.host, cfg.http_port)
    _check_port_free(cfg.host, cfg.bridge_port)

    world = world_from_store_path(cfg, autosave=True)
    world.save()  # fail fast on an unwritable store path

    http_server = uvicorn.Server(
        uvicorn.Config(create_app(world), host=cfg.host, port=cfg.http_port, log_level="warning")
    )
    bridge_server = uvicorn.Server(
        uvicorn.Config(
            create_bridge_app(world), host=cfg.host, port=cfg.bridge_port, log_level="warning"
        )
    )
    threads = [
        threading.Thread(target=server.run, daemon=True, name=name)
        for server, name in ((http_server, "tourbot-http"), (bridge_server, "tourbot-bridge"))
    ]
    for thread in threads:
        thread.start()
    world.start_ticking()
    log.info("HTTP gateway on http://%s:%d", cfg.host, cfg.http_port)
    log.info("bridge on ws://%s:%d/bridge", cfg.host, cfg.bridge_port)
    log.info("store at %s", cfg.store_path)
    try:
        while all(thread.is_alive() for thread in threads):
            time.sleep(0.25)
        raise TourbotError("a server thread exited unexpectedly")
    except KeyboardInterrupt:
        log.info("shutting down")
        return 0
    finally:
        world.stop_ticking()
        http_server.should_exit = True
        bridge_server.should_exit = True
        world.autosave_if_due()


_COMMANDS = {
    "serve": do_serve,
    "seed": do_seed,
    "run-tour": do_run_tour,
    "export": do_export,
    "import": do_import,
    "stats": do_stats,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TourbotError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
