"""Command-line client for the computation service.

Every subcommand builds a request, sends it to the service and renders the
JSON response (machine-readable first).  By default the service runs
in-process, so no server is needed; point --server at a running instance to
use a remote one.  Exit codes: 0 success, 1 a verification failed, 2 bad
usage or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys


class CliError(Exception):
    pass


def make_client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def read_path_csv(filename):
    """Rows (t, x1..xd) with line-numbered diagnostics."""
    rows = []
    width = None
    with open(filename, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if lineno == 1 and not _is_number(row[0]):
                continue  # header
            try:
                values = [float(x) for x in row]
            except ValueError as exc:
                raise CliError(f"{filename}:{lineno}: {exc}") from None
            if len(values) < 2:
                raise CliError(
                    f"{filename}:{lineno}: need a time and at least one "
                    f"coordinate, got {len(values)} columns")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise CliError(
                    f"{filename}:{lineno}: expected {width} columns, "
                    f"got {len(values)}")
            rows.append(values)
    if len(rows) < 2:
        raise CliError(f"{filename}: a path needs at least two breakpoints")
    return rows


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def load_json(filename):
    try:
        with open(filename) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{filename}:{exc.lineno}: {exc.msg}") from None
    except OSError as exc:
        raise CliError(str(exc)) from None


def emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def post(client, route, payload):
    resp = client.post(route, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise CliError(f"{route} rejected the request: {detail}")
    return resp.json()


def cmd_enumerate(args, client):
    payload = {"gamma": args.gamma, "alpha": args.alpha, "beta": args.beta,
               "d": args.d}
    data = post(client, "/enumerate", payload)
    emit(data, args.out)
    return 0


def cmd_hopf_verify(args, client):
    payload = {"max_nodes": args.max_nodes, "d": args.d, "seed": args.seed,
               "samples": args.samples, "tamper": args.tamper}
    data = post(client, "/hopf/verify", payload)
    emit(data, args.out)
    for item in data["identities"]:
        status = "pass" if item["ok"] else "FAIL"
        print(f"[{status}] {item['name']}"
              + (f" (worst {item['worst']:.3e})" if item["worst"] is not None
                 else ""), file=sys.stderr)
    return 0 if data["passed"] else 1


def cmd_lift(args, client):
    forest = load_json(args.forest)
    paths = [read_path_csv(f) for f in args.paths]
    if not paths:
        raise CliError("at least one path (the tagged sample) is required")
    payload = {
        "forest": forest,
        "tagged_path": {"rows": paths[0]},
        "block_paths": [{"rows": p} for p in paths[1:]],
        "s": args.s, "t": args.t, "max_order": args.max_order,
    }
    data = post(client, "/lift", payload)
    emit(data, args.out)
    return 0


def cmd_lln(args, client):
    if args.spec:
        payload = load_json(args.spec)
    else:
        payload = {"distribution": {"kind": "two_atom", "vector": [1.0]}}
    payload.setdefault("seed", args.seed)
    payload.setdefault("grid_level", args.grid_level)
    payload.setdefault("threads", args.threads)
    if args.n_grid:
        payload["n_grid"] = args.n_grid
    if args.samples is not None:
        payload["replications"] = args.samples
    if args.qprime is not None or args.p1 is not None:
        dp = payload.setdefault("dual_pair", {})
        if args.qprime is not None:
            dp["qprime"] = args.qprime
        if args.p1 is not None:
            dp["p1"] = args.p1
    data = post(client, "/lln", payload)
    emit(data, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "mean", "stderr", "identity_mean"])
            for row in data["rows"]:
                writer.writerow([row["n"], row["mean"], row["stderr"],
                                 row["identity_mean"]])
    return 0


def cmd_metric(args, client):
    payload = load_json(args.spec)
    payload.setdefault("seed", args.seed)
    payload.setdefault("grid_level", args.grid_level)
    data = post(client, "/metric", payload)
    emit(data, args.out)
    return 0


def cmd_serve(args, client):
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lionshopf",
        description="coupled Hopf algebra of Lions forests: enumeration, "
                    "verification, lifts, experiments and metrics")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service "
                             "(default: run in-process)")
    parser.add_argument("--out", default=None, help="write the JSON response "
                                                    "to this file")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for Monte-Carlo loops; results "
                             "do not depend on this")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="catalog of forest classes")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--d", type=int, default=1)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("hopf-verify", help="run the identity suite")
    p.add_argument("--max-nodes", type=int, default=4)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--tamper", default=None,
                   help="negative control: corrupt the named identity")
    p.set_defaults(func=cmd_hopf_verify)

    p = sub.add_parser("lift", help="iterated integral of a forest")
    p.add_argument("--forest", required=True, help="forest JSON file")
    p.add_argument("--paths", nargs="+", required=True,
                   help="CSV paths: tagged sample first, then one per "
                        "hyperedge")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--max-order", type=int, default=4)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("lln", help="empirical-to-mean-field convergence table")
    p.add_argument("--spec", default=None, help="experiment spec JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None,
                   help="Monte-Carlo replications per population size")
    p.add_argument("--n-grid", type=int, nargs="+", default=None)
    p.add_argument("--grid-level", type=int, default=2)
    p.add_argument("--qprime", type=float, default=None)
    p.add_argument("--p1", type=float, default=None)
    p.add_argument("--csv", default=None, help="also write the table as CSV")
    p.set_defaults(func=cmd_lln)

    p = sub.add_parser("metric", help="coupling metric between atom families")
    p.add_argument("--spec", required=True, help="metric request JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-level", type=int, default=5)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return cmd_serve(args, None)
        with make_client(args.server) as client:
            return args.func(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
