"""Command-line front-end.

The CLI is a thin client of the HTTP service: every subcommand builds a
request payload, posts it to the service, and turns the response into files
or stdout. By default the service app is driven in-process; ``--server``
points the same requests at a remote instance instead.

Exit codes: 0 on success, 2 on invalid input (single-line JSON error on
stderr), 1 on unexpected failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .fileio import (
    format_float,
    read_mapping,
    read_noise_levels,
    read_vectors,
    write_mapping,
    write_noise_levels,
    write_vectors,
)

_FORMATS = ("csv", "pgm", "json", "all")


class CliError(Exception):
    pass


def _make_client(server: str | None):
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    # In-process mode: drive the ASGI app directly, no socket involved.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # test-client import warns on some builds
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _detail(response: httpx.Response) -> str:
    try:
        body = response.json()
    except ValueError:
        return response.text.strip() or f"HTTP {response.status_code}"
    detail = body.get("detail", body) if isinstance(body, dict) else body
    if isinstance(detail, str):
        return detail
    if isinstance(detail, list):
        parts = []
        for item in detail:
            loc = ".".join(str(x) for x in item.get("loc", []) if x != "body")
            msg = item.get("msg", "invalid")
            parts.append(f"{loc}: {msg}" if loc else msg)
        return "; ".join(parts)
    return str(detail)


def _post(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        raise CliError(_detail(response))
    return response.json()


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_match(args, client) -> int:
    if args.method == "lsns" and (args.query_noise is None or args.reference_noise is None):
        raise CliError("method lsns requires both --query-noise and --reference-noise files")
    payload = {
        "x": read_vectors(args.query).tolist(),
        "x_sharp": read_vectors(args.reference).tolist(),
        "method": args.method,
    }
    if args.query_noise:
        payload["sigma"] = read_noise_levels(args.query_noise).tolist()
    if args.reference_noise:
        payload["sigma_sharp"] = read_noise_levels(args.reference_noise).tolist()
    body = _post(client, "/match", payload)
    assignment = [j - 1 for j in body["assignment"]]
    write_mapping(args.out, assignment)
    print(format_float(body["objective"]))
    return 0


def cmd_generate(args, client) -> int:
    if args.spec == "exp2" and (args.a is None or args.b is None):
        raise CliError("spec exp2 requires both --a and --b")
    if args.spec != "counterexample" and args.m is None:
        raise CliError(f"spec {args.spec} requires -m")
    payload = {
        "spec": args.spec,
        "n": args.n,
        "d": args.d,
        "m": args.m,
        "a": args.a,
        "b": args.b,
        "seed": args.seed,
    }
    body = _post(client, "/generate", payload)
    params, dataset = body["params"], body["dataset"]
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_vectors(f"{prefix}_x.csv", dataset["x"])
    write_vectors(f"{prefix}_xsharp.csv", dataset["x_sharp"])
    write_noise_levels(f"{prefix}_sigma.csv", dataset["sigma"])
    write_noise_levels(f"{prefix}_sigma_sharp.csv", dataset["sigma_sharp"])
    write_mapping(f"{prefix}_pi_star.csv", [j - 1 for j in params["pi_star"]])
    Path(f"{prefix}_params.json").write_text(json.dumps(params, indent=2) + "\n")
    print(f"{prefix}_params.json")
    return 0


def cmd_separation(args, client) -> int:
    try:
        params = json.loads(Path(args.params).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"params file is not valid JSON: {exc}") from None
    body = _post(client, "/separation", {"params": params, "alpha": args.alpha})
    _emit(body, args.out)
    return 0


def cmd_evaluate(args, client) -> int:
    assignment = read_mapping(args.mapping)
    truth = read_mapping(args.truth)
    body = _post(
        client,
        "/evaluate",
        {
            "assignment": [int(j) + 1 for j in assignment],
            "truth": [int(j) + 1 for j in truth],
        },
    )
    _emit(body, args.out)
    return 0


def cmd_experiment(args, client) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"config file is not valid JSON: {exc}") from None
    body = _post(client, "/experiment", config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    want = {"csv", "pgm", "json"} if args.format == "all" else {args.format}
    written = []
    if body.get("report") is not None and "json" in want:
        path = out_dir / "report.json"
        path.write_text(json.dumps(body["report"], indent=2) + "\n")
        written.append(path)
    if body.get("heatmap") is not None:
        from .harness import heatmap_to_csv, heatmap_to_pgm
        from .service.schemas import HeatmapModel

        heatmap = HeatmapModel(**body["heatmap"]).to_heatmap()
        if "json" in want:
            path = out_dir / "heatmap.json"
            path.write_text(json.dumps(body["heatmap"], indent=2) + "\n")
            written.append(path)
        for method in sorted(heatmap.cells):
            if "csv" in want:
                path = out_dir / f"heatmap_{method}.csv"
                path.write_text(heatmap_to_csv(heatmap, method))
                written.append(path)
            if "pgm" in want:
                path = out_dir / f"heatmap_{method}.pgm"
                path.write_bytes(heatmap_to_pgm(heatmap, method))
                written.append(path)
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS so a subcommand's default never clobbers a top-level --server
    common.add_argument(
        "--server",
        default=argparse.SUPPRESS,
        help="base URL of a running matchmap service; default runs in-process",
    )

    parser = argparse.ArgumentParser(
        prog="matchmap",
        description="Match noisy vector sets, report separation thresholds, "
        "and reproduce detection-region experiments.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", parents=[common], help="estimate a matching map from CSV vector files")
    p.add_argument("query", help="CSV of query vectors, one per line")
    p.add_argument("reference", help="CSV of reference vectors, one per line")
    p.add_argument("--method", required=True, choices=("greedy", "lss", "lsns", "lsl"))
    p.add_argument("--out", required=True, help="output mapping CSV (1-based i,j lines)")
    p.add_argument("--query-noise", help="CSV of per-query noise levels (lsns)")
    p.add_argument("--reference-noise", help="CSV of per-reference noise levels (lsns)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("generate", parents=[common], help="generate a synthetic instance and dataset")
    p.add_argument("--spec", required=True, choices=("exp1", "exp2", "counterexample"))
    p.add_argument("-n", type=int, required=True, help="number of query vectors")
    p.add_argument("-m", type=int, help="number of reference vectors (not for counterexample)")
    p.add_argument("-d", type=int, required=True, help="vector dimension")
    p.add_argument("--a", type=float, help="inlier spacing (exp2)")
    p.add_argument("--b", type=float, help="outlier spacing (exp2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("separation", parents=[common], help="separation distances and thresholds of an instance")
    p.add_argument("--params", required=True, help="instance params JSON (from generate)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("evaluate", parents=[common], help="Hamming loss of a mapping against ground truth")
    p.add_argument("mapping", help="estimated mapping CSV")
    p.add_argument("truth", help="true mapping CSV")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", parents=[common], help="run a Monte-Carlo trial or heatmap sweep")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("out_dir", help="directory for report/heatmap outputs")
    p.add_argument("--format", choices=_FORMATS, default="all")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _make_client(getattr(args, "server", None)) as client:
            return args.func(args, client)
    except (CliError, ValueError, OSError, httpx.HTTPError) as exc:
        print(json.dumps({"error": str(exc) or type(exc).__name__}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
