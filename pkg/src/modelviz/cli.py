"""Command-line front end: check, solve, viz, sim, serve.

All output is byte-deterministic: no timestamps, canonical JSON, models in
canonical order.  Exit codes: 0 success, 1 user error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .apps import SimConfig, sim_init, sim_step, visualise_model, visualise_structure
from .clicks import clicks_structure
from .core import Structure, is_two_valued, merge
from .drawing import serialize
from .errors import InputError, ModelVizError, SearchBudgetExceeded
from .parser import parse_program
from .printer import structure_text
from .solve import DEFAULT_NODE_BUDGET, modelexpand, onemodel
from .syntax import Program, Theory


def _load(path: str) -> Program:
    text = Path(path).read_text(encoding="utf-8")
    return parse_program(text)


def _pick(table: dict, name: str, kind: str):
    if name not in table:
        raise InputError(f"no {kind} named {name}")
    return table[name]


def cmd_check(args) -> int:
    _load(args.file)
    return 0


def cmd_solve(args) -> int:
    program = _load(args.file)
    theory = _pick(program.theories, args.theory, "theory")
    structure = _pick(program.structures, args.structure, "structure")
    found = modelexpand(theory, structure, nbmodels=args.nbmodels,
                        node_budget=args.node_budget)
    out = []
    for m in found.models:
        out.append(structure_text(m))
    if not found.models:
        out.append("no models")
    elif not found.exhausted:
        out.append(f"(stopped after {len(found.models)} models)")
    print("\n".join(out))
    return 0


def _emit(text: str, target) -> None:
    if target in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        Path(target).write_text(text + "\n", encoding="utf-8")


def cmd_viz(args) -> int:
    program = _load(args.file)
    structure = _pick(program.structures, args.structure, "structure")
    if args.vis_structure:
        s_out = _pick(program.structures, args.vis_structure, "structure")
        vis_theory_name = args.vis_theory or args.theory
        if vis_theory_name is None:
            raise InputError("--vis-structure needs --vis-theory or --theory")
        t_vis = _pick(program.theories, vis_theory_name, "theory")
        if args.vis_theory and args.theory:
            base = _pick(program.theories, args.theory, "theory")
            model = onemodel(base, structure, node_budget=args.node_budget)
            if model is None:
                raise InputError(f"{args.theory} has no model over {args.structure}")
        else:
            model = structure
        spec = visualise_model(t_vis, model, s_out, node_budget=args.node_budget)
    elif args.theory:
        theory = _pick(program.theories, args.theory, "theory")
        model = onemodel(theory, structure, node_budget=args.node_budget)
        if model is None:
            raise InputError(f"{args.theory} has no model over {args.structure}")
        spec = visualise_structure(model)
    else:
        if not is_two_valued(structure):
            raise InputError(f"{args.structure} is partial; give a theory to expand it")
        spec = visualise_structure(structure)
    _emit(serialize(spec), args.output)
    return 0


def _read_click_log(value: str) -> list[list[str]]:
    text = value
    if not value.lstrip().startswith("["):
        text = Path(value).read_text(encoding="utf-8")
    log = json.loads(text)
    if not isinstance(log, list) or any(not isinstance(step, list) for step in log):
        raise InputError("a click log is a JSON array of arrays of keys")
    for step in log:
        for key in step:
            if not isinstance(key, str):
                raise InputError("click log keys must be strings")
    return log


def build_sim_config(program: Program) -> SimConfig:
    """Locate the conventional object names for the simulation roles."""
    t_prog = _pick(program.theories, "T", "theory")
    s_init = _pick(program.structures, "S", "structure")
    t_out = _pick(program.theories, "T_out", "theory")
    t_in = _pick(program.theories, "T_in", "theory")
    structures = program.structures
    s_out = structures.get("S_out") or structures.get("S_d3")
    s_in = structures.get("S_in") or structures.get("S_d3")
    if s_out is None or s_in is None:
        raise InputError("no structure named S_out, S_in or S_d3")
    return SimConfig(t_prog=t_prog, s_init=s_init, t_out=t_out, s_out=s_out,
                     t_in=t_in, s_in=s_in)


def cmd_sim(args) -> int:
    program = _load(args.file)
    cfg = build_sim_config(program)
    log = _read_click_log(args.clicks)
    state = sim_init(cfg, node_budget=args.node_budget)
    specs = [state.last_spec]
    for step in log:
        if state.finished:
            break
        time = state.last_spec.frames[-1].time if state.last_spec.frames else 0
        state = sim_step(state, clicks_structure([(time, key) for key in step]),
                         node_budget=args.node_budget)
        if state.finished:
            break
        specs.append(state.last_spec)
    if args.output:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, spec in enumerate(specs):
            (outdir / f"step_{i:03d}.viz.json").write_text(
                serialize(spec) + "\n", encoding="utf-8")
        print(f"{len(specs)} frames written to {outdir}")
    else:
        for spec in specs:
            print(serialize(spec))
    if state.finished:
        print("simulation finished", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    if args.file:
        _load(args.file)  # fail fast on an unparsable demo program
    host, _, port = args.listen.rpartition(":")
    config = ServiceConfig(session_ttl=args.ttl,
                           node_budget=args.node_budget,
                           nbmodels_cap=args.nbmodels_cap,
                           ui_dir=args.ui_dir,
                           program_path=args.file)
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelviz",
        description="Parse logic programs, expand models, simulate linear-time "
                    "theories, and draw the results.")
    parser.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET,
                        help="solver branch-node limit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a program")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="print models of a theory over a structure")
    p.add_argument("file")
    p.add_argument("--theory", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--nbmodels", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("viz", help="emit the drawing JSON for a structure or model")
    p.add_argument("file")
    p.add_argument("--theory")
    p.add_argument("--structure", required=True)
    p.add_argument("--vis-theory")
    p.add_argument("--vis-structure")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("sim", help="run a headless simulation from a click log")
    p.add_argument("file")
    p.add_argument("--clicks", required=True,
                   help="JSON array of arrays of keys, inline or a file path")
    p.add_argument("-o", "--output", help="directory for one spec file per step")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("serve", help="serve the simulation API over HTTP")
    p.add_argument("file", nargs="?")
    p.add_argument("--listen", default="127.0.0.1:8080")
    p.add_argument("--ttl", type=float, default=1800.0,
                   help="idle session lifetime in seconds")
    p.add_argument("--nbmodels-cap", type=int, default=64)
    p.add_argument("--ui-dir", help="static directory with the browser client")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SearchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ModelVizError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - the CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
