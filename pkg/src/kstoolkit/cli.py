"""Command-line front end emitting auditable JSON certificates.

Machine-readable certificates go to standard output; a short human summary
goes to standard error.  Exit codes: 0 for verified claims, 1 for refuted
claims, 2 for errors and budget refusals.  Certificates are byte-identical
across repeated runs on identical inputs except for the wall-time field.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import channels as ch
from . import coloring as col
from . import games as gm
from . import graphs as gr
from . import ks
from . import serialize as ser
from . import theta as th
from .errors import PreconditionError, ToolkitError
from .linalg import TolerancePolicy

EXIT_VERIFIED = 0
EXIT_REFUTED = 1
EXIT_ERROR = 2


def _tolerance(args) -> TolerancePolicy:
    return TolerancePolicy(zero_tol=args.tol, ambiguity_factor=args.ambiguity_factor)


def _load_operator_set(path):
    return ser.operator_set_from_dict(ser.load_json(path))


def _load_graph(path):
    with open(path) as fh:
        return ser.graph_from_text(fh.read())


def _write_artifact(args, text_or_dict):
    if not getattr(args, "out", None):
        return None
    if isinstance(text_or_dict, str):
        with open(args.out, "w") as fh:
            fh.write(text_or_dict)
    else:
        ser.dump_json(text_or_dict, args.out)
    return args.out


def cmd_verify_ks(args, tol):
    opset = _load_operator_set(args.set_file)
    verdict = ks.classify(opset, tol=tol, cap=args.enumeration_cap)
    verdicts = {
        "classification": verdict.classification,
        "certificate": verdict.certificate(),
        "n_elements": len(opset),
    }
    code = EXIT_VERIFIED if verdict.is_ks else EXIT_REFUTED
    return code, verdicts, {}, {args.set_file: ser.file_digest(args.set_file)}, (
        f"classification: {verdict.classification}"
    )


def cmd_weak_from_projective(args, tol):
    opset = _load_operator_set(args.set_file)
    derived = ks.weak_from_projective(opset, tol=tol)
    artifact = ser.operator_set_to_dict(derived)
    out = _write_artifact(args, artifact)
    verdicts = {"n_vectors": len(derived), "dim": derived.dim}
    witnesses = {} if out else {"derived_set": artifact}
    return EXIT_VERIFIED, verdicts, witnesses, {
        args.set_file: ser.file_digest(args.set_file)
    }, f"derived {len(derived)} vectors in dimension {derived.dim}"


def cmd_ortho_graph(args, tol):
    opset = _load_operator_set(args.set_file)
    cover = ks.enumerate_measurements(opset, tol=tol, cap=args.enumeration_cap)
    graph = gr.orthogonality_graph(opset, cover, tol)
    text = ser.graph_to_text(graph)
    out = _write_artifact(args, text)
    verdicts = {
        "n_measurements": len(cover),
        "n_vertices": graph.n_vertices,
        "n_edges": graph.edge_count,
    }
    witnesses = {} if out else {"graph": text}
    return EXIT_VERIFIED, verdicts, witnesses, {
        args.set_file: ser.file_digest(args.set_file)
    }, f"{graph.n_vertices} vertices, {graph.edge_count} edges, {len(cover)} measurements"


def cmd_hadamard(args, tol):
    graph = gr.hadamard_graph(args.order, max_n=args.max_order)
    text = ser.graph_to_text(graph)
    out = _write_artifact(args, text)
    verdicts = {"order": args.order, "n_vertices": graph.n_vertices, "n_edges": graph.edge_count}
    witnesses = {} if out else {"graph": text}
    return EXIT_VERIFIED, verdicts, witnesses, {}, (
        f"order {args.order}: {graph.n_vertices} vertices, {graph.edge_count} edges"
    )


def cmd_product(args, tol):
    g = _load_graph(args.graph_a)
    h = _load_graph(args.graph_b)
    result = gr.cartesian_product(g, h) if args.kind == "cartesian" else gr.strong_product(g, h)
    text = ser.graph_to_text(result)
    out = _write_artifact(args, text)
    verdicts = {"kind": args.kind, "n_vertices": result.n_vertices, "n_edges": result.edge_count}
    witnesses = {} if out else {"graph": text}
    inputs = {p: ser.file_digest(p) for p in (args.graph_a, args.graph_b)}
    return EXIT_VERIFIED, verdicts, witnesses, inputs, (
        f"{args.kind} product: {result.n_vertices} vertices, {result.edge_count} edges"
    )


def cmd_alpha(args, tol):
    graph = _load_graph(args.graph_file)
    size, witness = gr.independence_number(graph, max_vertices=args.max_vertices)
    verdicts = {"alpha": size}
    witnesses = {"independent_set": list(witness)}
    return EXIT_VERIFIED, verdicts, witnesses, {
        args.graph_file: ser.file_digest(args.graph_file)
    }, f"alpha = {size}"


def cmd_chi(args, tol):
    graph = _load_graph(args.graph_file)
    num, witness = gr.chromatic_number(graph, max_vertices=args.max_vertices)
    verdicts = {"chi": num}
    witnesses = {"coloring": list(witness)}
    return EXIT_VERIFIED, verdicts, witnesses, {
        args.graph_file: ser.file_digest(args.graph_file)
    }, f"chi = {num}"


def cmd_theta(args, tol):
    path = args.graph_file or args.graph_flag
    if path is None:
        raise PreconditionError("theta needs a graph file (positional or --graph)")
    graph = _load_graph(path)
    result = th.lovasz_theta(graph, eps=args.sdp_eps, max_vertices=args.max_vertices)
    verdicts = {"theta": result.to_dict(), "eps": args.sdp_eps}
    return EXIT_VERIFIED, verdicts, {}, {
        path: ser.file_digest(path)
    }, f"theta in [{result.value:.9g}, {result.dual_bound:.9g}] (gap {result.gap:.2e})"


def cmd_build_channel(args, tol):
    inputs = {}
    if args.graph_file:
        graph = _load_graph(args.graph_file)
        inputs[args.graph_file] = ser.file_digest(args.graph_file)
    else:
        opset = _load_operator_set(args.from_ks)
        cover = ks.enumerate_measurements(opset, tol=tol, cap=args.enumeration_cap)
        graph = gr.orthogonality_graph(opset, cover, tol)
        inputs[args.from_ks] = ser.file_digest(args.from_ks)
    channel = ch.canonical_channel(graph)
    artifact = ser.channel_to_dict(channel)
    out = _write_artifact(args, artifact)
    verdicts = {"n_inputs": len(channel.inputs), "n_outputs": len(channel.outputs)}
    witnesses = {} if out else {"channel": artifact}
    return EXIT_VERIFIED, verdicts, witnesses, inputs, (
        f"channel with {len(channel.inputs)} inputs, {len(channel.outputs)} outputs"
    )


def cmd_certify_separation(args, tol):
    inputs = {}
    if args.from_ks:
        opset = _load_operator_set(args.from_ks)
        inputs[args.from_ks] = ser.file_digest(args.from_ks)
        channel, strategy, graph = ch.strategy_from_ks(opset, tol=tol, cap=args.enumeration_cap)
        q = strategy.n_messages
        source = {"kind": "projective_ks_set", "n_elements": len(opset)}
    else:
        if args.hadamard is not None:
            graph0 = gr.hadamard_graph(args.hadamard)
            qc = col.hadamard_coloring(args.hadamard)
            source = {"kind": "hadamard_coloring", "order": args.hadamard}
        else:
            graph0 = _load_graph(args.coloring_graph)
            qc = ser.coloring_from_dict(ser.load_json(args.quantum_coloring))
            inputs[args.coloring_graph] = ser.file_digest(args.coloring_graph)
            inputs[args.quantum_coloring] = ser.file_digest(args.quantum_coloring)
            source = {"kind": "quantum_coloring", "n_colors": qc.n_colors}
        channel, strategy, graph = ch.strategy_from_coloring(graph0, qc, tol)
        q = strategy.n_messages
    report = ch.verify_ea_strategy(channel, strategy, tol)
    alpha, witness = gr.independence_number(graph, max_vertices=args.max_vertices)
    verdicts = {
        "source": source,
        "n_messages": q,
        "alpha": alpha,
        "strategy_verified": report.ok,
        "checked_pairs": report.checked_pairs,
        "checked_paths": report.checked_paths,
        "separation": bool(report.ok and alpha < q),
        "tolerance": tol.zero_tol,
    }
    witnesses = {"independent_set": list(witness)}
    if args.with_theta:
        result = th.lovasz_theta(graph, eps=args.sdp_eps, max_vertices=args.theta_budget)
        verdicts["theta"] = result.to_dict()
    code = EXIT_VERIFIED if verdicts["separation"] else EXIT_REFUTED
    summary = (
        f"alpha = {alpha}, messages = {q}, strategy "
        f"{'verified' if report.ok else 'FAILED'}; separation "
        f"{'certified' if verdicts['separation'] else 'refuted'}"
    )
    return code, verdicts, witnesses, inputs, summary


def cmd_game(args, tol):
    inputs = {}
    if args.from_ks:
        opset = _load_operator_set(args.from_ks)
        inputs[args.from_ks] = ser.file_digest(args.from_ks)
        game, strategy = gm.game_from_ks(opset, tol=tol, cap=args.enumeration_cap)
    else:
        graph = _load_graph(args.coloring_graph)
        inputs[args.coloring_graph] = ser.file_digest(args.coloring_graph)
        game = gm.coloring_game(graph, args.colors)
        strategy = None
    artifact = ser.game_to_dict(game)
    out = _write_artifact(args, artifact)
    verdicts = {
        "n_inputs": [len(game.x_labels), len(game.y_labels)],
        "n_answers": [len(game.a_labels), len(game.b_labels)],
    }
    witnesses = {} if out else {"game": artifact}
    code = EXIT_VERIFIED
    if args.check:
        if strategy is not None:
            play = gm.quantum_loses_probability_zero(game, strategy, tol)
            verdicts["quantum_optimal"] = play.ok
            verdicts["flagged_tuples"] = len(play.flagged)
        value, best = gm.classical_value(game, budget=args.strategy_budget)
        verdicts["classical_value"] = value
        witnesses["classical_strategy"] = {"s_a": list(best.s_a), "s_b": list(best.s_b)}
        lose = gm.losing_tuple(game, best)
        if lose is not None:
            witnesses["losing_tuple"] = list(lose)
        if strategy is not None:
            verdicts["pseudo_telepathy"] = bool(play.ok and value < 1.0)
            code = EXIT_VERIFIED if verdicts["pseudo_telepathy"] else EXIT_REFUTED
    summary = f"game over {len(game.x_labels)}x{len(game.y_labels)} inputs"
    if "classical_value" in verdicts:
        summary += f", classical value {verdicts['classical_value']:.6g}"
    return code, verdicts, witnesses, inputs, summary


def cmd_simulate_strategy(args, tol):
    channel = ser.channel_from_dict(ser.load_json(args.channel))
    strategy = ser.strategy_from_dict(ser.load_json(args.strategy))
    report = ch.verify_ea_strategy(channel, strategy, tol)
    verdicts = {"report": report.to_dict(), "tolerance": tol.zero_tol}
    inputs = {p: ser.file_digest(p) for p in (args.channel, args.strategy)}
    code = EXIT_VERIFIED if report.ok else EXIT_REFUTED
    summary = (
        f"strategy with {strategy.n_messages} messages "
        f"{'verified' if report.ok else 'has violations'}"
    )
    return code, verdicts, {}, inputs, summary


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--tol", type=float, default=1e-9, help="zero tolerance")
    shared.add_argument(
        "--ambiguity-factor", type=float, default=100.0,
        help="width of the guarded ambiguity band as a multiple of --tol",
    )
    shared.add_argument(
        "--threads", type=int, default=int(os.environ.get("KSTOOLKIT_THREADS", "1")),
        help="worker cap (current solvers are sequential and deterministic)",
    )
    parser = argparse.ArgumentParser(
        prog="kstoolkit",
        description="Verification toolkit for KS-style operator sets, zero-error "
        "channel separations, quantum colorings, and nonlocal games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name, **kwargs):
        return sub.add_parser(name, parents=[shared], **kwargs)

    def common(p, out=True):
        if out:
            p.add_argument("-o", "--out", help="write the produced artifact to this file")
        p.add_argument("--enumeration-cap", type=int, default=ks.DEFAULT_ENUMERATION_CAP)
        p.add_argument("--max-vertices", type=int, default=gr.DEFAULT_ALPHA_BUDGET)
        p.add_argument("--sdp-eps", type=float, default=th.DEFAULT_EPS)

    p = add_command("verify-ks", help="classify an operator set")
    p.add_argument("set_file")
    common(p, out=False)
    p.set_defaults(handler=cmd_verify_ks)

    p = add_command("weak-from-projective", help="support-basis vector set of a projective KS set")
    p.add_argument("set_file")
    common(p)
    p.set_defaults(handler=cmd_weak_from_projective)

    p = add_command("ortho-graph", help="orthogonality graph of a set's measurements")
    p.add_argument("set_file")
    common(p)
    p.set_defaults(handler=cmd_ortho_graph)

    p = add_command("hadamard", help="sign-vector orthogonality graph")
    p.add_argument("-n", "--order", type=int, required=True)
    p.add_argument("--max-order", type=int, default=gr.DEFAULT_HADAMARD_BUDGET)
    common(p)
    p.set_defaults(handler=cmd_hadamard)

    p = add_command("product", help="graph product")
    p.add_argument("--kind", choices=("cartesian", "strong"), default="cartesian")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    common(p)
    p.set_defaults(handler=cmd_product)

    p = add_command("alpha", help="exact independence number")
    p.add_argument("graph_file")
    common(p, out=False)
    p.set_defaults(handler=cmd_alpha)

    p = add_command("chi", help="exact chromatic number")
    p.add_argument("graph_file")
    common(p, out=False)
    p.set_defaults(handler=cmd_chi)
    # chi uses its own default budget
    p.set_defaults(max_vertices=gr.DEFAULT_CHI_BUDGET)

    p = add_command("theta", help="Lovasz theta with certified bounds")
    p.add_argument("graph_file", nargs="?", default=None)
    p.add_argument("--graph", dest="graph_flag", default=None)
    common(p, out=False)
    p.set_defaults(handler=cmd_theta, max_vertices=th.DEFAULT_THETA_BUDGET)

    p = add_command("build-channel", help="canonical channel of a graph or KS set")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", dest="graph_file")
    group.add_argument("--from-ks", dest="from_ks")
    common(p)
    p.set_defaults(handler=cmd_build_channel)

    p = add_command("certify-separation", help="one-shot capacity separation certificate")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--from-ks", dest="from_ks")
    group.add_argument("--hadamard", type=int, dest="hadamard")
    group.add_argument("--coloring", dest="coloring_graph")
    p.add_argument("--quantum-coloring", dest="quantum_coloring")
    p.add_argument("--with-theta", action="store_true")
    p.add_argument("--theta-budget", type=int, default=th.DEFAULT_THETA_BUDGET)
    common(p, out=False)
    p.set_defaults(handler=cmd_certify_separation, from_ks=None, hadamard=None)

    p = add_command("game", help="nonlocal game from a KS set or a coloring instance")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--from-ks", dest="from_ks")
    group.add_argument("--coloring", dest="coloring_graph")
    p.add_argument("--colors", type=int, default=None)
    p.add_argument("--check", action="store_true", help="also compute optimality and classical value")
    p.add_argument("--strategy-budget", type=int, default=gm.DEFAULT_STRATEGY_BUDGET)
    common(p)
    p.set_defaults(handler=cmd_game, from_ks=None)

    p = add_command("simulate-strategy", help="verify a strategy against a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--strategy", required=True)
    common(p, out=False)
    p.set_defaults(handler=cmd_simulate_strategy)

    return parser


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "game" and args.coloring_graph and args.colors is None:
        parser.error("--coloring requires --colors")
    if (
        args.command == "certify-separation"
        and args.coloring_graph
        and not args.quantum_coloring
    ):
        parser.error("--coloring requires --quantum-coloring")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    started = time.perf_counter()
    tol = _tolerance(args)
    certificate = {
        "tool": "kstoolkit",
        "version": __version__,
        "command": args.command,
        "tolerance_policy": {
            "zero_tol": tol.zero_tol,
            "ambiguity_factor": tol.ambiguity_factor,
        },
    }
    try:
        code, verdicts, witnesses, inputs, summary = args.handler(args, tol)
    except ToolkitError as exc:
        certificate["error"] = {"type": type(exc).__name__, "message": str(exc)}
        certificate["wall_time_s"] = round(time.perf_counter() - started, 6)
        print(json.dumps(_sanitize(certificate), sort_keys=True, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        certificate["error"] = {"type": "FileNotFoundError", "message": str(exc)}
        print(json.dumps(_sanitize(certificate), sort_keys=True, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    certificate["inputs"] = inputs
    certificate["verdicts"] = verdicts
    certificate["witnesses"] = witnesses
    certificate["wall_time_s"] = round(time.perf_counter() - started, 6)
    print(json.dumps(_sanitize(certificate), sort_keys=True, indent=2))
    print(summary, file=sys.stderr)
    return code


def entry_point():
    raise SystemExit(main())
