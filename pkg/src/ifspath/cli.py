"""Command-line surface.

Systems come from IFS documents (JSON) or the built-in gallery; analyses
print reports in the human text format or the lossless structured format.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import arcs, dimension, ifsdoc, param, quasiarc, render
from .gallery import GALLERY, get_entry
from .model import IfsPath, iterate, normalize, validate_path
from .pipeline import PipelineConfig, run_pipeline
from .report import AnalysisReport


def _load(args) -> IfsPath:
    if getattr(args, "gallery", None):
        return get_entry(args.gallery).build()
    if not args.file:
        raise SystemExit("need an IFS document file or --gallery NAME")
    with open(args.file, "r", encoding="utf-8") as fh:
        return ifsdoc.load_ifs(fh.read())


def _emit(report: AnalysisReport, args):
    if args.format == "structured":
        print(report.to_structured())
    else:
        print(report.to_text())


def _add_source(p):
    p.add_argument("file", nargs="?", help="IFS document (JSON)")
    p.add_argument("--gallery", help="use a built-in gallery system instead of a file")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="ifspath",
        description="validate and numerically interrogate IFS paths, arcs and quasiarcs",
    )
    ap.add_argument("--budget", type=int, default=1_000_000, help="point budget for iteration")
    ap.add_argument("--search-bound", type=int, default=64, help="exponent search bound")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled oracles")
    ap.add_argument("--format", choices=("text", "structured"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the endpoint chaining conditions")
    _add_source(p)

    p = sub.add_parser("normalize", help="conjugate to the canonical frame and print")
    _add_source(p)

    p = sub.add_parser("dimension", help="similarity dimension")
    _add_source(p)

    p = sub.add_parser("render", help="SVG of T^k(I)")
    _add_source(p)
    p.add_argument("--generation", type=int, default=5)
    p.add_argument("--output", "-o", help="output file (stdout otherwise)")
    p.add_argument("--markers", action="store_true", help="junction markers")
    p.add_argument("--color-copies", action="store_true", help="color generation-1 copies")

    p = sub.add_parser("check-arc", help="arc certification / non-arc witness")
    _add_source(p)
    p.add_argument("--max-generation", type=int, default=10)

    p = sub.add_parser("check-quasiarc", help="algebraic conditions, cones, bounded turning")
    _add_source(p)
    p.add_argument("--generation", type=int, default=7)
    p.add_argument("--assume-arc", action="store_true", help="override arc screening")

    p = sub.add_parser("bt", help="bounded-turning constants")
    _add_source(p)
    p.add_argument("--generation", type=int, default=7)
    p.add_argument("--assume-arc", action="store_true")

    p = sub.add_parser("param", help="evaluate the Hutchinson parameterization")
    _add_source(p)
    p.add_argument("--eval", type=float, help="single parameter t")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--samples", type=int, help="CSV of (t, phi(t)) samples")
    p.add_argument("--csv", help="CSV output file")

    p = sub.add_parser("holder", help="Hoelder profile over companion breakpoints")
    _add_source(p)
    p.add_argument("--generation", type=int, default=6)
    p.add_argument("--csv", help="scatter CSV output (small generations only)")

    p = sub.add_parser("non-arc", help="non-arc criteria and loop witness search")
    _add_source(p)
    p.add_argument("--loop-bound", type=int, default=16)

    p = sub.add_parser("gallery", help="list or run the built-in systems")
    p.add_argument("action", choices=("list", "run"))
    p.add_argument("name", nargs="?")

    p = sub.add_parser("pipeline", help="the full analysis pipeline")
    _add_source(p)
    p.add_argument("--assume-arc", action="store_true")

    p = sub.add_parser("serialize", help="print the document for a gallery system")
    _add_source(p)

    args = ap.parse_args(argv)

    if args.command == "gallery":
        if args.action == "list":
            for entry in GALLERY:
                print(f"{entry.name:12s} {entry.description}")
            return 0
        if not args.name:
            raise SystemExit("gallery run needs a name")
        entry = get_entry(args.name)
        cfg = PipelineConfig(
            budget=args.budget, search_bound=args.search_bound,
            seed=args.seed, assume_arc=entry.assume_arc,
        )
        _emit(run_pipeline(entry.build(), cfg), args)
        return 0

    if args.command == "validate":
        _emit(validate_path(list(_load(args).maps)), args)
        return 0

    if args.command == "normalize":
        print(ifsdoc.serialize_ifs(normalize(_load(args))))
        return 0

    if args.command == "serialize":
        print(ifsdoc.serialize_ifs(_load(args)))
        return 0

    if args.command == "dimension":
        res = dimension.similarity_dimension(normalize(_load(args)))
        rep = AnalysisReport("dimension", "PASS")
        rep.add("s", res.s, "computed")
        rep.add("residual", res.residual)
        _emit(rep, args)
        return 0

    if args.command == "render":
        path = normalize(_load(args))
        curve = iterate(path, args.generation, args.budget)
        svg = render.render_svg(
            curve,
            n_maps=path.n_maps,
            color_copies=args.color_copies,
            junction_markers=args.markers,
        )
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(svg)
        else:
            print(svg, end="")
        return 0

    if args.command == "check-arc":
        path = normalize(_load(args))
        verdict = arcs.certify_arc(path, args.max_generation, budget=args.budget)
        rep = AnalysisReport("certify-arc", verdict.status)
        rep.add("generation", verdict.generation)
        if verdict.witness:
            rep.add("witness_word_a", verdict.witness.word_a)
            rep.add("witness_word_b", verdict.witness.word_b)
            rep.add("witness_gap", verdict.witness.gap, "certified")
        if verdict.detail:
            rep.add("detail", verdict.detail)
        _emit(rep, args)
        return 0

    if args.command == "check-quasiarc":
        path = normalize(_load(args))
        rep = AnalysisReport("check-quasiarc")
        thm = quasiarc.check_theorem14(path, args.search_bound)
        child = AnalysisReport("theorem14", thm.verdict)
        child.add("condA", thm.condA.verdict, thm.condA.mode)
        child.add("condA_witness", thm.condA.witness)
        child.add("condB", thm.condB.verdict, thm.condB.mode)
        child.add("condB_witness", thm.condB.witness)
        if thm.corollary_case:
            child.add("corollary_case", thm.corollary_case)
        rep.children.append(child)
        rep.children.append(quasiarc.check_cone_containment(path))
        arc_verdict = None if args.assume_arc else arcs.certify_arc(path).status
        try:
            bt = quasiarc.bt_constant(
                path, args.generation, arc_verdict=arc_verdict, seed=args.seed
            )
            btrep = AnalysisReport("bounded-turning", bt.verdict)
            btrep.add("D_S_lower", bt.D_S_lower, "certified-lower-bound")
            btrep.add("C_triple", bt.C_triple, "estimate")
            btrep.add("C_bt", bt.C_bt, "estimate")
            rep.children.append(btrep)
        except (quasiarc.ArcScreeningError, quasiarc.ShallowGenerationError) as exc:
            rep.children.append(AnalysisReport("bounded-turning", "UNDECIDED").add("error", str(exc)))
        rep.verdict = thm.verdict
        _emit(rep, args)
        return 0

    if args.command == "bt":
        path = normalize(_load(args))
        arc_verdict = None if args.assume_arc else arcs.certify_arc(path).status
        bt = quasiarc.bt_constant(path, args.generation, arc_verdict=arc_verdict, seed=args.seed)
        rep = AnalysisReport("bounded-turning", bt.verdict)
        rep.add("D_S_lower", bt.D_S_lower, "certified-lower-bound")
        rep.add("D_S_estimate", bt.D_S_estimate, "estimate")
        rep.add("C_triple", bt.C_triple, "estimate")
        rep.add("C_bt", bt.C_bt, "estimate")
        rep.add("generation", bt.generation)
        rep.add("scan", bt.scan)
        _emit(rep, args)
        return 0

    if args.command == "param":
        path = normalize(_load(args))
        if args.samples:
            rows = []
            for i in range(args.samples):
                t = i / (args.samples - 1) if args.samples > 1 else 0.0
                pp = param.eval_phi(path, t, args.tol)
                rows.append((t,) + pp.value)
            out = args.csv or "-"
            _write_csv(out, ["t"] + [f"x{i}" for i in range(path.dim)], rows)
            return 0
        if args.eval is None:
            raise SystemExit("param needs --eval T or --samples N")
        pp = param.eval_phi(path, args.eval, args.tol)
        rep = AnalysisReport("param", "PASS")
        rep.add("t", pp.t)
        rep.add("value", pp.value, "estimate")
        rep.add("error", pp.error, "certified")
        rep.add("address", pp.address)
        _emit(rep, args)
        return 0

    if args.command == "holder":
        path = normalize(_load(args))
        if args.csv:
            rows = param.holder_scatter(path, args.generation)
            _write_csv(args.csv, ["u", "v", "distance", "t_gap", "ratio"], rows)
            return 0
        sup, inf = param.holder_profile(path, args.generation)
        rep = AnalysisReport("holder-profile", "PASS")
        rep.add("sup_ratio", sup, "estimate")
        rep.add("inf_ratio", inf, "estimate")
        rep.add("generation", args.generation)
        _emit(rep, args)
        return 0

    if args.command == "non-arc":
        path = normalize(_load(args))
        rep = arcs.check_thm18_conditions(path, args.search_bound)
        if rep.verdict != "FAIL":
            wit = arcs.find_loop_witness(path, args.loop_bound)
            child = AnalysisReport("loop-witness", "PASS" if wit else "UNDECIDED")
            if wit:
                child.add("junction", wit.junction)
                child.add("multiple", wit.multiple)
                child.add("intersection", wit.intersection, "estimate")
                child.add("intersection_gap", wit.intersection_gap, "certified")
                child.add("separation", wit.separation, "certified")
            rep.children.append(child)
        _emit(rep, args)
        return 0

    if args.command == "pipeline":
        path = _load(args)
        cfg = PipelineConfig(
            budget=args.budget, search_bound=args.search_bound,
            seed=args.seed, assume_arc=args.assume_arc,
        )
        _emit(run_pipeline(path, cfg), args)
        return 0

    raise SystemExit(f"unknown command {args.command}")


def _write_csv(target: str, header, rows):
    if target == "-":
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(target, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


if __name__ == "__main__":
    sys.exit(main())
