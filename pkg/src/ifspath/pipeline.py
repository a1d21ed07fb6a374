"""Orchestration: the full analysis pipeline over one IFS path."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import arcs, dimension, param, quasiarc
from .model import IfsPath, normalize, validate_path
from .report import FAIL, PASS, SKIPPED, UNDECIDED, AnalysisReport


@dataclass
class PipelineConfig:
    budget: int = 1_000_000
    search_bound: int = 64
    arc_max_generation: int = 10
    bt_generation: int = 7
    ds_generation: int = 7
    holder_generation: int = 6
    seed: int = 0
    assume_arc: bool = False      # user override for the arc screening gate
    loop_search_bound: int = 16


def run_pipeline(path: IfsPath, config: Optional[PipelineConfig] = None) -> AnalysisReport:
    """validate - normalize - dimension - arc - algebraic checks - metric
    constants, with stages after a non-arc verdict skipped except the
    non-arc diagnostics.  Deterministic for a fixed configuration."""
    cfg = config or PipelineConfig()
    rep = AnalysisReport("pipeline")

    vrep = validate_path(list(path.maps))
    vrep.name = "validate"
    rep.children.append(vrep)
    if vrep.verdict != PASS:
        rep.verdict = FAIL
        rep.add("stopped_at", "validate")
        return rep

    npath = normalize(path)
    nrep = AnalysisReport("normalize", PASS)
    nrep.add("endpoints", ("origin", "e1"), "certified")
    rep.children.append(nrep)

    dres = dimension.similarity_dimension(npath)
    drep = AnalysisReport("dimension", PASS)
    drep.add("s", dres.s, "computed")
    drep.add("residual", dres.residual)
    drep.add("iterations", dres.iterations)
    rep.children.append(drep)

    arc = arcs.certify_arc(npath, cfg.arc_max_generation)
    arep = AnalysisReport("certify-arc", arc.status)
    arep.add("generation", arc.generation)
    if arc.status == arcs.CERTIFIED_ARC:
        arep.add("margin", arc.margin, "certified-lower-bound")
    if arc.witness is not None:
        arep.add("witness_word_a", arc.witness.word_a)
        arep.add("witness_word_b", arc.witness.word_b)
        arep.add("witness_point", arc.witness.point)
        arep.add("witness_gap", arc.witness.gap, "certified")
    if arc.detail:
        arep.add("detail", arc.detail)
    rep.children.append(arep)

    thm = quasiarc.check_theorem14(npath, cfg.search_bound)
    trep = AnalysisReport("theorem14", thm.verdict)
    trep.add("condA", thm.condA.verdict, thm.condA.mode)
    if thm.condA.witness:
        trep.add("condA_witness", thm.condA.witness)
    trep.add("condB", thm.condB.verdict, thm.condB.mode)
    if thm.condB.witness:
        trep.add("condB_witness", thm.condB.witness)
    if thm.M is not None:
        trep.add("M", thm.M)
    if thm.corollary_case:
        trep.add("corollary_case", thm.corollary_case)
    rep.children.append(trep)

    if npath.dim == 2:
        cone = quasiarc.check_cone_containment(npath)
        rep.children.append(cone)
    else:
        rep.children.append(AnalysisReport("cone-containment", SKIPPED))

    non_arc = arc.status == arcs.NON_ARC_WITNESS
    arc_gate = arc.status if not cfg.assume_arc else "CERTIFIED_ARC"
    if non_arc or (arc_gate != "CERTIFIED_ARC"):
        reason = "non-arc verdict" if non_arc else "arc not certified (pass assume_arc to override)"
        for name in ("D_S", "bounded-turning", "holder-profile"):
            rep.children.append(AnalysisReport(name, SKIPPED).add("reason", reason))
    else:
        try:
            ds_lower, ds_est = quasiarc.compute_DS(
                npath, cfg.ds_generation, arc_verdict=None, budget=cfg.budget
            )
            dsrep = AnalysisReport("D_S", PASS)
            dsrep.add("lower", ds_lower, "certified-lower-bound")
            dsrep.add("estimate", ds_est, "estimate")
            dsrep.add("generation", cfg.ds_generation)
        except quasiarc.ShallowGenerationError as exc:
            dsrep = AnalysisReport("D_S", UNDECIDED)
            dsrep.add("error", str(exc))
        rep.children.append(dsrep)

        if dsrep.verdict == PASS:
            bt = quasiarc.bt_constant(
                npath,
                cfg.bt_generation,
                arc_verdict=None,
                ds_generation=cfg.ds_generation,
                seed=cfg.seed,
            )
            btrep = AnalysisReport("bounded-turning", bt.verdict)
            btrep.add("C_triple", bt.C_triple, "estimate")
            btrep.add("C_bt", bt.C_bt, "estimate")
            btrep.add("generation", bt.generation)
            btrep.add("scan", bt.scan)
            btrep.add("converse_max", bt.converse_max, "estimate")
            rep.children.append(btrep)

            sup, inf = param.holder_profile(npath, cfg.holder_generation)
            hrep = AnalysisReport("holder-profile", PASS)
            hrep.add("sup_ratio", sup, "estimate")
            hrep.add("inf_ratio", inf, "estimate")
            hrep.add("generation", cfg.holder_generation)
            hrep.add("exponent", 1.0 / dres.s)
            rep.children.append(hrep)
        else:
            for name in ("bounded-turning", "holder-profile"):
                rep.children.append(
                    AnalysisReport(name, SKIPPED).add("reason", "no positive D_S bound")
                )

    if npath.dim == 2:
        thm18 = arcs.check_thm18_conditions(npath, cfg.search_bound)
        rep.children.append(thm18)
        if thm18.verdict != FAIL:
            wit = arcs.find_loop_witness(npath, cfg.loop_search_bound)
            lrep = AnalysisReport("loop-witness", PASS if wit else UNDECIDED)
            if wit:
                lrep.add("junction", wit.junction)
                lrep.add("multiple", wit.multiple)
                lrep.add("block_a", wit.block_a)
                lrep.add("block_b", wit.block_b)
                lrep.add("intersection", wit.intersection, "estimate")
                lrep.add("intersection_gap", wit.intersection_gap, "certified")
                lrep.add("separation", wit.separation, "certified")
            else:
                lrep.add("note", "no witness within the sweep bound")
            rep.children.append(lrep)
        else:
            rep.children.append(
                AnalysisReport("loop-witness", SKIPPED).add("reason", "criteria not met")
            )
    else:
        rep.children.append(AnalysisReport("non-arc-criteria", SKIPPED))
        rep.children.append(AnalysisReport("loop-witness", SKIPPED))

    if non_arc:
        rep.verdict = "NON_ARC"
    elif arc.status == arcs.CERTIFIED_ARC:
        rep.verdict = "ARC"
    else:
        rep.verdict = UNDECIDED
    rep.add("similarity_dimension", dres.s, "computed")
    return rep
