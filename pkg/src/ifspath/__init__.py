"""ifspath: validation and metric analysis of IFS paths, arcs and quasiarcs."""

from .geometry import (
    IdentityMap,
    MatrixOrthogonal,
    PlanarOrthogonal,
    Similarity,
    planar_similarity,
    word_map,
    word_ratio,
)
from .model import (
    ApproxCurve,
    IfsPath,
    VertexSet,
    iterate,
    normalize,
    validate_path,
    vertices,
)
from .scalars import Rotation2, acos_token, radians_token
from .dimension import DimensionResult, box_dimension_estimate, similarity_dimension
from .param import (
    CompanionIfs,
    ParamPoint,
    Partition,
    address_of,
    arclength_identity,
    build_partition,
    check_structural_identity,
    eval_phi,
    holder_profile,
)
from .quasiarc import (
    BtReport,
    CaseTriple,
    Thm14Report,
    bt_constant,
    check_cone_containment,
    check_theorem14,
    compute_DS,
    enumerate_case2_triples,
)
from .arcs import (
    ArcVerdict,
    LoopWitness,
    certify_arc,
    check_thm18_conditions,
    find_loop_witness,
    reconstruct_loop,
    rotation_obstruction,
)
from .report import AnalysisReport
from .ifsdoc import load_ifs, serialize_ifs
from .render import render_svg
from .gallery import GALLERY, GalleryEntry, gallery_names, get_entry
from .pipeline import PipelineConfig, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "ApproxCurve", "ArcVerdict", "BtReport", "CaseTriple",
    "CompanionIfs", "DimensionResult", "GALLERY", "GalleryEntry", "IdentityMap",
    "IfsPath", "LoopWitness", "MatrixOrthogonal", "ParamPoint", "Partition",
    "PipelineConfig", "PlanarOrthogonal", "Rotation2", "Similarity",
    "Thm14Report", "VertexSet", "acos_token", "address_of",
    "arclength_identity", "box_dimension_estimate", "bt_constant",
    "build_partition", "certify_arc", "check_cone_containment",
    "check_structural_identity", "check_theorem14", "check_thm18_conditions",
    "compute_DS", "enumerate_case2_triples", "eval_phi", "find_loop_witness",
    "gallery_names", "get_entry", "holder_profile", "iterate", "load_ifs",
    "normalize", "planar_similarity", "radians_token", "reconstruct_loop",
    "render_svg", "rotation_obstruction", "run_pipeline", "serialize_ifs",
    "similarity_dimension", "validate_path", "vertices", "word_map",
    "word_ratio",
]
