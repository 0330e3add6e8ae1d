"""Command-line front end; every command produces a RunReport."""

from __future__ import annotations

import argparse
import json
import logging
import random
import time
from dataclasses import dataclass
from pathlib import Path

from .cat0 import (
    ascending_chain_check,
    convex_hull,
    fixed_point,
    halfspaces,
    hyperplanes,
    separating_pairs,
    skeleton_distance,
)
from .complexes.cube import CubeComplex, cubical_subdivision
from .complexes.links import cubicality_check, gromov_check, is_combinatorially_convex
from .complexes.maps import CellularMap, Involution, check_involution
from .complexes.simplicial import DeltaComplex, SimplicialComplex, category_c_check
from .config import DEFAULT_PETAL_LENGTH, KIT_NAMES
from .errors import KanThurstonError, SchemaError
from .homology import complex_homology, is_acyclic, presentation_h1_h2, trivializing_reduction_check
from .kan_thurston import (
    DeltaMap,
    convexity_check,
    dimension_law,
    filtration_check,
    kt_build,
    kt_map,
    load_kit,
    locally_cat0,
    validate_kit,
)
from .polygons import (
    TessellatedPolygon,
    corner_cut_search,
    four_saddle_octagon,
    gauss_bonnet,
    is_cat0_polygon,
    regular_right_pentagon,
    single_vertex_polygon,
    solve_k,
)
from .presentation_complexes import (
    acycone_complex,
    acyctwo_complex,
    fewquot_certificate,
    fewquot_complex,
    y_n,
)
from .reports import RunReport
from .schema import document_digest, from_document, write_document
from .utils import payload_digest
from .words import Presentation, quotient_presentation


LOGGER = logging.getLogger(__name__)


@dataclass
class CommandContext:
    settings: dict
    exports_dir: Path | None = None
    corpus_dir: Path | None = None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kanthurston", description="Cube complexes, acyclic kits and the Kan-Thurston functor.")
    parser.add_argument("--format", choices=("json", "text"), default="text")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--log-level", default=None)
    parser.add_argument("--no-history", action="store_true", help="Do not persist the run report.")
    sub = parser.add_subparsers(dest="command", required=True)

    polygon = sub.add_parser("polygon", help="Tessellated polygons.")
    polygon.add_argument("action", choices=("solve", "build", "corner-cut", "octagon", "pentagon"))
    polygon.add_argument("--lengths", type=_int_list, default=())
    polygon.add_argument("--width", type=int, default=0)
    polygon.add_argument("--height", type=int, default=0)
    polygon.add_argument("--m", type=int, default=1)
    polygon.add_argument("--emit", type=Path)
    polygon.add_argument("--export", type=_str_list, default=())

    make = sub.add_parser("make", help="Build a named complex and emit it as JSON.")
    make.add_argument("name")
    make.add_argument("--n", type=int, default=8)
    make.add_argument("--petal-length", type=int, default=None)
    make.add_argument("--emit", type=Path)
    make.add_argument("--check", action="store_true", help="Run gromov/homology checks on the result.")

    kt = sub.add_parser("kt", help="Kan-Thurston construction.")
    kt.add_argument("action", choices=("build", "verify", "map", "kit"))
    kt.add_argument("--input", type=Path)
    kt.add_argument("--kit", choices=KIT_NAMES, default=None)
    kt.add_argument("--emit", type=Path)
    kt.add_argument("--with-u", action="store_true")
    kt.add_argument("--properness", action="store_true", help="Rebuild T_W for each facet and compare labels.")
    kt.add_argument("--gromov", action="store_true")

    geo = sub.add_parser("geo", help="Hyperplanes and convexity in CAT(0) cube complexes.")
    geo.add_argument("action", choices=("hyperplanes", "halfspaces", "hull", "distance", "fixed-point"))
    geo.add_argument("--input", type=Path, required=True)
    geo.add_argument("--pair", type=int, default=0)
    geo.add_argument("--cells", type=_int_list, default=())
    geo.add_argument("--v", type=int, default=None)
    geo.add_argument("--w", type=int, default=None)
    geo.add_argument("--samples", type=int, default=0)
    geo.add_argument("--no-precheck", action="store_true")

    homology = sub.add_parser("homology", help="Integral homology of a complex or presentation.")
    homology.add_argument("--input", type=Path, required=True)
    homology.add_argument("--reduced", action="store_true")

    check = sub.add_parser("check", help="Structural checks.")
    check.add_argument("what", choices=("gromov", "cubicality", "category", "acyclic", "presentation", "kit"))
    check.add_argument("--input", type=Path)
    check.add_argument("--kit", choices=KIT_NAMES, default=None)
    check.add_argument("--subdivide", type=int, default=0)

    corpus = sub.add_parser("corpus", help="Golden fixture files.")
    corpus.add_argument("action", choices=("list", "write", "verify"))
    corpus.add_argument("--heavy", action="store_true")
    corpus.add_argument("--dir", type=Path)

    history = sub.add_parser("history", help="Persisted run reports.")
    history.add_argument("--limit", type=int, default=20)
    history.add_argument("--command-filter", default=None)

    batch = sub.add_parser("batch", help="Queue a directory of inputs and run one command over each.")
    batch.add_argument("--input-dir", type=Path, default=None)
    batch.add_argument("--pattern", default="*.json")
    batch.add_argument("--run", default=None, help='Command to run per file, e.g. "kt verify --kit mock".')
    batch.add_argument("--resume", type=int, default=None, help="Continue an interrupted batch by id.")
    return parser


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in str(text).replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip().lower() for x in str(text).split(",") if x.strip())


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def load_input(path: Path | None):
    if path is None:
        raise SchemaError("This command needs --input.", code="missing_input")
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"Input file not found: {path}", code="missing_file", details={"path": str(path)}) from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"Invalid JSON in {path}: {exc.msg}", code="bad_json", details={"line": exc.lineno}) from exc
    return from_document(payload), payload_digest(payload)


def as_cube(obj) -> CubeComplex:
    if isinstance(obj, CubeComplex):
        return obj
    if isinstance(obj, CellularMap):
        return obj.source
    if isinstance(obj, TessellatedPolygon):
        return obj.carrier
    raise SchemaError(f"Expected a cube complex, got {type(obj).__name__}.", code="wrong_kind")


def as_delta(obj) -> DeltaComplex:
    if isinstance(obj, DeltaComplex):
        return obj
    if isinstance(obj, SimplicialComplex):
        return obj.to_delta()
    raise SchemaError(f"Expected a Delta-complex, got {type(obj).__name__}.", code="wrong_kind")


def _counts(c) -> list[int]:
    return list(c.cell_counts())


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _polygon_report(report: RunReport, s: TessellatedPolygon) -> None:
    report.counts.update(squares=s.square_count, perimeter=s.perimeter, corners=s.n)
    report.results["side_lengths"] = list(s.side_lengths)
    try:
        total = gauss_bonnet(s)
        report.add("gauss_bonnet", True, total=total)
    except KanThurstonError as exc:
        report.add("gauss_bonnet", False, **exc.details)
    cat0, positive = is_cat0_polygon(s)
    report.add("cat0_polygon", True, cat0=cat0, positive_vertices=list(positive))


def cmd_polygon(args, report: RunReport, ctx: CommandContext) -> None:
    report.input_digest = payload_digest(["polygon", args.action, list(args.lengths), args.width, args.height, args.m])
    if args.action == "solve":
        solution = solve_k(args.lengths)
        report.results["solution"] = solution.to_dict()
        report.add("feasible", solution.feasible, status=solution.status)
        return
    if args.action == "build":
        s = single_vertex_polygon(args.lengths)
    elif args.action == "corner-cut":
        s, offset, flipped = corner_cut_search(args.width, args.height, args.lengths)
        report.results.update(offset=offset, reversed=flipped)
    elif args.action == "octagon":
        s = four_saddle_octagon()
    else:
        s = regular_right_pentagon(args.m)
    _polygon_report(report, s)
    if args.emit:
        report.results["emitted"] = write_document(args.emit, s)
    if args.export:
        from .services.exports import export_polygon

        target = ctx.exports_dir or Path.cwd()
        paths = export_polygon(s, target, f"polygon_{args.action}", tuple(args.export))
        report.results["exported"] = [p.name for p in paths]


def _make_object(args, petal_length: int):
    name = args.name.lower()
    if name in ("y_n", "yn"):
        return y_n(args.n, petal_length).complex
    if name == "acycone":
        return acycone_complex(petal_length).complex
    if name == "acyctwo":
        return acyctwo_complex()[1]
    if name == "fewquot":
        return fewquot_complex(args.n, petal_length).complex
    if name in ("kit-mock", "kit-cube", "kit-genuine"):
        return load_kit(name.split("-", 1)[1])
    from .services.corpus import CorpusService

    return CorpusService.build(name)


def cmd_make(args, report: RunReport, ctx: CommandContext) -> None:
    petal_length = args.petal_length or ctx.settings.get("petal_length", DEFAULT_PETAL_LENGTH)
    report.input_digest = payload_digest(["make", args.name, args.n, petal_length])
    obj = _make_object(args, petal_length)
    report.results["digest"] = document_digest(obj)
    report.results["kind"] = type(obj).__name__
    if hasattr(obj, "cell_counts"):
        report.counts["cells"] = _counts(obj)
    if args.check and isinstance(obj, (CubeComplex, CellularMap)):
        c = as_cube(obj)
        gromov = gromov_check(c, stop_early=True)
        report.add("gromov", gromov.passed, failures=list(gromov.failures[:1]))
        report.results["homology"] = complex_homology(c).to_dict()
    if args.name.lower() == "fewquot":
        cert = fewquot_certificate(args.n)
        report.results["certificate"] = cert.to_dict()
        report.add("quotient_h1_trivial", cert.h1_trivial)
    if args.emit:
        write_document(args.emit, obj)
        report.results["emitted"] = str(args.emit.name)


def _facets(x: DeltaComplex) -> list[int]:
    covered = {f for faces in x.faces for f in faces}
    return [s for s in range(len(x)) if s not in covered]


def cmd_kt(args, report: RunReport, ctx: CommandContext) -> None:
    kit_name = args.kit or ctx.settings.get("default_kit", "mock")
    report.kit = kit_name
    kit = load_kit(kit_name)
    if args.action == "kit":
        report.input_digest = payload_digest(["kit", kit_name])
        kit_report = validate_kit(kit)
        report.counts["aprime_cells"] = _counts(kit.aprime)
        report.results["kit"] = kit_report.to_dict()
        report.add("kit_acyclic", kit_report.passed)
        if args.emit:
            write_document(args.emit, kit)
        return

    obj, report.input_digest = load_input(args.input)
    if args.action == "map":
        if not isinstance(obj, DeltaMap):
            raise SchemaError("kt map needs a delta_map document.", code="wrong_kind")
        obj.check()
        source = kt_build(kit, obj.source)
        target = kt_build(kit, obj.target)
        image = kt_map(obj, source, target)
        report.counts.update(source=_counts(source.T), target=_counts(target.T))
        report.add("cellular", True, cells=len(image.images))
        if args.emit:
            write_document(args.emit, image)
        return

    x = as_delta(obj)
    r = kt_build(kit, x, with_u=args.with_u, verify=True)
    report.counts.update(x=_counts(x), t=_counts(r.T))
    if r.U is not None:
        report.counts["u"] = _counts(r.U)
    h_t = complex_homology(r.T)
    report.results["homology_t"] = h_t.format()
    report.add("involution", True)
    if args.action == "build":
        if args.emit:
            write_document(args.emit, r.tau)
        return

    facets = _facets(x) if args.properness else ()
    filtration = filtration_check(r, subcomplexes=[(s,) for s in facets], kit=kit if facets else None)
    for row in filtration.rows:
        report.add(f"filtration_{row['k']}", row["ok"], betti=list(row["betti"]), expected=row["expected_rank"])
    report.add("homology_matches_x", filtration.homology_match)
    for extra in filtration.extra:
        report.add(extra["check"], extra["ok"], **{k: v for k, v in extra.items() if k not in ("check", "ok")})
    law = dimension_law(r, fixed=kit.fixed_set_is_a)
    report.add("dimension_law", law["ok"], **{k: v for k, v in law.items() if k != "ok"})
    if args.properness:
        for row in convexity_check(r, [(s,) for s in facets]):
            report.add("convex_preimage", row["convex"], simplices=row["simplices"])
    if args.gromov:
        payload = locally_cat0(r)
        report.add("gromov_t", payload["t"]["passed"])
        if "u" in payload:
            report.add("gromov_u", payload["u"]["passed"])


def cmd_geo(args, report: RunReport, ctx: CommandContext) -> None:
    obj, report.input_digest = load_input(args.input)
    c = as_cube(obj)
    decomposition = hyperplanes(c, check=not args.no_precheck)
    report.counts["hyperplane_pairs"] = len(decomposition.pairs)
    if args.action == "hyperplanes":
        report.results["pairs"] = [sorted(decomposition.edges_of(p)) for p in decomposition.pairs]
        report.add("ascending_chain", ascending_chain_check(c))
    elif args.action == "halfspaces":
        pairs = decomposition.pairs
        if not 0 <= args.pair < len(pairs):
            raise SchemaError(f"No hyperplane pair {args.pair}.", code="out_of_range")
        first, second = halfspaces(c, pairs[args.pair], decomposition)
        report.results["halfspaces"] = [sorted(first), sorted(second)]
        report.add("partition", len(first) + len(second) == len(c.vertices()))
    elif args.action == "hull":
        hull = convex_hull(c, args.cells, decomposition)
        report.results["hull"] = sorted(hull)
        report.add("convex", is_combinatorially_convex(c, hull))
        report.add("idempotent", convex_hull(c, hull, decomposition) == hull)
    elif args.action == "distance":
        pairs = []
        if args.v is not None and args.w is not None:
            pairs.append((args.v, args.w))
        verts = c.vertices()
        rng = random.Random(ctx.settings.get("seed"))
        pairs.extend((rng.choice(verts), rng.choice(verts)) for _ in range(args.samples))
        mismatches = []
        for v, w in pairs:
            d = skeleton_distance(c, v, w)
            h = separating_pairs(c, v, w, decomposition)
            if d != h:
                mismatches.append([v, w, d, h])
        if len(pairs) == 1:
            report.results["distance"] = skeleton_distance(c, *pairs[0])
        report.add("distance_equals_separating_pairs", not mismatches, sampled=len(pairs), mismatches=mismatches[:5])
    else:
        if not isinstance(obj, CellularMap):
            raise SchemaError("fixed-point needs a map document.", code="wrong_kind")
        cell = fixed_point(c, [obj], decomposition)
        report.results["fixed_cell"] = cell
        report.results["dimension"] = c.dims[cell]
        report.add("invariant", obj.images[cell][0] == cell)


def cmd_homology(args, report: RunReport, ctx: CommandContext) -> None:
    obj, report.input_digest = load_input(args.input)
    if isinstance(obj, Presentation):
        groups = presentation_h1_h2(obj)
    else:
        target = obj
        if isinstance(obj, SimplicialComplex):
            target = obj.to_delta()
        elif not isinstance(obj, DeltaComplex):
            target = as_cube(obj)
        groups = complex_homology(target, reduced=args.reduced)
        report.counts["cells"] = _counts(target)
    report.results["homology"] = groups.to_dict()
    report.results["text"] = groups.format()


def cmd_check(args, report: RunReport, ctx: CommandContext) -> None:
    if args.what == "kit":
        kit_name = args.kit or ctx.settings.get("default_kit", "mock")
        report.kit = kit_name
        report.input_digest = payload_digest(["kit", kit_name])
        result = validate_kit(load_kit(kit_name))
        report.results["kit"] = result.to_dict()
        report.add("kit", result.passed)
        return
    obj, report.input_digest = load_input(args.input)
    if args.what == "presentation":
        if not isinstance(obj, Presentation):
            raise SchemaError("Expected a presentation.", code="wrong_kind")
        groups = presentation_h1_h2(obj)
        report.results["homology"] = groups.to_dict()
        report.add("h1_h2_trivial", groups[1].trivial and groups[2].trivial)
        if obj.generator_permutation is not None:
            report.add("trivializing_reduction", trivializing_reduction_check(quotient_presentation(obj)))
        return
    if args.what == "category":
        x = as_delta(obj)
        report.add("category_c", category_c_check(x))
        return
    if args.what == "acyclic":
        target = as_delta(obj) if isinstance(obj, (DeltaComplex, SimplicialComplex)) else as_cube(obj)
        report.add("acyclic", is_acyclic(target))
        return
    c = as_cube(obj)
    for _ in range(args.subdivide):
        c = cubical_subdivision(c)[0]
    report.counts["cells"] = _counts(c)
    if args.what == "gromov":
        result = gromov_check(c)
        report.add("gromov", result.passed, failures=list(result.failures[:3]))
        if isinstance(obj, Involution):
            check_involution(obj)
    else:
        result = cubicality_check(c)
        report.results["cubicality"] = result.to_dict()
        report.add("cubical", result.cubical)


def cmd_corpus(args, report: RunReport, ctx: CommandContext) -> None:
    from .services.corpus import CorpusService

    service = CorpusService(args.dir or ctx.corpus_dir or Path.cwd() / "corpus")
    report.input_digest = payload_digest(["corpus", args.action, args.heavy])
    if args.action == "list":
        report.results["fixtures"] = service.names(include_heavy=True)
    elif args.action == "write":
        digests = service.write(include_heavy=args.heavy)
        report.counts["written"] = len(digests)
        report.results["manifest"] = digests
    else:
        for check in service.verify():
            report.add(f"fixture_{check.name}", check.ok, reason=check.reason)


COMMANDS = {
    "polygon": cmd_polygon,
    "make": cmd_make,
    "kt": cmd_kt,
    "geo": cmd_geo,
    "homology": cmd_homology,
    "check": cmd_check,
    "corpus": cmd_corpus,
}


def command_name(args) -> str:
    for attr in ("action", "what"):
        value = getattr(args, attr, None)
        if value:
            return f"{args.command} {value}"
    return str(args.command)


def execute(args, ctx: CommandContext) -> RunReport:
    """Run one library command; input and mathematical errors become part of the report."""
    report = RunReport(command=command_name(args), input_digest="")
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args, report, ctx)
    except KanThurstonError as exc:
        LOGGER.warning("%s: %s", report.command, exc)
        report.error = exc.to_dict()
        if not report.input_digest:
            report.input_digest = payload_digest([report.command, str(getattr(args, "input", ""))])
    report.timings["total_s"] = round(time.perf_counter() - started, 6)
    return report


def render(report: RunReport, fmt: str) -> str:
    return report.to_json() if fmt == "json" else report.to_text()
