"""Subcommand implementations shared by the command line and the HTTP service.

Each handler takes the source texts of a run (keyed by role), its validated
parameter model and the source names used in diagnostics, and returns an
``Outcome``; ``run`` wraps it in a versioned ``Report``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from pydantic import BaseModel, ValidationError

from sc_forge.config import get_settings
from sc_forge.constants import CERT_EXACT, CERT_FINITE
from sc_forge.construct import (
    Construction,
    ConstructionParams,
    ConstructionReport,
    build_presentation,
    find_min_v,
    obstruction_ratio_table,
    verify_construction,
    verify_morse_path,
)
from sc_forge.errors import InputError, InternalInvariantError, UnknownSubcommandError
from sc_forge.functions import FunctionSpec, parse_rational
from sc_forge.hypgeo import (
    EmbeddedCycle,
    MetricGraph,
    compute_delta,
    exhaustive_subsegment_oracle,
    find_short_subsegment,
    required_cycle_length,
    subdivide,
)
from sc_forge.ipsc import (
    Decomposition,
    DecompositionPart,
    IpscWitness,
    check_combination_decomposition,
    check_ipsc_witness,
    derive_n_prime_sequence,
)
from sc_forge.morse import MIN_PROBE_TMAX, check_geodesic_criterion, intersection_function, parse_path, sublinearity_probe
from sc_forge.pieces import FAIL, PASS, CPrimeVerdict, PieceWitness, check_c_prime, check_c_prime_f, enumerate_pieces
from sc_forge.reports import (
    CheckScParams,
    ConstructParams,
    DeltaParams,
    IpscDecompParams,
    IpscNPrimeParams,
    IpscWitnessParams,
    PiecesParams,
    Report,
    RhoParams,
    RunConfig,
    SubsegmentParams,
    WpParams,
)
from sc_forge.textformat import dump_presentation, parse_cycle, parse_edges, parse_presentation
from sc_forge.wordproblem import IDENTITY, dehn_reduce, is_identity_bfs
from sc_forge.words import Presentation

logger = logging.getLogger(__name__)

OK = "OK"


@dataclass
class Outcome:
    verdict: str
    certificate: str
    result: dict[str, Any]


@dataclass(frozen=True)
class Subcommand:
    name: str
    params: type[BaseModel]
    sources: tuple[str, ...]
    handler: Callable[[dict[str, str], Any, dict[str, str]], Outcome]


def _frac(value: Fraction | int) -> str:
    return str(Fraction(value))


def _presentation(sources: dict[str, str], role: str, names: dict[str, str]) -> Presentation:
    return parse_presentation(sources[role], source=names.get(role, role))


def _witness(presentation: Presentation, witness: Optional[PieceWitness]) -> Optional[dict[str, Any]]:
    if witness is None:
        return None
    show = presentation.show
    return {
        "piece": show(witness.piece),
        "length": witness.length,
        "element": show(witness.element),
        "partner": show(witness.partner),
        "relator": witness.relator,
        "partnerRelator": witness.partner_relator,
    }


def _c_prime(presentation: Presentation, verdict: CPrimeVerdict) -> dict[str, Any]:
    return {
        "verdict": verdict.verdict,
        "perRelator": [
            {"relator": presentation.show(row.relator), "len": row.length, "maxPiece": row.max_piece, "bound": _frac(row.bound)}
            for row in verdict.rows
        ],
        "violations": [_witness(presentation, w) for w in verdict.violations],
    }


# --- pieces and words -----------------------------------------------------------


def run_pieces(sources: dict[str, str], params: PiecesParams, names: dict[str, str]) -> Outcome:
    presentation = _presentation(sources, "presentation", names)
    table = enumerate_pieces(presentation)
    result: dict[str, Any] = {
        "symmetrized": len(table.entries),
        "relators": [
            {
                "relator": presentation.show(r.word),
                "len": len(r),
                "maxPiece": table.max_piece_len(i),
                "witness": _witness(presentation, table.relator_witness(i)),
            }
            for i, r in enumerate(presentation.relators)
        ],
    }
    if params.full:
        result["maximalPieces"] = [_witness(presentation, w) for w in table.maximal_pieces()]
    return Outcome(OK, CERT_EXACT, result)


def run_check_sc(sources: dict[str, str], params: CheckScParams, names: dict[str, str]) -> Outcome:
    presentation = _presentation(sources, "presentation", names)
    if params.lam is not None:
        verdict = check_c_prime(presentation, parse_rational(params.lam))
        bound = f"lambda={_frac(parse_rational(params.lam))}"
    else:
        f = FunctionSpec.parse(params.f, viable=True)
        verdict = check_c_prime_f(presentation, f)
        bound = f"f={f.describe()}"
    result = _c_prime(presentation, verdict)
    result["condition"] = bound
    return Outcome(verdict.verdict, CERT_EXACT, result)


def run_wp(sources: dict[str, str], params: WpParams, names: dict[str, str]) -> Outcome:
    presentation = _presentation(sources, "presentation", names)
    word = presentation.alphabet.parse_word(params.word)
    reduced, trace = dehn_reduce(word, presentation)
    show = presentation.show
    result: dict[str, Any] = {
        "word": show(word),
        "reduced": show(reduced),
        "trivial": not reduced,
        "steps": [
            {"position": s.position, "relator": show(s.relator), "replaced": s.replaced, "replacement": s.replacement}
            for s in trace.steps
        ],
    }
    if not params.oracle:
        return Outcome(OK, CERT_EXACT, result)
    longest = max((len(r) for r in presentation.relators), default=0)
    radius = params.radius if params.radius is not None else len(word) + longest
    bfs = is_identity_bfs(word, presentation, radius, params.cap)
    agree = not (bfs.verdict == IDENTITY and reduced)
    result["oracle"] = {"verdict": bfs.verdict, "radius": radius, "explored": bfs.explored, "cap": bfs.cap, "agree": agree}
    return Outcome(PASS if agree else FAIL, CERT_EXACT, result)


def run_rho(sources: dict[str, str], params: RhoParams, names: dict[str, str]) -> Outcome:
    presentation = _presentation(sources, "presentation", names)
    path = parse_path(params.path, presentation.alphabet, params.tmax)
    table = intersection_function(path, presentation, params.tmax)
    geodesic = check_geodesic_criterion(table)
    changes = []
    previous = 0
    for t in range(1, params.tmax + 1):
        value = table.rho(t)
        if value != previous:
            witness = table.witness(t)
            changes.append({
                "t": t,
                "rho": value,
                "relator": presentation.show(presentation.relators[witness.relator].word),
                "subword": presentation.show(witness.subword),
            })
            previous = value
    result: dict[str, Any] = {
        "tmax": params.tmax,
        "pathLength": len(path),
        "rho": list(table.values),
        "changes": changes,
        "geodesic": {"verdict": geodesic.verdict, "firstFailure": geodesic.first_failure},
        "probe": None,
    }
    if params.tmax >= MIN_PROBE_TMAX:
        probe = sublinearity_probe(table)
        result["probe"] = {
            "verdict": probe.verdict,
            "certificate": probe.certificate,
            "note": probe.note,
            "maxRatio": _frac(probe.max_ratio),
            "maxRatioAt": probe.max_ratio_at,
            "growthExponent": probe.growth_exponent,
            "scales": [{"exponent": s.exponent, "start": s.start, "stop": s.stop, "ratio": _frac(s.ratio)} for s in probe.scales],
        }
    return Outcome(geodesic.verdict, CERT_EXACT, result)


# --- IPSC certificates --------------------------------------------------------------


def run_ipsc_witness(sources: dict[str, str], params: IpscWitnessParams, names: dict[str, str]) -> Outcome:
    presentation = _presentation(sources, "presentation", names)
    witness = IpscWitness(
        relator=presentation.alphabet.parse_word(params.relator),
        split=params.split,
        i=params.i,
        n_i=params.n_i,
        f=FunctionSpec.parse(params.f, viable=True),
    )
    verdict = check_ipsc_witness(witness, presentation)
    result = {
        "x": presentation.show(witness.x),
        "y": presentation.show(witness.y),
        "longEnough": verdict.long_enough,
        "longPrefix": verdict.long_prefix,
        "pairCondition": _c_prime(presentation, verdict.pair_condition),
        "member": verdict.member,
    }
    return Outcome(verdict.verdict, verdict.certificate, result)


def run_ipsc_decomp(sources: dict[str, str], params: IpscDecompParams, names: dict[str, str]) -> Outcome:
    base = _presentation(sources, "presentation", names)
    alphabet = base.alphabet
    decomposition = Decomposition(
        relator=alphabet.parse_word(params.relator),
        parts=tuple(
            DecompositionPart(alphabet.parse_word(p.u), alphabet.parse_word(p.r), alphabet.parse_word(p.v))
            for p in params.parts
        ),
        N=params.N,
        B=params.B,
        rho=FunctionSpec.parse(params.rho),
    )
    verdict = check_combination_decomposition(decomposition, base)
    result = {
        "k": decomposition.k,
        "parts": [
            {
                "index": part.index,
                "prefix": part.prefix,
                "longPrefix": part.long_prefix,
                "similarSize": part.similar_size,
                "shortFiller": part.short_filler,
            }
            for part in verdict.parts
        ],
        "failures": verdict.failures,
    }
    return Outcome(verdict.verdict, verdict.certificate, result)


def run_ipsc_nprime(sources: dict[str, str], params: IpscNPrimeParams, names: dict[str, str]) -> Outcome:
    rho = FunctionSpec.parse(params.rho)
    sequence = derive_n_prime_sequence(rho, params.N, params.B, params.n, params.count)
    result = {"rho": rho.describe(), "N": params.N, "B": params.B, "nPrime": sequence}
    return Outcome(OK, CERT_FINITE, result)


# --- construction ----------------------------------------------------------------


def _construction_summary(construction: Construction) -> dict[str, Any]:
    show = construction.presentation.show
    params = construction.params
    return {
        "params": {
            "N": params.N, "M": params.M, "L": params.L, "U": params.U, "V": params.V,
            "f": params.f.describe(), "g": params.g.describe(), "strict": params.strict,
            "lambda": _frac(params.lam),
        },
        "maxBaseLen": construction.max_base_len,
        "vacuous": construction.vacuous,
        "R1": [
            {"relator": show(r.word), "length": len(r), "windows": len(construction.windows[i])}
            for i, r in enumerate(construction.base.relators)
            if i in construction.windows
        ],
        "relators": [
            {
                "index": n,
                "base": show(c.base),
                "w": show(c.w),
                "aPower": c.a_power,
                "iw": c.start_index,
                "length": c.length,
            }
            for n, c in enumerate(construction.relators)
        ],
    }


def _verification(report: ConstructionReport) -> dict[str, Any]:
    construction = report.construction
    show = construction.presentation.show
    t_check, bounds = report.t_word_check, report.length_bound
    result: dict[str, Any] = {
        "tWords": {
            "verdict": t_check.verdict,
            "shortTWords": t_check.short_t_words,
            "relativeTWords": t_check.relative_t_words,
            "indexBound": t_check.index_bound,
            "fresh": t_check.fresh,
            "violations": t_check.violations,
        },
        "lengthBound": {
            "verdict": bounds.verdict,
            "additive": bounds.additive,
            "upper": bounds.upper,
            "lower": bounds.lower,
            "violations": bounds.violations,
        },
        "smallCancellation": None,
        "decompositions": None,
        "notes": report.notes,
    }
    if report.small_cancellation is not None:
        sc_check = report.small_cancellation
        result["smallCancellation"] = {
            "verdict": sc_check.verdict,
            "lambda": _frac(sc_check.lam),
            "cPrime": _c_prime(construction.presentation, sc_check.c_prime),
            "casesHold": sc_check.cases_hold,
            "agree": sc_check.agree,
            "caseViolations": [
                {"case": v.case, "relator": show(v.relator), "piece": v.piece, "window": v.window, "partner": show(v.partner)}
                for v in sc_check.case_violations
            ],
        }
    if report.decompositions is not None:
        summary = report.decompositions
        result["decompositions"] = {
            "verdict": summary.verdict,
            "B": summary.B,
            "rho": summary.rho.describe(),
            "k": construction.params.M,
            "checked": summary.checked,
            "failures": summary.failures,
        }
    return result


def run_construct(sources: dict[str, str], params: ConstructParams, names: dict[str, str]) -> Outcome:
    base = _presentation(sources, "base", names)
    extra: dict[str, Any] = {"f": FunctionSpec.parse(params.f), "strict": params.strict}
    if params.g is not None:
        extra["g"] = FunctionSpec.parse(params.g)
    construction_params = ConstructionParams.parse(params.params, **extra)

    min_v = None
    if params.find_min_v:
        search = find_min_v(base, construction_params, params.max_base_len)
        report = search.report
        min_v = {
            "V": search.V,
            "vacuous": search.vacuous,
            "evaluated": [{"V": V, "verdict": verdict, "failing": failing} for V, verdict, failing in search.evaluated],
        }
    else:
        report = verify_construction(build_presentation(base, construction_params, params.max_base_len))
    construction = report.construction

    t_max = params.tmax or 2 * params.max_base_len
    morse = verify_morse_path(construction, t_max)
    ratios = obstruction_ratio_table(construction.lengths(), construction.params.f, construction.params.g, construction.params.M)

    result = _construction_summary(construction)
    result.update(_verification(report))
    result["minV"] = min_v
    result["morsePath"] = {
        "verdict": morse.verdict,
        "tmax": morse.t_max,
        "values": sorted(morse.values),
        "expected": sorted(morse.expected),
        "valuesMatch": morse.values_match,
        "witnessesSynthetic": morse.witnesses_synthetic,
        "geodesic": {"verdict": morse.geodesic.verdict, "firstFailure": morse.geodesic.first_failure},
        "probe": None if morse.probe is None else {
            "verdict": morse.probe.verdict,
            "certificate": morse.probe.certificate,
            "maxRatio": _frac(morse.probe.max_ratio),
            "growthExponent": morse.probe.growth_exponent,
        },
    }
    result["obstruction"] = {
        "thresholdIndex": ratios.threshold_index,
        "rows": [
            {"length": row.length, "f": _frac(row.f_value), "lower": _frac(row.lower), "upper": _frac(row.upper)}
            for row in ratios.rows
        ],
    }
    result["presentation"] = dump_presentation(construction.presentation)
    verdict = PASS if report.verdict == PASS and morse.verdict == PASS else FAIL
    return Outcome(verdict, CERT_EXACT, result)


# --- hyperbolic graphs ----------------------------------------------------------


def _graph(sources: dict[str, str], names: dict[str, str]) -> MetricGraph:
    return MetricGraph.from_edges(parse_edges(sources["graph"], source=names.get("graph", "graph")))


def run_delta(sources: dict[str, str], params: DeltaParams, names: dict[str, str]) -> Outcome:
    graph = _graph(sources, names)
    delta = compute_delta(graph)
    result = {
        "delta": _frac(delta),
        "vertices": len(graph),
        "edges": graph.graph.number_of_edges(),
        "tree": graph.is_tree,
    }
    return Outcome(OK, CERT_EXACT, result)


def run_subsegment(sources: dict[str, str], params: SubsegmentParams, names: dict[str, str]) -> Outcome:
    graph = _graph(sources, names)
    labels = parse_cycle(sources["cycle"], source=names.get("cycle", "cycle"))
    cycle = EmbeddedCycle.from_labels(labels, graph)
    graph, cycle = subdivide(graph, params.subdivide, cycle)
    g = FunctionSpec.parse(params.g)
    delta = parse_rational(params.delta) if params.delta is not None else compute_delta(graph)
    witness = find_short_subsegment(cycle, graph, params.u, g, delta)
    n = len(cycle)
    result: dict[str, Any] = {
        "cycleLength": n,
        "delta": _frac(delta),
        "U": params.u,
        "L": 32 * params.u,
        "requiredLength": required_cycle_length(delta, params.u, g),
        "g": _frac(g.value(n)),
        "witness": {
            "start": witness.start,
            "end": witness.end,
            "length": witness.length,
            "endpointDistance": witness.endpoint_distance,
            "valid": witness.valid,
        },
        "oracle": None,
    }
    if params.oracle:
        found = exhaustive_subsegment_oracle(cycle, graph, params.u, 32 * params.u, g)
        if found is None:
            raise InternalInvariantError("exhaustive scan found no subsegment although the finder did")
        result["oracle"] = {"start": found.start, "length": found.length, "endpointDistance": found.endpoint_distance}
    return Outcome(PASS, CERT_EXACT, result)


SUBCOMMANDS: dict[str, Subcommand] = {
    command.name: command
    for command in (
        Subcommand("pieces", PiecesParams, ("presentation",), run_pieces),
        Subcommand("check-sc", CheckScParams, ("presentation",), run_check_sc),
        Subcommand("wp", WpParams, ("presentation",), run_wp),
        Subcommand("rho", RhoParams, ("presentation",), run_rho),
        Subcommand("ipsc-witness", IpscWitnessParams, ("presentation",), run_ipsc_witness),
        Subcommand("ipsc-decomp", IpscDecompParams, ("presentation",), run_ipsc_decomp),
        Subcommand("ipsc-nprime", IpscNPrimeParams, (), run_ipsc_nprime),
        Subcommand("construct", ConstructParams, ("base",), run_construct),
        Subcommand("delta", DeltaParams, ("graph",), run_delta),
        Subcommand("subsegment", SubsegmentParams, ("graph", "cycle"), run_subsegment),
    )
}


def run(
    subcommand: str,
    sources: dict[str, str],
    params: dict[str, Any],
    inputs: Optional[dict[str, str]] = None,
    output: Optional[str] = None,
    report_path: Optional[str] = None,
    seed: Optional[int] = None,
) -> Report:
    """Validate, run one subcommand and wrap its outcome in a report"""
    command = SUBCOMMANDS.get(subcommand)
    if command is None:
        raise UnknownSubcommandError(f"unknown subcommand {subcommand!r}")
    missing = [role for role in command.sources if role not in sources]
    if missing:
        raise InputError(f"{subcommand} needs source(s): {', '.join(missing)}")
    try:
        model = command.params.model_validate(params)
        config = RunConfig(
            subcommand=subcommand,
            inputs=inputs or {},
            params=model.model_dump(by_alias=True, exclude_none=True),
            output=output,
            report=report_path,
            seed=seed,
            threads=get_settings().threads,
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        where = ".".join(str(part) for part in error["loc"]) or subcommand
        raise InputError(f"invalid parameters for {subcommand}: {where}: {error['msg']}") from exc
    logger.info("running %s", subcommand)
    outcome = command.handler(sources, model, inputs or {})
    return Report(
        subcommand=subcommand,
        config=config,
        certificate=outcome.certificate,
        verdict=outcome.verdict,
        result=outcome.result,
    )
