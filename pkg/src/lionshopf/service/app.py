"""FastAPI service exposing the library: enumeration, identity verification,
lifts, convergence experiments and metric reports.

Enumerations are cached per truncation parameters (the underlying tables are
immutable once computed); every stochastic endpoint takes an explicit seed
and echoes it, so responses are reproducible."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..empirical import EmpiricalError, lln_experiment, make_sampler
from ..forest import (
    ForestError,
    canonical_key,
    dual_forest,
    forest_from_json,
    forest_to_json,
    enumerate_forests,
    grading,
    weight,
)
from ..hopf import SampleAssignment
from ..metrics import DualPair, MetricError, rho_estimate
from ..pathlift import (
    LiftCharacter,
    PathError,
    PiecewiseLinearPath,
    tree_integral_from_assignment,
)
from ..verify import run_hopf_verification
from .schemas import (
    CatalogEntry,
    EnumerateRequest,
    EnumerateResponse,
    ForestPayload,
    HopfVerifyRequest,
    HopfVerifyResponse,
    LiftRequest,
    LiftResponse,
    LLNRequest,
    LLNResponse,
    MetricRequest,
    MetricResponse,
)

app = FastAPI(title="lionshopf", version=__version__)

_catalog_cache = {}


def _bad_request(exc):
    raise HTTPException(status_code=422, detail=str(exc))


def _parse_forest(payload: ForestPayload):
    try:
        return forest_from_json(payload.model_dump())
    except ForestError as exc:
        _bad_request(exc)


def _parse_path(payload):
    try:
        return PiecewiseLinearPath.from_rows(payload.rows)
    except PathError as exc:
        _bad_request(exc)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/enumerate", response_model=EnumerateResponse)
def enumerate_endpoint(req: EnumerateRequest):
    key = (req.gamma, req.alpha, req.beta, req.d)
    if key not in _catalog_cache:
        try:
            forests = enumerate_forests(req.gamma, req.alpha, req.beta, req.d)
        except ForestError as exc:
            _bad_request(exc)
        entries = []
        for T in forests:
            dual = dual_forest(T)
            entries.append(CatalogEntry(
                key=canonical_key(T).hex(),
                nodes=len(T.nodes),
                grading=grading(T),
                weight=weight(T, req.alpha, req.beta),
                forest=ForestPayload(**forest_to_json(T)),
                dual_edges=list(dual.edges),
            ))
        _catalog_cache[key] = entries
    entries = _catalog_cache[key]
    return EnumerateResponse(params=req, count=len(entries), entries=entries)


@app.post("/hopf/verify", response_model=HopfVerifyResponse)
def hopf_verify_endpoint(req: HopfVerifyRequest):
    report = run_hopf_verification(
        max_nodes=req.max_nodes, d=req.d, seed=req.seed, samples=req.samples,
        tol_inverse=req.tol_inverse, tol_agree=req.tol_agree,
        tamper=req.tamper)
    return HopfVerifyResponse(params=req, passed=report["passed"],
                              identities=report["identities"])


@app.post("/lift", response_model=LiftResponse)
def lift_endpoint(req: LiftRequest):
    T = _parse_forest(req.forest)
    tagged = _parse_path(req.tagged_path)
    blocks = [_parse_path(p) for p in req.block_paths]
    if len(blocks) != len(T.hyperedges):
        _bad_request(f"forest has {len(T.hyperedges)} hyperedges but "
                     f"{len(blocks)} block paths were supplied")
    try:
        value = tree_integral_from_assignment(
            T, SampleAssignment(tagged, blocks), req.s, req.t,
            max_order=req.max_order)
    except PathError as exc:
        _bad_request(exc)
    import numpy as np

    arr = np.asarray(value)
    return LiftResponse(shape=list(arr.shape), tensor=arr.tolist(),
                        slot_nodes=sorted(T.nodes), s=req.s, t=req.t)


@app.post("/lln", response_model=LLNResponse)
def lln_endpoint(req: LLNRequest):
    try:
        sampler = make_sampler(req.distribution.as_spec())
    except EmpiricalError as exc:
        _bad_request(exc)
    if req.trees:
        trees = [_parse_forest(p) for p in req.trees]
    else:
        # default: the smallest tree mixing the tagged and an untagged slot
        from ..forest import LionsForest

        trees = [LionsForest(range(2), {0: None, 1: 0}, {0: 1, 1: 1},
                             [0], [[1]])]
    dp = req.dual_pair
    try:
        pair = DualPair(p1=dp.p1, qprime=dp.qprime, gamma=dp.gamma,
                        alpha=dp.alpha, beta=dp.beta)
        out = lln_experiment(sampler, trees, req.tagged_index, req.n_grid,
                             req.replications, dual_pair=pair,
                             atoms=req.atoms, grid_level=req.grid_level,
                             seed=req.seed, threads=req.threads)
    except (EmpiricalError, MetricError) as exc:
        _bad_request(exc)
    return LLNResponse(params=req, rows=out["rows"],
                       endpoint_gap=out["endpoint_gap"],
                       endpoint_gap_stderr=out["endpoint_gap_stderr"],
                       endpoint_confident=out["endpoint_confident"],
                       monotone_trend=out["monotone_trend"])


@app.post("/metric", response_model=MetricResponse)
def metric_endpoint(req: MetricRequest):
    atoms_v = [_parse_path(p) for p in req.atoms_v]
    atoms_w = [_parse_path(p) for p in req.atoms_w]
    tagged = _parse_path(req.tagged_path)
    trees = [_parse_forest(p) for p in req.trees]
    dp = req.dual_pair
    try:
        pair = DualPair(p1=dp.p1, qprime=dp.qprime, gamma=dp.gamma,
                        alpha=dp.alpha, beta=dp.beta)
        out = rho_estimate(lambda s, t: LiftCharacter(s, t), atoms_v, atoms_w,
                           tagged, trees, pair, grid_level=req.grid_level,
                           method=req.method, rng=req.seed)
    except MetricError as exc:
        _bad_request(exc)
    return MetricResponse(params=req, value=out["value"],
                          identity_value=out["identity_value"],
                          permutation=out["permutation"],
                          method=out["method"], grid_level=out["grid_level"],
                          atoms=out["atoms"])
