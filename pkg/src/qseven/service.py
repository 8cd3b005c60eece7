"""HTTP facade over the sweep runner.

The CLI talks to this app in process by default; running it under uvicorn
gives the same interface over the network.  All heavy lifting stays in
sweeps/quartic; handlers only translate between JSON and RunConfig.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import cache as unit_cache
from .arith import is_prime
from .quartic import find_fundamental_unit, maximal_order, seed_unit
from .realquad import DEFAULT_BIT_BUDGET, BudgetSkip
from .sweeps import (
    RESIDUE_CLASSES,
    SUITES,
    RunConfig,
    exit_code,
    run,
    serialize_record,
    status_counts,
)

VERSION = unit_cache.TOOL_VERSION.split("/", 1)[1]


class RunRequest(BaseModel):
    q_min: int = 1
    q_max: int = 200
    residue: str = "7mod8"
    suites: list[str] = Field(default_factory=lambda: list(SUITES))
    padic_prec: int = 192
    float_prec: int = 128
    jobs: int = 1
    cache: str | None = None
    timing: bool = False
    unit_budget: float | None = None
    pell_bits: int = DEFAULT_BIT_BUDGET


class RunReport(BaseModel):
    exit_code: int
    counts: dict[str, int]
    records: list[dict]


app = FastAPI(title="qseven", version=VERSION)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": VERSION}


@app.get("/suites")
def suites() -> dict:
    return {"suites": list(SUITES), "residues": list(RESIDUE_CLASSES)}


@app.post("/verify", response_model=RunReport)
def verify(req: RunRequest) -> dict:
    cfg = RunConfig(
        q_min=req.q_min,
        q_max=req.q_max,
        residue_class=req.residue,
        padic_prec=req.padic_prec,
        float_prec=req.float_prec,
        jobs=req.jobs,
        suites=tuple(req.suites),
        cache_path=req.cache,
        timing=req.timing,
        unit_budget=req.unit_budget,
        pell_bits=req.pell_bits,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    records = run(cfg)
    return {
        "exit_code": exit_code(records),
        "counts": status_counts(records),
        "records": [serialize_record(r) for r in records],
    }


@app.get("/unit/{q}")
def unit(q: int, budget: float | None = None, cache: str | None = None) -> dict:
    """Certified fundamental unit of the quartic field for one prime."""
    if q < 7 or q % 8 != 7 or not is_prime(q):
        raise HTTPException(status_code=422, detail="q must be a prime that is 7 mod 8")
    field = maximal_order(q)
    if cache:
        got = unit_cache.lookup(cache, q, field)
        if got is not None:
            seed_unit(got)
    try:
        cert = find_fundamental_unit(q, budget)
    except BudgetSkip as exc:
        raise HTTPException(status_code=503, detail=str(exc))
    if cache and unit_cache.lookup(cache, q, field) is None:
        unit_cache.store(cache, field, cert)
    return {
        "q": q,
        "coordinates": [str(c) for c in cert.u],
        "regulator": cert.regulator,
        "certified": cert.certified,
        "enumeration_radius": cert.enumeration_radius,
    }
