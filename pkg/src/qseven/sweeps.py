"""Prime-family sweeps: run the per-q certification suites and aggregate.

Each prime gets one record.  A failed check in any suite marks the whole
record failed; a computation that gives up because a budget ran out marks the
suite skipped, which is reported but is not a failure.  Workers are pure per
q, so records can be computed in parallel; cache writes happen only in the
parent process.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dfield
from time import perf_counter

from . import cache
from .arith import primes_in_class
from .imquad import generator_residue_check, hasse_check
from .iwasawa import cw_inputs_d, cw_inputs_f, cw_inputs_fstar, cw_valuation, xstar_structure
from .lseries import DEFAULT_FLOAT_PREC, simple_zero_criterion
from .padic2 import DEFAULT_PREC, primes_above_q_count
from .quartic import find_fundamental_unit, maximal_order, ord_log_eta, seed_unit
from .realquad import DEFAULT_BIT_BUDGET, BudgetSkip, cm_unit_index, trace_tests

SUITES = ("units", "classgroups", "hasse", "iwasawa", "lseries")
RESIDUE_CLASSES = ("7mod16", "15mod16", "7mod8")
SCHEMA = "qrec/1"


@dataclass
class RunConfig:
    q_min: int = 1
    q_max: int = 200
    residue_class: str = "7mod8"
    padic_prec: int = DEFAULT_PREC
    float_prec: int = DEFAULT_FLOAT_PREC
    jobs: int = 1
    suites: tuple = SUITES
    cache_path: str | None = None
    output_format: str = "json"
    timing: bool = False
    unit_budget: float | None = None  # sliding-scan window budget, log units
    pell_bits: int = DEFAULT_BIT_BUDGET

    def validate(self) -> None:
        if self.q_min > self.q_max:
            raise ValueError("q_min must not exceed q_max")
        if self.residue_class not in RESIDUE_CLASSES:
            raise ValueError(f"residue_class must be one of {RESIDUE_CLASSES}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if not self.suites:
            raise ValueError("at least one suite is required")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ValueError(f"unknown suites: {bad}")
        if not 64 <= self.padic_prec <= 1 << 16:
            raise ValueError("padic_prec must be between 64 and 65536 bits")
        if not 64 <= self.float_prec <= 1 << 14:
            raise ValueError("float_prec must be between 64 and 16384 bits")
        if self.output_format not in ("json", "csv", "md"):
            raise ValueError("output_format must be json, csv or md")
        if self.unit_budget is not None and self.unit_budget <= 0:
            raise ValueError("unit_budget must be positive")
        if self.pell_bits < 64:
            raise ValueError("pell_bits must be at least 64")


@dataclass
class QRecord:
    q: int
    residue_class: str
    results: dict = dfield(default_factory=dict)
    certified: dict = dfield(default_factory=dict)
    skipped: dict = dfield(default_factory=dict)
    failed: dict = dfield(default_factory=dict)
    seconds: dict = dfield(default_factory=dict)
    status: str = "ok"

    def settle_status(self) -> None:
        if self.failed:
            self.status = "fail"
        elif self.skipped:
            self.status = "skip"
        else:
            self.status = "ok"


def primes_for(cfg: RunConfig) -> list[int]:
    if cfg.residue_class == "7mod16":
        return primes_in_class(cfg.q_min, cfg.q_max, 7, 16)
    if cfg.residue_class == "15mod16":
        return primes_in_class(cfg.q_min, cfg.q_max, 15, 16)
    return primes_in_class(cfg.q_min, cfg.q_max, 7, 8)


def _require(ok: bool, message: str) -> None:
    if not ok:
        raise ArithmeticError(message)


def _suite_units(q: int, cfg: RunConfig) -> dict:
    rep = ord_log_eta(q, prec=cfg.padic_prec, t_budget=cfg.unit_budget)
    _require(rep["expected_ok"], f"log valuations {rep['tuple']} out of range")
    tr = trace_tests(q, cfg.pell_bits)
    _require(tr["ok"], "trace congruence or valuation check failed")
    cm = cm_unit_index(q, cfg.padic_prec, cfg.pell_bits)
    _require(cm["ok"], "CM unit identity or log valuation check failed")
    return {
        "tuple": list(rep["tuple"]),
        "ords": dict(rep["ords"]),
        "prec": rep["prec"],
        "regulator": rep["regulator"],
        "unit_certified": rep["certified"],
        "trace_ord": tr["ord2_trace"],
        "trace_congruence_ok": tr["congruence_ok"],
        "y_square_1_mod_16": tr["y_square_1_mod_16"],
        "ord_log_eps": cm["ord_log_eps"],
        "ord_log_xi": cm["ord_log_xi"],
        "cm_identity_ok": cm["identity_ok"],
    }


def _suite_classgroups(q: int, cfg: RunConfig) -> dict:
    r_q = primes_above_q_count(q)
    gen = generator_residue_check(q)
    _require(gen["ok"], f"generator residue {gen['residue_mod8']} not {gen['expected']}")
    return {
        "r_q": r_q,
        "prime2_class_order": gen["t"],
        "pi_residue_mod8": gen["residue_mod8"],
        "pi_expected": gen["expected"],
    }


def _suite_hasse(q: int, cfg: RunConfig) -> dict:
    rep = hasse_check(q)
    _require(rep["ok"], f"2-part {rep['two_part']} cyclic={rep['cyclic']} out of range")
    return {
        "h": rep["h"],
        "disc": rep["disc"],
        "two_part": rep["two_part"],
        "cyclic": rep["cyclic"],
    }


def _suite_iwasawa(q: int, cfg: RunConfig) -> dict:
    gal = xstar_structure(q, prec=cfg.padic_prec, t_budget=cfg.unit_budget)
    cw_f = cw_valuation(cw_inputs_f(q, cfg.padic_prec, t_budget=cfg.unit_budget))
    cw_d = cw_valuation(cw_inputs_d(q, cfg.padic_prec, cfg.pell_bits))
    out = {
        "free_rank": gal.free_rank,
        "divisors": list(gal.elementary_divisors),
        "torsion_order": gal.torsion_order(),
        "cw_f": cw_f,
        "cw_d": cw_d,
    }
    if q % 16 == 7:
        cw_fstar = cw_valuation(cw_inputs_fstar(q, cfg.padic_prec, t_budget=cfg.unit_budget))
        _require(gal.is_cyclic_torsion(), f"torsion {gal.elementary_divisors} not cyclic")
        _require(gal.torsion_order() == 1 << cw_fstar, "torsion order disagrees with the index valuation")
        _require(cw_f == 0 and cw_d == 0, f"nontrivial index on the split side: {cw_f}, {cw_d}")
        out["cw_fstar"] = cw_fstar
        out["xstar_order_or_r"] = gal.torsion_order()
    else:
        r = gal.elementary_divisors[-1].bit_length() - 1
        _require(gal.elementary_divisors[0] == 2 and len(gal.elementary_divisors) == 2,
                 f"split shape {gal.elementary_divisors} is not Z/2 x Z/2^r")
        _require(r >= 2, f"exponent r={r} below 2")
        _require(cw_f >= 3, f"index valuation {cw_f} below 3 in the split class")
        _require(cw_d >= 1, f"CM index valuation {cw_d} not positive")
        out["cw_fstar"] = None
        out["xstar_order_or_r"] = r
    return out


def _suite_lseries(q: int, cfg: RunConfig) -> dict:
    rep = simple_zero_criterion(q, prec=cfg.float_prec)
    _require(rep.verdict, f"bound comparison failed at W={rep.W}")
    return {
        "W": rep.W,
        "u_lower": rep.u_lower,
        "v_upper_truncated": rep.v_upper_truncated,
        "v_upper_chain": rep.v_upper_chain,
        "verdict": rep.verdict,
    }


_RUNNERS = {
    "units": _suite_units,
    "classgroups": _suite_classgroups,
    "hasse": _suite_hasse,
    "iwasawa": _suite_iwasawa,
    "lseries": _suite_lseries,
}


def run_one(q: int, cfg: RunConfig) -> tuple[QRecord, dict | None]:
    """All requested suites for one prime.  Returns the record plus, when a
    fresh unit was computed and a cache is configured, the encoded cache
    record for the parent to append."""
    rec = QRecord(q=q, residue_class="7mod16" if q % 16 == 7 else "15mod16")
    needs_unit = bool({"units", "iwasawa"} & set(cfg.suites))
    seeded = False
    if needs_unit and cfg.cache_path:
        cert = cache.lookup(cfg.cache_path, q, maximal_order(q))
        if cert is not None:
            seed_unit(cert)
            seeded = True
    for name in SUITES:
        if name not in cfg.suites:
            continue
        t0 = perf_counter()
        try:
            rec.results[name] = _RUNNERS[name](q, cfg)
            rec.certified[name] = True
        except BudgetSkip as exc:
            rec.skipped[name] = str(exc)
        except Exception as exc:  # noqa: BLE001 - one bad prime must not stop the sweep
            rec.failed[name] = f"{type(exc).__name__}: {exc}"
        rec.seconds[name] = round(perf_counter() - t0, 6) if cfg.timing else 0.0
    rec.settle_status()
    payload = None
    unit_done = bool({"units", "iwasawa"} & set(rec.certified))
    if unit_done and cfg.cache_path and not seeded:
        # the suites above already computed the unit, so this is a cache hit
        cert = find_fundamental_unit(q, cfg.unit_budget)
        payload = cache.encode(maximal_order(q), cert)
    return rec, payload


def _run_one_pair(args: tuple) -> tuple[QRecord, dict | None]:
    return run_one(*args)


def run(cfg: RunConfig) -> list[QRecord]:
    """Sweep the configured prime family; records come back ordered by q
    regardless of how many workers ran them."""
    cfg.validate()
    primes = primes_for(cfg)
    records: list[QRecord] = []
    if cfg.jobs <= 1 or len(primes) <= 1:
        outcomes = map(_run_one_pair, [(q, cfg) for q in primes])
        for rec, payload in outcomes:
            if payload is not None and cfg.cache_path:
                cache.append_record(cfg.cache_path, payload)
            records.append(rec)
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for rec, payload in pool.map(_run_one_pair, [(q, cfg) for q in primes]):
                if payload is not None and cfg.cache_path:
                    cache.append_record(cfg.cache_path, payload)
                records.append(rec)
    return records


def exit_code(records: list[QRecord]) -> int:
    return 0 if all(r.status != "fail" for r in records) else 1


def status_counts(records: list[QRecord]) -> dict:
    out = {"ok": 0, "skip": 0, "fail": 0}
    for r in records:
        out[r.status] += 1
    return out


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

_BIG = 1 << 53


def _json_safe(value):
    """Decimal strings for integers a double cannot hold exactly."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) > _BIG else value
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def serialize_record(rec: QRecord) -> dict:
    """Plain dict with a fixed key order, ready for JSON output."""
    return {
        "schema": SCHEMA,
        "q": rec.q,
        "class": rec.residue_class,
        "results": {s: _json_safe(rec.results[s]) for s in SUITES if s in rec.results},
        "certified": {s: rec.certified[s] for s in SUITES if s in rec.certified},
        "skipped": {s: rec.skipped[s] for s in SUITES if s in rec.skipped},
        "failed": {s: rec.failed[s] for s in SUITES if s in rec.failed},
        "seconds": {s: rec.seconds[s] for s in SUITES if s in rec.seconds},
        "status": rec.status,
    }


CSV_COLUMNS = (
    "q",
    "class",
    "ord_w",
    "ord_wstar(s)",
    "xstar_order_or_r",
    "hasse_2part",
    "r_q",
    "trace_ord",
    "cw_val",
    "lseries_verdict",
    "status",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def csv_row(rec: dict) -> list[str]:
    """One row of the fixed-column table from a serialized record."""
    res = rec["results"]
    units = res.get("units", {})
    ords = units.get("ords", {})
    if rec["class"] == "7mod16":
        wstar = ords.get("wstar")
        iwa = res.get("iwasawa", {})
        cw = iwa.get("cw_fstar")
    else:
        pair = (ords.get("w1star"), ords.get("w2star"))
        wstar = f"{pair[0]};{pair[1]}" if pair[0] is not None else None
        iwa = res.get("iwasawa", {})
        cw = iwa.get("cw_f")
    row = [
        rec["q"],
        rec["class"],
        ords.get("w"),
        wstar,
        iwa.get("xstar_order_or_r"),
        res.get("hasse", {}).get("two_part"),
        res.get("classgroups", {}).get("r_q"),
        units.get("trace_ord"),
        cw,
        res.get("lseries", {}).get("verdict"),
        rec["status"],
    ]
    return [_cell(v) for v in row]


def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        lines.extend(",".join(csv_row(r)) for r in records)
        return "\n".join(lines) + "\n"
    if fmt == "md":
        head = "| " + " | ".join(CSV_COLUMNS) + " |"
        rule = "|" + "|".join(" --- " for _ in CSV_COLUMNS) + "|"
        body = ["| " + " | ".join(csv_row(r)) + " |" for r in records]
        return "\n".join([head, rule, *body]) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
