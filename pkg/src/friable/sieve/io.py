"""JSON form of sieve instances and CSV form of their reports.

    {"kind": "explicit", "A": [...], "z": 7, "D": 50,
     "W": {"2^1": [1], "3^2": [0, 4]}, "w": {"2^1": 1.0}, "X": 100}

    {"kind": "interval_poly", "interval": [1, 5000], "q": 15,
     "poly_coeffs": [-1, 0, 1], "D": 70.7}

For "explicit", "w" defaults to the sizes of the W-sets and "X" to |A|.
For "interval_poly" the W-sets, densities and z are derived from q and G;
"D" defaults to sqrt(N).
"""

import csv
import io
import json
from dataclasses import replace
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from ..errors import InvalidInputError
from .polynomial import PolynomialSieveResult, polynomial_sieve
from .selberg import SieveInstance, SieveReport

CSV_FIELDS = ("instance", "X", "D", "z", "main_term", "remainder", "bound", "brute_count", "ratio")
_EXPLICIT_KEYS = {"kind", "A", "z", "D", "W", "w", "X"}
_POLY_KEYS = {"kind", "interval", "q", "poly_coeffs", "D"}


def _pp_key(key: str) -> Tuple[int, int]:
    try:
        if "^" in key:
            p, nu = key.split("^")
            return int(p), int(nu)
        return int(key), 1
    except ValueError:
        raise InvalidInputError(f"bad prime-power key {key!r}") from None


def _require(d: Mapping, keys: Iterable[str]):
    missing = [k for k in keys if k not in d]
    if missing:
        raise InvalidInputError(f"missing keys: {missing}")


def instance_from_dict(d: Mapping) -> Union[SieveInstance, Dict]:
    """An explicit SieveInstance, or for "interval_poly" the driver arguments."""
    kind = d.get("kind")
    if kind == "explicit":
        extra = set(d) - _EXPLICIT_KEYS
        if extra:
            raise InvalidInputError(f"unknown keys: {sorted(extra)}")
        _require(d, ("A", "z", "D"))
        w_sets = {_pp_key(k): v for k, v in d.get("W", {}).items()}
        dens = None
        if "w" in d:
            dens = {_pp_key(k): float(v) for k, v in d["w"].items()}
        return SieveInstance.explicit(d["A"], w_sets, z=float(d["z"]), d_cutoff=float(d["D"]),
                                      x_mass=d.get("X"), density=dens)
    if kind == "interval_poly":
        extra = set(d) - _POLY_KEYS
        if extra:
            raise InvalidInputError(f"unknown keys: {sorted(extra)}")
        _require(d, ("interval", "q", "poly_coeffs"))
        lo, hi = d["interval"]
        return {"interval": (int(lo), int(hi)), "q": int(d["q"]),
                "coeffs": tuple(int(c) for c in d["poly_coeffs"]), "d_cutoff": d.get("D")}
    raise InvalidInputError(f"unknown instance kind {kind!r}")


def load_instances(text: str) -> List[Mapping]:
    """Parse a JSON document holding one instance or a list of instances."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON: {exc}") from None
    return data if isinstance(data, list) else [data]


def run_instance(d: Mapping, brute: bool = True) -> SieveReport:
    built = instance_from_dict(d)
    if isinstance(built, SieveInstance):
        return built.report(brute)
    res: PolynomialSieveResult = polynomial_sieve(**built)
    rep = res.report
    return rep if brute else replace(rep, brute_count=None)


def report_row(instance_id: str, rep: SieveReport) -> Dict[str, str]:
    ratio = rep.ratio
    return {
        "instance": instance_id,
        "X": f"{rep.x_mass:.12e}",
        "D": f"{rep.d_cutoff:.12e}",
        "z": f"{rep.z:.12e}",
        "main_term": f"{rep.main_term:.12e}",
        "remainder": f"{rep.remainder:.12e}",
        "bound": f"{rep.bound:.12e}",
        "brute_count": "" if rep.brute_count is None else str(rep.brute_count),
        "ratio": "" if rep.brute_count is None else f"{ratio:.12e}",
    }


def reports_to_csv(rows: Iterable[Tuple[str, SieveReport]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for iid, rep in rows:
        writer.writerow(report_row(iid, rep))
    return buf.getvalue()
