"""JSON wire formats.  Every rational is a ``"p/q"`` string."""
from __future__ import annotations

import json
from typing import Any

from .classical import ClassicalSpace, Ensemble, Evm, State, UnitalPositiveMap, make_evm
from .errors import ValidationError
from .exact import GaussianRational, Q, format_rational
from .poset import FinitePoset, make_poset
from .postproc import CompareVerdict, MarkovMatrix, Relation
from .quantum import QuantumEnsemble, QuantumEvm, Superoperator


def parse_space(text: str) -> tuple:
    """``"classical:3"`` -> ``("classical", 3)``; same for ``quantum:d``."""
    try:
        kind, d = text.split(":")
        d = int(d)
    except ValueError:
        raise ValidationError(f"bad space {text!r}; expected classical:d or quantum:d") from None
    if kind not in ("classical", "quantum") or d < 1:
        raise ValidationError(f"bad space {text!r}; expected classical:d or quantum:d")
    return kind, d


def space_from_json(obj) -> ClassicalSpace:
    if isinstance(obj, dict) and "classical" in obj:
        return ClassicalSpace(int(obj["classical"]))
    if isinstance(obj, int):
        return ClassicalSpace(obj)
    raise ValidationError(f"unsupported space {obj!r}")


def _require(obj, *keys):
    if not isinstance(obj, dict):
        raise ValidationError("expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ValidationError(f"missing field(s): {', '.join(missing)}")


def evm_from_json(obj) -> Evm:
    _require(obj, "space", "effects")
    return make_evm(space_from_json(obj["space"]), [[Q(x) for x in e] for e in obj["effects"]])


def ensemble_from_json(obj) -> Ensemble:
    _require(obj, "space", "members")
    space = space_from_json(obj["space"])
    return Ensemble(space, tuple(tuple(Q(x) for x in m) for m in obj["members"]))


def state_from_json(obj) -> State:
    _require(obj, "space", "values")
    return State(space_from_json(obj["space"]), tuple(Q(x) for x in obj["values"]))


def _gmatrix_from_json(rows):
    return tuple(tuple(GaussianRational.of(x) for x in row) for row in rows)


def povm_from_json(obj) -> QuantumEvm:
    _require(obj, "dim", "effects")
    return QuantumEvm(int(obj["dim"]), tuple(_gmatrix_from_json(e) for e in obj["effects"]))


def qensemble_from_json(obj) -> QuantumEnsemble:
    _require(obj, "dim", "members")
    return QuantumEnsemble(int(obj["dim"]), tuple(_gmatrix_from_json(m) for m in obj["members"]))


def poset_from_json(obj) -> FinitePoset:
    _require(obj, "elements")
    return make_poset(obj["elements"], [tuple(p) for p in obj.get("pairs", [])])


def superop_from_json(obj) -> Superoperator:
    _require(obj, "d_in", "d_out", "re")
    return Superoperator.from_json(obj)


def markov_from_json(rows) -> MarkovMatrix:
    return MarkovMatrix(tuple(tuple(Q(x) for x in row) for row in rows))


def verdict_to_json(v: CompareVerdict) -> dict:
    out: dict[str, Any] = {"verdict": v.relation.value}
    markov = {}
    if v.markov_fwd is not None:
        markov["forward"] = v.markov_fwd.to_json()
    if v.markov_bwd is not None:
        markov["backward"] = v.markov_bwd.to_json()
    if markov:
        out["markov"] = markov
    ens = {}
    if v.ensemble_fwd is not None:
        ens["forward"] = v.ensemble_fwd.to_json()
    if v.ensemble_bwd is not None:
        ens["backward"] = v.ensemble_bwd.to_json()
    if ens:
        out["ensembles"] = ens
    if v.gaps:
        out["gaps"] = {("forward" if k == "fwd" else "backward"): format_rational(g)
                       for k, g in sorted(v.gaps.items())}
    return out


def verdict_from_json(obj, quantum: bool = False) -> CompareVerdict:
    _require(obj, "verdict")
    rel = Relation(obj["verdict"])
    markov = obj.get("markov", {})
    ens = obj.get("ensembles", {})
    load = qensemble_from_json if quantum else ensemble_from_json
    return CompareVerdict(
        rel,
        markov_fwd=markov_from_json(markov["forward"]) if "forward" in markov else None,
        markov_bwd=markov_from_json(markov["backward"]) if "backward" in markov else None,
        ensemble_fwd=load(ens["forward"]) if "forward" in ens else None,
        ensemble_bwd=load(ens["backward"]) if "backward" in ens else None,
    )


def map_from_json(obj) -> UnitalPositiveMap:
    _require(obj, "target", "a", "a_prime")
    return UnitalPositiveMap(space_from_json(obj["target"]),
                             tuple(Q(x) for x in obj["a"]), tuple(Q(x) for x in obj["a_prime"]))


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
