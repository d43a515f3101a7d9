"""Deterministic exact serialization.

Every coefficient travels as a "num" or "num/den" string, never a float;
term lists are emitted in canonical order so serialized artifacts are
byte-stable across runs.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .exact import Rat, SparsePoly, as_rat
from .membership import MembershipCertificate
from .model import LatticeRelation, ModelSpec
from .series import LaurentSeries
from .systems import DiffSystem
from .weyl import WeylOperator


def rat_str(value: Rat) -> str:
    value = as_rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def rat_parse(text: str) -> Rat:
    return Fraction(text)


def poly_to_obj(poly: SparsePoly) -> dict:
    return {
        "family": poly.family,
        "arity": poly.arity,
        "terms": [
            {"exponents": list(exp), "coeff": rat_str(coeff)}
            for exp, coeff in poly.sorted_terms()],
    }


def poly_from_obj(obj: dict) -> SparsePoly:
    return SparsePoly(
        obj["family"], obj["arity"],
        {tuple(t["exponents"]): rat_parse(t["coeff"]) for t in obj["terms"]})


def series_to_obj(series: LaurentSeries) -> dict:
    return {
        "n": series.n,
        "i0": series.i0,
        "truncation": series.truncation,
        "terms": [
            {"a_exp": list(a), "b_exp": list(b), "coeff": rat_str(coeff)}
            for (a, b), coeff in series.sorted_terms()],
    }


def series_from_obj(obj: dict) -> LaurentSeries:
    return LaurentSeries(
        obj["n"], obj["i0"],
        {(tuple(t["a_exp"]), tuple(t["b_exp"])): rat_parse(t["coeff"])
         for t in obj["terms"]},
        obj["truncation"])


def operator_to_obj(op: WeylOperator) -> dict:
    return {
        "n": op.n,
        "families": list(op.families),
        "terms": [
            {
                "coord_1": list(c1),
                "coord_2": list(c2),
                "deriv_1": list(d1),
                "deriv_2": list(d2),
                "coeff": rat_str(coeff),
            }
            for (c1, c2, d1, d2), coeff in op.sorted_terms()],
    }


def operator_from_obj(obj: dict) -> WeylOperator:
    return WeylOperator(
        obj["n"],
        {(tuple(t["coord_1"]), tuple(t["coord_2"]),
          tuple(t["deriv_1"]), tuple(t["deriv_2"])): rat_parse(t["coeff"])
         for t in obj["terms"]},
        tuple(obj["families"]))


def model_to_obj(spec: ModelSpec) -> dict:
    return {
        "d": spec.d,
        "n": spec.n,
        "basis": [list(exp) for exp in spec.basis],
        "i0": spec.i0,
        "ordering": spec.ordering,
    }


def model_from_obj(obj: dict) -> ModelSpec:
    return ModelSpec(
        d=obj["d"], n=obj["n"],
        basis=tuple(tuple(exp) for exp in obj["basis"]),
        i0=obj["i0"], ordering=obj["ordering"])


def relation_to_obj(rel: LatticeRelation) -> dict:
    return {"vector": list(rel.vector)}


def system_to_obj(system: DiffSystem) -> dict:
    return {
        "kind": system.kind,
        "n": system.n,
        "p": system.p,
        "beta_e": rat_str(system.beta_e),
        "operators": [
            {"label": label, "operator": operator_to_obj(op)}
            for label, op in system.labelled()],
    }


def certificate_to_obj(cert: MembershipCertificate) -> dict:
    return {"q": [poly_to_obj(q) for q in cert.q]}


def certificate_from_obj(obj: dict) -> MembershipCertificate:
    return MembershipCertificate(
        q=tuple(poly_from_obj(q) for q in obj["q"]))


def dumps(obj: dict) -> str:
    """Canonical JSON text: sorted keys, no trailing whitespace drift."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
