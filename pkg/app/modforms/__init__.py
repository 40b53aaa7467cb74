"""Вычислительное ядро: сравнения модулярных форм по модулю p^n."""

from app.modforms.arith import PrimePowerModulus, ResidueInt, ResidueMatrix
from app.modforms.auxprimes import (
    AuxPrimeCertificate,
    BigImageVerdict,
    big_image_verdict,
    frob_order_pair,
    is_auxiliary,
    search_auxiliary,
)
from app.modforms.cohodim import DimTriple, LocalCase, dims
from app.modforms.congr import NewformData, WitnessReport, congruent_mod_pn, level_raising_witness
from app.modforms.deformplan import CocycleGen, PlanEntry, aux_plan, lemma_v_element, plan_for
from app.modforms.ellcurve import ApTable, WeierstrassCurve, ap_table
from app.modforms.localtypes import (
    IntegralLocalType,
    ResidualLocalType,
    TameLocalData,
    allowed_reductions,
    classify_residual,
)

__all__ = [
    "PrimePowerModulus",
    "ResidueInt",
    "ResidueMatrix",
    "WeierstrassCurve",
    "ApTable",
    "ap_table",
    "NewformData",
    "WitnessReport",
    "congruent_mod_pn",
    "level_raising_witness",
    "AuxPrimeCertificate",
    "BigImageVerdict",
    "big_image_verdict",
    "frob_order_pair",
    "is_auxiliary",
    "search_auxiliary",
    "ResidualLocalType",
    "IntegralLocalType",
    "TameLocalData",
    "classify_residual",
    "allowed_reductions",
    "DimTriple",
    "LocalCase",
    "dims",
    "CocycleGen",
    "PlanEntry",
    "plan_for",
    "aux_plan",
    "lemma_v_element",
]
