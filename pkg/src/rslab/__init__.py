"""Exact-computation laboratory for list decoding of randomly punctured
Reed-Solomon codes: finite fields, sparse multivariate polynomials, exact
linear algebra, agreement-constraint matrices, rank certification, and a
brute-force decodability oracle, all glued by a reproducible experiment
harness."""

from .gf import FieldCtx, FieldElement, make_field, sample_distinct
from .mpoly import MultiPoly, is_zero_poly
from .linalg import FieldMatrix, PolyMatrix
from .rscode import PuncturedRSCode, encode, random_puncture
from .setsys import SetSystem, check_admissible, enumerate_admissible, weight
from .rim import ReducedIntersectionMatrix, build_rim, witness_from_violation
from .certify import (
    CertificationOutcome,
    certification_params,
    certify_full_column_rank,
    failure_bound,
)
from .oracle import Verdict, is_avg_list_decodable, min_distance, plurality_center
from .harness import ExperimentConfig, run_identity_suite, run_monte_carlo, run_roundtrip

__version__ = "0.1.0"
