"""Diagnosability of discrete-event systems under non-deterministic observations.

Besides classical diagnosability, the package decides output-fair
diagnosability: faults need only be detected on runs where every fair output
of a transition taken infinitely often is itself observed infinitely often.
"""
from .augment import AugmentedState, AugmentedSystem, build_augmented
from .errors import OfdiagError
from .estimate import Diagnoser, diagnose, observable_next, unobservable_reach
from .model import EPS, DesModel, export_dot, load_model, parse_model, serialize_model, validate
from .observation import ExtendedEvent, Lasso, is_fair_lasso, is_faulty, observation_set, projections
from .verifier import (
    Verdict,
    Witness,
    build_verification_structure,
    check_classical,
    check_of_diagnosability,
    reconstruct_normal_witness,
)

__version__ = "0.1.0"

__all__ = [
    "EPS",
    "AugmentedState",
    "AugmentedSystem",
    "DesModel",
    "Diagnoser",
    "ExtendedEvent",
    "Lasso",
    "OfdiagError",
    "Verdict",
    "Witness",
    "build_augmented",
    "build_verification_structure",
    "check_classical",
    "check_of_diagnosability",
    "diagnose",
    "export_dot",
    "is_fair_lasso",
    "is_faulty",
    "load_model",
    "observable_next",
    "observation_set",
    "parse_model",
    "projections",
    "reconstruct_normal_witness",
    "serialize_model",
    "unobservable_reach",
    "validate",
]
