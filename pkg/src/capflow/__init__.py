"""Area-preserving mean curvature flow of rotationally symmetric surfaces between two slabs."""

__version__ = "0.1.0"

from .classify import ClassificationResult, Verdict, classify_limit, predicted_cylinder_radius
from .flow import FlowLaw
from .geometry import GeometrySample, Grid, Profile, sample
from .scenarios import Family, ScenarioSpec, build, validate
from .stepper import RunResult, Scheme, Status, StepperConfig, Tolerances, evolve, run

__all__ = [
    "ClassificationResult",
    "Family",
    "FlowLaw",
    "GeometrySample",
    "Grid",
    "Profile",
    "RunResult",
    "ScenarioSpec",
    "Scheme",
    "Status",
    "StepperConfig",
    "Tolerances",
    "Verdict",
    "build",
    "classify_limit",
    "evolve",
    "predicted_cylinder_radius",
    "run",
    "sample",
    "validate",
]
