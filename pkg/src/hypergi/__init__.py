"""Detect, quantify, localize and repair information-flow leaks in mini-language programs."""

from .hypergen import GenParams, Hypertest, generate_hypertests
from .lang import Observation, Program, apply_edit, execute, parse, render
from .localize import LocalizationMap, localize
from .qif import LeakEstimate, conditional_entropy, entropy, leakage_of_hypertest, suite_leakage
from .repair import EvolveParams, FitnessRecord, RepairResult, evolve, fitness, random_edit
from .subjects import load_subject
from .testgen import FunctionalSuite, fail_rate, generate_functional_tests

__version__ = "0.1.0"
