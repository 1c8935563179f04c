"""Thermodynamic formalism and r-neutralized entropy on symbolic models."""
from .horseshoe import Horseshoe, bernoulli_stats, find_bernoulli_maximizers, induced_system
from .mmrne import maximize_over_family, rigidity_mme_criterion, sweep
from .sft import ShiftMetric, Word, ball_window, build_sft, count_words, cylinder_measure, sample_orbit
from .surface import TwoPotentialSystem, eval_point, exponent_range, neutralized_entropy
from .thermo import LocallyConstantPotential, MarkovMeasure, gibbs_markov, pressure, transfer_matrix

__all__ = [
    "Horseshoe", "bernoulli_stats", "find_bernoulli_maximizers", "induced_system",
    "maximize_over_family", "rigidity_mme_criterion", "sweep",
    "ShiftMetric", "Word", "ball_window", "build_sft", "count_words", "cylinder_measure", "sample_orbit",
    "TwoPotentialSystem", "eval_point", "exponent_range", "neutralized_entropy",
    "LocallyConstantPotential", "MarkovMeasure", "gibbs_markov", "pressure", "transfer_matrix",
]

__version__ = "0.1.0"
